#pragma once

#include "hippa/core.hpp"

#include <optional>
#include <string>
#include <vector>

namespace hippa {

struct QuasarCertificate {
  double kappa = 1.0;
  double gamma = 0.0;
  Vector center;
  RegionDescriptor region = RegionWhole{};
};

void validate_certificate(const QuasarCertificate& cert);

enum class Property { Definition, FirstOrder, QuadraticGrowth, Pl, ErrorBoundValue, ErrorBoundSubgrad };
const char* property_name(Property p);
Property parse_property(const std::string& name);

struct SamplerConfig {
  int samples = 1000;
  std::uint64_t seed = 0;
  double radius = 10.0;       // used when the region is unbounded
  int lambda_grid = 33;       // uniform grid on [0,1], endpoints included
  double tolerance = 1e-8;
  // Optional override: draw points uniformly in this box instead of around the center.
  std::optional<std::pair<Vector, Vector>> box;
};

struct Witness {
  Vector x;
  double lambda = 0.0;
  Property property = Property::Definition;  // which inequality the point violates
};

struct CheckReport {
  Property property = Property::Definition;
  int samples_tested = 0;
  double worst_violation = 0.0;
  std::optional<Witness> witness;
  double tolerance = 1e-8;
  bool passed() const { return worst_violation <= tolerance; }
};

// Points inside cert.region: radius mixes uniform-in-ball draws with log-uniform radii down to 1e-6·R.
std::vector<Vector> sample_region(const QuasarCertificate& cert, const SamplerConfig& sampler);

CheckReport verify_certificate(const ObjectiveOracle& oracle, const QuasarCertificate& cert, Property property,
                               const SamplerConfig& sampler);

// Directional decrease h(x+td) ≤ h(x) − κt(h(x)−h(x̄)) along d = x̄ − x for t ∈ {1e-3,…,1e-6}.
CheckReport check_directional_decrease(const ObjectiveOracle& oracle, const QuasarCertificate& cert,
                                       const SamplerConfig& sampler);

// Signed residual of the defining inequality at one (x, λ); positive means violated.
double definition_residual(const ObjectiveOracle& oracle, const QuasarCertificate& cert, const Vector& x,
                           double lambda);
// h(x) − h(x̄) − ⟨v, x − x̄⟩/κ + (γ/2)‖x − x̄‖² with v the subgradient selection; positive means violated.
double first_order_residual(const ObjectiveOracle& oracle, const QuasarCertificate& cert, const Vector& x);
// Residual of the inequality named by the witness.
double witness_residual(const ObjectiveOracle& oracle, const QuasarCertificate& cert, const Witness& w);

enum class TransformKind { Scale, Translate, ReduceKappa };
struct Transform {
  TransformKind kind = TransformKind::Scale;
  double amount = 1.0;  // α for scale, θ for reduce_kappa
  Vector shift;         // z for translate
  static Transform scale(double alpha) { return {TransformKind::Scale, alpha, {}}; }
  static Transform translate(Vector z) { return {TransformKind::Translate, 0.0, std::move(z)}; }
  static Transform reduce_kappa(double theta) { return {TransformKind::ReduceKappa, theta, {}}; }
};

QuasarCertificate parameter_transform(const QuasarCertificate& cert, const Transform& t);
QuasarCertificate sum_certificates(const std::vector<std::pair<double, QuasarCertificate>>& terms);
QuasarCertificate compose_linear(const QuasarCertificate& cert, const Matrix& A);
QuasarCertificate compose_monotone(const QuasarCertificate& cert, double kappa2, double slope_lower);

double aux_constant_C(double k1, double k2);
double kappa_p(double t);
double kappa_p_threshold();
double sigma_hat(double q);

}  // namespace hippa
