#pragma once

#include <Eigen/Dense>

#include <cstdint>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

namespace hippa {

using Vector = Eigen::VectorXd;
using Matrix = Eigen::MatrixXd;

enum class ErrorCode {
  Ok = 0,
  MissingSubgradient,
  NonFiniteInput,
  MissingMinimizer,
  InvalidCertificate,
  GammaZeroForGrowth,
  BadParameter,
  CenterMismatch,
  RankDeficient,
  RangeViolation,
  OutOfDomain,
  InnerBudgetExhausted,
  NonFiniteObjective,
  UnsupportedAtom,
  RankDeficientData,
  EmptyRegion,
  InsufficientTrace,
  RadiusRequired,
  UnknownEntry,
  ConfigParse,
  IoError,
  Internal,
};

const char* error_name(ErrorCode code);

class Error : public std::runtime_error {
 public:
  Error(ErrorCode code, const std::string& what);
  ErrorCode code() const noexcept { return code_; }

 private:
  ErrorCode code_;
};

[[noreturn]] void fail(ErrorCode code, const std::string& what);
void require_finite(const Vector& x, const char* where);

// Counter-based stream: (seed, offset) fully determines the generator state.
struct SeedStream {
  std::uint64_t seed = 0;
  std::uint64_t offset = 0;

  std::mt19937_64 engine() const;
  SeedStream at(std::uint64_t k) const { return {seed, offset * 1000003ULL + k + 1}; }
};

struct Estimate {
  double mean = 0.0;
  double std_error = 0.0;
};

// Declared nonsmooth structure: outer_power( weight·Σ_i ‖r_i(y)‖ + Σ_j w_j·max{0, g_j(y)} ).
// Residuals r_i are affine in y; the block returns them as matrix columns.
struct NormBlock {
  Eigen::Index count = 0;
  double weight = 1.0;
  std::function<Matrix(const Vector&)> residuals;        // rows × count
  std::function<Vector(const Matrix&)> adjoint;          // Σ_i J_iᵀ g_i for columns g_i
};

struct PositivePart {
  double weight = 1.0;
  std::function<double(const Vector&)> fn;
  std::function<Vector(const Vector&)> grad;
};

struct AtomDeclaration {
  Eigen::Index dim = 0;
  std::vector<NormBlock> norms;
  std::vector<PositivePart> positive_parts;
  double outer_power = 1.0;
};

struct ObjectiveOracle;

// Monte-Carlo capability: the sample-average objective over a batch drawn from `stream`.
struct StochasticModel {
  std::function<ObjectiveOracle(const SeedStream&, int batch)> realize;
  std::function<Estimate(const Vector&, const SeedStream&, int batch)> estimate;
  int batch_eval = 0;
  int batch_full = 0;
  int batch_sgd = 0;
  std::uint64_t seed = 0;
};

struct ObjectiveOracle {
  Eigen::Index dim = 0;
  std::function<double(const Vector&)> value_fn;
  std::function<Vector(const Vector&)> subgrad_fn;
  std::optional<Vector> minimizer;
  std::optional<double> min_value;
  std::shared_ptr<const AtomDeclaration> atoms;
  std::shared_ptr<const StochasticModel> stochastic;
  // Mini-batch sub-objective used by stochastic subgradient baselines on finite sums.
  std::function<ObjectiveOracle(const SeedStream&, int batch)> minibatch;

  double value(const Vector& x) const;
  bool has_subgradient() const { return static_cast<bool>(subgrad_fn); }
};

Vector subgradient_select(const ObjectiveOracle& oracle, const Vector& x);

// Oracle algebra mirroring the certificate calculus.
ObjectiveOracle scale_oracle(const ObjectiveOracle& h, double alpha);
ObjectiveOracle translate_oracle(const ObjectiveOracle& h, const Vector& z);
ObjectiveOracle sum_oracles(const std::vector<std::pair<double, ObjectiveOracle>>& terms);
ObjectiveOracle compose_linear_oracle(const ObjectiveOracle& h, const Matrix& A);
ObjectiveOracle compose_monotone_oracle(const ObjectiveOracle& h, std::function<double(double)> phi,
                                        std::function<double(double)> dphi);
ObjectiveOracle make_atomic_oracle(std::shared_ptr<const AtomDeclaration> atoms, double mu = 0.0);

struct RegionWhole {};
struct RegionBall {
  Vector center;
  double radius = 0.0;
};
struct RegionBallIntersection {
  RegionBall first;
  RegionBall second;
};
using RegionDescriptor = std::variant<RegionWhole, RegionBall, RegionBallIntersection>;

bool region_contains(const RegionDescriptor& region, const Vector& x, double tol = 0.0);
double region_violation(const RegionDescriptor& region, const Vector& x);

struct TraceRecord {
  int k = 0;
  Vector x;
  double value = 0.0;
  std::optional<double> value_stderr;
  double step_norm = 0.0;
  std::optional<double> dist_to_min;
  std::optional<double> rel_err;
  int inner_iters = 0;
  bool inner_converged = true;
  double elapsed_s = 0.0;
};

enum class Termination { StepTol, RelErrTol, MaxIters };
const char* termination_name(Termination t);

struct RunTrace {
  std::vector<TraceRecord> records;
  std::string config_digest;
  Termination terminated_by = Termination::MaxIters;
  std::map<std::string, std::string> metadata;
};

struct DistanceRow {
  int k = 0;
  double dist = 0.0;
  double value_gap = 0.0;
};

std::vector<DistanceRow> distance_metrics(const RunTrace& trace, const ObjectiveOracle& oracle);

// FNV-1a over a canonical text rendering; stable across runs and platforms.
std::string digest(const std::string& text);

}  // namespace hippa
