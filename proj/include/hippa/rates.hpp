#pragma once

#include "hippa/algorithm.hpp"
#include "hippa/core.hpp"
#include "hippa/quasar.hpp"

#include <limits>
#include <map>
#include <optional>
#include <string>
#include <vector>

namespace hippa {

enum class Regime { PIn12, PEq2, PGt2, GammaZero };
const char* regime_name(Regime r);
Regime regime_of(double gamma, double p);

// Per-iteration sequences the rate checks operate on; CSV traces carry exactly these.
struct RateSeries {
  std::vector<int> k;
  std::vector<double> dist;
  std::vector<double> gap;
  std::vector<double> step;
  std::optional<Termination> terminated_by;
};

// dist is measured to `center`; gap is value − h_star.
RateSeries series_from_trace(const RunTrace& trace, const Vector& center, double h_star);

struct RateFit {
  double linear_ratio = std::numeric_limits<double>::quiet_NaN();
  double superlinear_order = std::numeric_limits<double>::quiet_NaN();
  double sublinear_exponent = std::numeric_limits<double>::quiet_NaN();
};

inline constexpr double kDistanceFloor = 1e-12;

RateFit fit_rates(const RateSeries& series);
RateFit estimate_rate(const RunTrace& trace, const ObjectiveOracle& oracle);

struct RateContext {
  double p = 2.0;
  double beta_lower = 1.0;
  double beta_upper = 1.0;
  double inner_tol = 1e-10;
  std::optional<double> radius;    // local-linear ball radius for p in (1,2)
  std::optional<double> eps;       // accuracy for the complexity predictions
  std::optional<double> eps_step;  // stopping tolerance used by the run
};

RateContext rate_context(const HippaConfig& cfg, std::optional<double> radius = std::nullopt,
                         std::optional<double> eps = std::nullopt);

// Closed-form constants keyed by stable names; complexities appear only when their preconditions hold.
std::map<std::string, double> theorem_bounds(const QuasarCertificate& cert, const RateContext& ctx,
                                             std::optional<double> x0_dist = std::nullopt);

struct TheoremCheck {
  std::string id;
  double bound = 0.0;
  double worst_observed = 0.0;
  double tolerance = 0.0;
  bool pass = true;
  double slack() const { return bound - worst_observed; }
};

struct RateReport {
  Regime regime = Regime::PEq2;
  RateFit fitted;
  std::vector<TheoremCheck> checks;
  std::optional<long long> iterate_complexity;
  std::optional<long long> value_complexity;
  std::map<std::string, double> constants;
  std::vector<std::string> notes;
  bool all_pass() const;
  const TheoremCheck* find(const std::string& id) const;
};

RateReport check_rate_bounds(const RateSeries& series, const QuasarCertificate& cert, const RateContext& ctx);
RateReport check_rate_bounds(const RunTrace& trace, const ObjectiveOracle& oracle, const QuasarCertificate& cert,
                             const RateContext& ctx);

std::string to_json(const RateReport& report);

}  // namespace hippa
