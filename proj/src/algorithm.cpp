#include "hippa/algorithm.hpp"

#include "hippa/baselines.hpp"

#include <chrono>
#include <cmath>
#include <limits>
#include <sstream>

namespace hippa {

double BetaSchedule::at(int k) const { return std::min(initial * std::pow(growth, k), cap); }
double BetaSchedule::lower() const { return std::min(initial, cap); }
double BetaSchedule::upper() const { return cap; }

void validate_hippa_config(const HippaConfig& cfg) {
  validate_prox_config(cfg.prox);
  const auto& b = cfg.beta;
  if (!(b.initial > 0.0 && b.growth > 0.0 && b.cap > 0.0)) fail(ErrorCode::BadParameter, "beta schedule must be positive");
  if (b.growth < 1.0) fail(ErrorCode::BadParameter, "geometric beta schedule must be nondecreasing");
  if (b.initial > b.cap) fail(ErrorCode::BadParameter, "beta schedule needs initial <= cap");
  if (!(cfg.eps_step > 0.0)) fail(ErrorCode::BadParameter, "eps_step must be positive");
  if (cfg.eps_rel && !(*cfg.eps_rel > 0.0)) fail(ErrorCode::BadParameter, "eps_rel must be positive");
  if (cfg.max_iters < 0) fail(ErrorCode::BadParameter, "max_iters must be nonnegative");
}

std::string describe(const HippaConfig& cfg) {
  std::ostringstream os;
  os.precision(17);
  os << "hippa p=" << cfg.prox.p << " beta=" << cfg.beta.initial << "," << cfg.beta.growth << "," << cfg.beta.cap
     << " inner_tol=" << cfg.prox.inner_tol << " inner_max=" << cfg.prox.inner_max_iters
     << " mu=" << cfg.prox.smoothing_mu << " shrink=" << cfg.prox.smoothing_shrink
     << " multistart=" << cfg.prox.multistart << " eps_step=" << cfg.eps_step
     << " eps_rel=" << (cfg.eps_rel ? *cfg.eps_rel : 0.0) << " max_iters=" << cfg.max_iters
     << " region=" << cfg.region.index() << " seed=" << cfg.seed;
  return os.str();
}

TraceRecord make_record(const ObjectiveOracle& oracle, int k, const Vector& x, std::uint64_t seed) {
  TraceRecord rec;
  rec.k = k;
  rec.x = x;
  if (oracle.stochastic) {
    const auto& sm = *oracle.stochastic;
    Estimate e = sm.estimate(x, SeedStream{seed, 1}.at(static_cast<std::uint64_t>(k)), sm.batch_eval);
    rec.value = e.mean;
    rec.value_stderr = e.std_error;
  } else {
    rec.value = oracle.value_fn(x);
  }
  if (oracle.minimizer) {
    double d = (x - *oracle.minimizer).norm();
    rec.dist_to_min = d;
    double scale = oracle.minimizer->norm();
    if (scale > 0.0) rec.rel_err = d / scale;
  }
  return rec;
}

RunTrace run_hippa(const ObjectiveOracle& oracle, const Vector& x0, const HippaConfig& cfg) {
  validate_hippa_config(cfg);
  require_finite(x0, "run_hippa");
  if (cfg.eps_rel && !oracle.minimizer) fail(ErrorCode::MissingMinimizer, "eps_rel stopping needs a minimizer");

  RunTrace trace;
  trace.config_digest = digest(describe(cfg));
  trace.metadata["method"] = "hippa";
  trace.metadata["p"] = std::to_string(cfg.prox.p);
  trace.metadata["beta_lower"] = std::to_string(cfg.beta.lower());
  trace.metadata["beta_upper"] = std::to_string(cfg.beta.upper());
  trace.metadata["inner_tol"] = std::to_string(cfg.prox.inner_tol);
  trace.metadata["prox_solution"] = cfg.prox.multistart > 0 ? "best_of_multistart" : "local_from_anchor";
  trace.metadata["gamma_zero_sequence_assumption"] = "quasar-convex w.r.t. every minimizer (not verified)";
  if (std::holds_alternative<RegionBallIntersection>(cfg.region)) trace.metadata["projection"] = "dykstra";
  else if (std::holds_alternative<RegionBall>(cfg.region)) trace.metadata["projection"] = "ball_exact";

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };

  Vector x = x0;
  bool budget_flag = false;
  for (int k = 0;; ++k) {
    TraceRecord rec = make_record(oracle, k, x, cfg.seed);
    if (cfg.eps_rel && rec.rel_err && *rec.rel_err < *cfg.eps_rel) {
      rec.elapsed_s = elapsed();
      trace.records.push_back(std::move(rec));
      trace.terminated_by = Termination::RelErrTol;
      break;
    }
    if (k >= cfg.max_iters) {
      rec.elapsed_s = elapsed();
      trace.records.push_back(std::move(rec));
      trace.terminated_by = Termination::MaxIters;
      break;
    }
    ProxConfig pc = cfg.prox;
    pc.beta = cfg.beta.at(k);
    pc.multistart_seed = cfg.seed * 7919ULL + static_cast<std::uint64_t>(k);
    ProxResult pr;
    if (oracle.stochastic) {
      // Sample-average model with a fresh batch per outer step.
      const auto& sm = *oracle.stochastic;
      ObjectiveOracle model = sm.realize(SeedStream{cfg.seed, 2}.at(static_cast<std::uint64_t>(k)), sm.batch_full);
      pr = hope_solve(model, x, pc);
    } else {
      pr = hope_solve(oracle, x, pc);
    }
    Vector y = project_region(pr.y, cfg.region);
    rec.step_norm = (y - x).norm();
    rec.inner_iters = pr.inner_iters;
    rec.inner_converged = pr.converged;
    budget_flag = budget_flag || !pr.converged;
    rec.elapsed_s = elapsed();
    const bool stop = rec.step_norm <= cfg.eps_step;
    trace.records.push_back(std::move(rec));
    if (stop) {
      trace.terminated_by = Termination::StepTol;
      break;
    }
    x = std::move(y);
  }
  if (budget_flag) trace.metadata["inner_budget_exhausted"] = "true";
  return trace;
}

long long iteration_bound(double p, double beta_upper, double h0, double h_star, double eps) {
  if (!(eps > 0.0) || !(beta_upper > 0.0) || !(p > 1.0)) fail(ErrorCode::BadParameter, "iteration bound needs eps, beta > 0 and p > 1");
  if (h0 < h_star) fail(ErrorCode::BadParameter, "h0 must be at least h*");
  const double bound = std::ceil(p * beta_upper * (h0 - h_star) / std::pow(eps, p));
  if (!(bound < 9.0e18)) return std::numeric_limits<long long>::max();
  return static_cast<long long>(bound);
}

}  // namespace hippa
