#include "hippa/baselines.hpp"

#include "hippa/algorithm.hpp"

#include <chrono>
#include <cmath>
#include <sstream>

namespace hippa {

const char* baseline_name(BaselineMethod m) {
  switch (m) {
    case BaselineMethod::Pgd: return "pgd";
    case BaselineMethod::Psgd: return "psgd";
    case BaselineMethod::Psg: return "psg";
    case BaselineMethod::Pssg: return "pssg";
  }
  return "unknown";
}

BaselineMethod parse_baseline(const std::string& name) {
  for (auto m : {BaselineMethod::Pgd, BaselineMethod::Psgd, BaselineMethod::Psg, BaselineMethod::Pssg})
    if (name == baseline_name(m)) return m;
  fail(ErrorCode::BadParameter, "unknown baseline '" + name + "'");
}

BaselineConfig BaselineConfig::defaults(BaselineMethod m) {
  BaselineConfig c;
  c.method = m;
  switch (m) {
    case BaselineMethod::Pgd: c.step0 = 0.12; c.step_rule = StepRule::Constant; break;
    case BaselineMethod::Psgd: c.step0 = 0.07; c.step_rule = StepRule::Constant; break;
    case BaselineMethod::Psg: c.step0 = 0.8; c.step_rule = StepRule::InvSqrtK; break;
    case BaselineMethod::Pssg: c.step0 = 0.8; c.step_rule = StepRule::InvSqrtK; c.batch = 32; break;
  }
  return c;
}

namespace {

Vector project_ball(const Vector& x, const RegionBall& b) {
  Vector d = x - b.center;
  double n = d.norm();
  if (n <= b.radius) return x;
  return b.center + (b.radius / n) * d;
}

bool in_ball(const Vector& x, const RegionBall& b) { return (x - b.center).norm() <= b.radius * (1.0 + 1e-15); }

}  // namespace

Vector project_region(const Vector& x, const RegionDescriptor& region, ProjectionStats* stats) {
  if (std::holds_alternative<RegionWhole>(region)) return x;
  if (const auto* b = std::get_if<RegionBall>(&region)) return project_ball(x, *b);
  const auto& bi = std::get<RegionBallIntersection>(region);
  const RegionBall& a = bi.first;
  const RegionBall& c = bi.second;
  if (a.radius < 0.0 || c.radius < 0.0 || (a.center - c.center).norm() > a.radius + c.radius)
    fail(ErrorCode::EmptyRegion, "balls do not intersect");
  if (in_ball(x, a) && in_ball(x, c)) return x;
  // A single-ball projection that lands in the other ball is already the intersection projection.
  Vector pa = project_ball(x, a);
  if (in_ball(pa, c)) return pa;
  Vector pc = project_ball(x, c);
  if (in_ball(pc, a)) return pc;

  Vector z = x;
  Vector inc_a = Vector::Zero(x.size());
  Vector inc_c = Vector::Zero(x.size());
  int sweep = 0;
  for (; sweep < 10000; ++sweep) {
    Vector ya = project_ball(z + inc_a, a);
    inc_a = z + inc_a - ya;
    Vector zc = project_ball(ya + inc_c, c);
    inc_c = ya + inc_c - zc;
    double change = (zc - z).norm();
    z = std::move(zc);
    if (change <= 1e-10 && (ya - z).norm() <= 1e-10) break;
  }
  if (stats) {
    stats->sweeps = sweep + 1;
    stats->used_dykstra = true;
  }
  return z;
}

RunTrace run_baseline(const ObjectiveOracle& oracle, const Vector& x0, const BaselineConfig& cfg) {
  if (!(cfg.step0 > 0.0)) fail(ErrorCode::BadParameter, "step0 must be positive");
  if (cfg.max_iters < 0) fail(ErrorCode::BadParameter, "max_iters must be nonnegative");
  require_finite(x0, "run_baseline");
  const bool sampled = cfg.method == BaselineMethod::Psgd || cfg.method == BaselineMethod::Pssg;
  if (sampled && !oracle.stochastic && !oracle.minibatch)
    fail(ErrorCode::MissingSubgradient, "stochastic baseline needs a sampled gradient source");
  if (!sampled && !oracle.stochastic && !oracle.has_subgradient())
    fail(ErrorCode::MissingSubgradient, "baseline needs a subgradient selection");

  int batch = cfg.batch;
  if (batch <= 0 && oracle.stochastic)
    batch = sampled ? oracle.stochastic->batch_sgd : oracle.stochastic->batch_full;
  if (batch <= 0 && sampled) batch = 32;

  std::ostringstream desc;
  desc.precision(17);
  desc << baseline_name(cfg.method) << " step0=" << cfg.step0 << " rule=" << static_cast<int>(cfg.step_rule)
       << " batch=" << batch << " max_iters=" << cfg.max_iters << " tol=" << (cfg.rel_err_tol ? *cfg.rel_err_tol : 0.0)
       << " region=" << cfg.region.index() << " seed=" << cfg.seed;
  RunTrace trace;
  trace.config_digest = digest(desc.str());
  trace.metadata["method"] = baseline_name(cfg.method);
  if (std::holds_alternative<RegionBallIntersection>(cfg.region)) trace.metadata["projection"] = "dykstra";
  else if (std::holds_alternative<RegionBall>(cfg.region)) trace.metadata["projection"] = "ball_exact";

  auto direction = [&](const Vector& x, int k) -> Vector {
    const SeedStream stream = SeedStream{cfg.seed, 3}.at(static_cast<std::uint64_t>(k));
    if (oracle.stochastic) return oracle.stochastic->realize(stream, batch).subgrad_fn(x);
    if (sampled) return oracle.minibatch(stream, batch).subgrad_fn(x);
    return oracle.subgrad_fn(x);
  };

  const auto start = std::chrono::steady_clock::now();
  auto elapsed = [&] { return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count(); };
  Vector x = x0;
  for (int k = 0;; ++k) {
    TraceRecord rec = make_record(oracle, k, x, cfg.seed);
    if (cfg.rel_err_tol && rec.rel_err && *rec.rel_err < *cfg.rel_err_tol) {
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
    const double alpha = cfg.step_rule == StepRule::Constant ? cfg.step0 : cfg.step0 / std::sqrt(k + 1.0);
    Vector y = project_region(x - alpha * direction(x, k), cfg.region);
    rec.step_norm = (y - x).norm();
    rec.elapsed_s = elapsed();
    const bool stop = rec.step_norm <= cfg.eps_step;
    trace.records.push_back(std::move(rec));
    if (stop) {
      trace.terminated_by = Termination::StepTol;
      break;
    }
    x = std::move(y);
  }
  return trace;
}

}  // namespace hippa
