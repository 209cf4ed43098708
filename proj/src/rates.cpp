#include "hippa/rates.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <numeric>

namespace hippa {

const char* regime_name(Regime r) {
  switch (r) {
    case Regime::PIn12: return "p_in_1_2";
    case Regime::PEq2: return "p_eq_2";
    case Regime::PGt2: return "p_gt_2";
    case Regime::GammaZero: return "gamma_zero";
  }
  return "unknown";
}

namespace {

bool is_two(double p) { return std::abs(p - 2.0) <= 1e-12; }

double ls_slope(const std::vector<double>& x, const std::vector<double>& y) {
  const double n = static_cast<double>(x.size());
  const double mx = std::accumulate(x.begin(), x.end(), 0.0) / n;
  const double my = std::accumulate(y.begin(), y.end(), 0.0) / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (y[i] - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  return sxx > 0.0 ? sxy / sxx : std::numeric_limits<double>::quiet_NaN();
}

long long ceil_ll(double v) { return static_cast<long long>(std::ceil(v)); }

// Accumulates lhs ≤ rhs·(1+1e-6) + tolerance over a sequence; `shown` is what gets reported as worst.
struct CheckBuilder {
  TheoremCheck check;
  bool any = false;
  CheckBuilder(std::string id, double bound, double tolerance) {
    check.id = std::move(id);
    check.bound = bound;
    check.tolerance = tolerance;
    check.worst_observed = -std::numeric_limits<double>::infinity();
  }
  void add(double lhs, double rhs, double shown) {
    any = true;
    check.worst_observed = std::max(check.worst_observed, shown);
    if (!(lhs <= rhs * (1.0 + 1e-6) + check.tolerance)) check.pass = false;
  }
  // Excess form: reported worst is lhs − rhs against a bound of 0.
  void add_excess(double lhs, double rhs) { add(lhs, rhs, lhs - rhs); }
  TheoremCheck done() {
    if (!any) check.worst_observed = 0.0;
    return check;
  }
};

}  // namespace

Regime regime_of(double gamma, double p) {
  if (gamma == 0.0) return Regime::GammaZero;
  if (is_two(p)) return Regime::PEq2;
  return p > 2.0 ? Regime::PGt2 : Regime::PIn12;
}

RateSeries series_from_trace(const RunTrace& trace, const Vector& center, double h_star) {
  RateSeries s;
  for (const auto& r : trace.records) {
    s.k.push_back(r.k);
    s.dist.push_back((r.x - center).norm());
    s.gap.push_back(r.value - h_star);
    s.step.push_back(r.step_norm);
  }
  s.terminated_by = trace.terminated_by;
  return s;
}

RateFit fit_rates(const RateSeries& s) {
  const std::size_t n = s.dist.size();
  const auto usable = std::count_if(s.dist.begin(), s.dist.end(), [](double d) { return d > kDistanceFloor; });
  if (usable < 5) fail(ErrorCode::InsufficientTrace, "need at least 5 records with distance above 1e-12");
  RateFit fit;

  std::vector<double> log_prev, log_next;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (s.dist[i] > kDistanceFloor && s.dist[i + 1] > kDistanceFloor) {
      log_prev.push_back(std::log(s.dist[i]));
      log_next.push_back(std::log(s.dist[i + 1]));
    }
  }
  if (!log_prev.empty()) {
    const std::size_t from = log_prev.size() / 2;
    double acc = 0.0;
    for (std::size_t i = from; i < log_prev.size(); ++i) acc += log_next[i] - log_prev[i];
    fit.linear_ratio = std::exp(acc / static_cast<double>(log_prev.size() - from));
  }
  if (log_prev.size() >= 2) fit.superlinear_order = ls_slope(log_prev, log_next);

  std::vector<double> log_k, log_gap;
  for (std::size_t i = 0; i < n && i < s.gap.size(); ++i) {
    if (s.k[i] >= 1 && s.gap[i] > 0.0 && std::isfinite(s.gap[i])) {
      log_k.push_back(std::log(static_cast<double>(s.k[i])));
      log_gap.push_back(std::log(s.gap[i]));
    }
  }
  if (log_k.size() >= 4) {
    const std::size_t from = log_k.size() / 2;
    fit.sublinear_exponent = ls_slope(std::vector<double>(log_k.begin() + from, log_k.end()),
                                      std::vector<double>(log_gap.begin() + from, log_gap.end()));
  }
  return fit;
}

RateFit estimate_rate(const RunTrace& trace, const ObjectiveOracle& oracle) {
  if (!oracle.minimizer) fail(ErrorCode::MissingMinimizer, "rate fitting needs the minimizer");
  const double h_star = oracle.min_value.value_or(oracle.value(*oracle.minimizer));
  return fit_rates(series_from_trace(trace, *oracle.minimizer, h_star));
}

RateContext rate_context(const HippaConfig& cfg, std::optional<double> radius, std::optional<double> eps) {
  RateContext ctx;
  ctx.p = cfg.prox.p;
  ctx.beta_lower = cfg.beta.lower();
  ctx.beta_upper = cfg.beta.upper();
  ctx.inner_tol = cfg.prox.inner_tol;
  ctx.radius = radius;
  ctx.eps = eps;
  ctx.eps_step = cfg.eps_step;
  return ctx;
}

std::map<std::string, double> theorem_bounds(const QuasarCertificate& cert, const RateContext& ctx,
                                             std::optional<double> x0_dist) {
  const double kappa = cert.kappa, gamma = cert.gamma, p = ctx.p, bl = ctx.beta_lower;
  if (!(kappa > 0.0 && kappa <= 1.0) || !(gamma >= 0.0)) fail(ErrorCode::BadParameter, "certificate needs kappa in (0,1], gamma >= 0");
  if (!(p > 1.0) || !(bl > 0.0) || !(ctx.beta_upper >= bl)) fail(ErrorCode::BadParameter, "need p > 1 and 0 < beta' <= beta''");
  if (x0_dist && !(*x0_dist >= 0.0)) fail(ErrorCode::BadParameter, "initial distance must be nonnegative");
  if (ctx.eps && !(*ctx.eps > 0.0)) fail(ErrorCode::BadParameter, "eps must be positive");

  std::map<std::string, double> out;
  const std::optional<double> eps = ctx.eps;
  const Regime regime = regime_of(gamma, p);

  if (regime == Regime::GammaZero) {
    if (!x0_dist) return out;
    const double D = *x0_dist;
    double constant = 0.0, exponent = 0.0;
    if (p < 2.0 && !is_two(p)) {
      constant = std::pow(D, p) / (std::pow(2.0, p - 1.0) * bl * kappa);
      exponent = p - 1.0;
    } else if (is_two(p)) {
      constant = D * D / (2.0 * kappa * bl);
      exponent = 1.0;
    } else {
      constant = std::pow((p - 2.0) / p, (p - 2.0) / 2.0) * std::pow(D, p) / (bl * kappa * p);
      exponent = p / 2.0;
    }
    out["envelope_constant"] = constant;
    out["envelope_exponent"] = exponent;
    if (eps) {
      double n = 0.0;
      if (p < 2.0 && !is_two(p))
        n = 1.0 + std::pow(constant, 1.0 / (p - 1.0)) / std::pow(*eps, 1.0 / (p - 1.0));
      else if (is_two(p))
        n = 1.0 + constant / *eps;
      else
        n = 1.0 + std::pow(1.0 / (bl * kappa * p), 2.0 / p) * std::pow((p - 2.0) / p, (p - 2.0) / p) * D * D /
                      std::pow(*eps, 2.0 / p);
      out["value_complexity"] = static_cast<double>(ceil_ll(n));
    }
    return out;
  }

  if (regime == Regime::PEq2) {
    const double r = 1.0 / std::sqrt(1.0 + kappa * bl * gamma + kappa * kappa * bl * gamma / (2.0 - kappa));
    out["linear_ratio_bound"] = r;
    if (x0_dist && eps && *x0_dist > 0.0) {
      const double D = *x0_dist;
      if (*eps < 1.0)
        out["iterate_complexity"] =
            static_cast<double>(ceil_ll(1.0 + (std::log(1.0 / *eps) + std::log(D)) / std::log(1.0 / r)));
      if (*eps < D * D / (2.0 * bl))
        out["value_complexity"] =
            static_cast<double>(ceil_ll(1.0 + std::log(D * D / (2.0 * bl * *eps)) / (2.0 * std::log(1.0 / r))));
    }
    return out;
  }

  if (regime == Regime::PGt2) {
    const double c = (2.0 - kappa) / (bl * kappa * gamma);
    const double root = std::pow(c, 1.0 / (p - 2.0));
    const double init_radius = 1.0 / root;
    out["superlinear_constant"] = c;
    out["init_radius"] = init_radius;
    if (x0_dist && eps && *x0_dist > 0.0 && root * *x0_dist < 1.0) {
      const double denom = std::log(1.0 / (root * *x0_dist));
      if (*eps < init_radius)
        out["iterate_complexity"] = static_cast<double>(
            ceil_ll(1.0 + std::log(std::log(1.0 / (root * *eps)) / denom) / std::log(p - 1.0)));
      const double scale = p * bl * std::pow(c, p / (p - 2.0));
      if (*eps * scale < 1.0)
        out["value_complexity"] = static_cast<double>(
            ceil_ll(1.0 + std::log(std::log(1.0 / (scale * *eps)) / (p * denom)) / std::log(p - 1.0)));
    }
    return out;
  }

  if (!ctx.radius) fail(ErrorCode::RadiusRequired, "p in (1,2) with gamma > 0 needs a local radius");
  const double r = *ctx.radius;
  const double kp = kappa_p(p);
  const double r_max = std::pow(kp / 4.0, 1.0 / (2.0 - p));
  if (!(r > 0.0) || r > r_max * (1.0 + 1e-12))
    fail(ErrorCode::BadParameter, "local radius must lie in (0, (kappa_p/4)^(1/(2-p))]");
  const double eta = std::pow(2.0 * p / (kp * std::pow(r, p - 2.0)), 1.0 / (p - 1.0));
  out["eta_p"] = eta;
  out["kappa_p"] = kp;
  out["local_radius"] = r;
  out["local_radius_max"] = r_max;
  if (x0_dist && eps && *x0_dist > 0.0 && *x0_dist <= r) {
    const double D = *x0_dist;
    if (*eps < 1.0)
      out["iterate_complexity"] =
          static_cast<double>(ceil_ll(1.0 + (std::log(1.0 / *eps) + std::log(D)) / std::log(1.0 / eta)));
    if (*eps < std::pow(D, p) / (p * bl))
      out["value_complexity"] = static_cast<double>(
          ceil_ll(1.0 + std::log(std::pow(D, p) / (p * bl * *eps)) / (p * std::log(1.0 / eta))));
  }
  return out;
}

bool RateReport::all_pass() const {
  return std::all_of(checks.begin(), checks.end(), [](const TheoremCheck& c) { return c.pass; });
}

const TheoremCheck* RateReport::find(const std::string& id) const {
  for (const auto& c : checks)
    if (c.id == id) return &c;
  return nullptr;
}

namespace {

std::optional<int> first_index(const std::vector<double>& v, double below) {
  for (std::size_t i = 0; i < v.size(); ++i)
    if (v[i] < below) return static_cast<int>(i);
  return std::nullopt;
}

// Measured first k reaching `below`, judged against a predicted count. Inconclusive traces add nothing.
void complexity_check(RateReport& rep, const std::string& id, const RateSeries& s, const std::vector<double>& seq,
                      double below, long long predicted) {
  auto idx = first_index(seq, below);
  TheoremCheck c;
  c.id = id;
  c.bound = static_cast<double>(predicted);
  if (idx) {
    c.worst_observed = s.k[*idx];
  } else if (!s.k.empty() && s.k.back() >= predicted) {
    c.worst_observed = s.k.back() + 1;
  } else {
    rep.notes.push_back(id + ": trace ended before reaching the target; check skipped");
    return;
  }
  c.pass = c.worst_observed <= c.bound;
  rep.checks.push_back(c);
}

}  // namespace

RateReport check_rate_bounds(const RateSeries& s, const QuasarCertificate& cert, const RateContext& ctx) {
  const std::size_t n = s.dist.size();
  if (n == 0 || s.gap.size() != n || s.step.size() != n || s.k.size() != n)
    fail(ErrorCode::InsufficientTrace, "rate checks need a nonempty trace with aligned columns");
  RateReport rep;
  rep.regime = regime_of(cert.gamma, ctx.p);
  const double D0 = s.dist[0];
  rep.constants = theorem_bounds(cert, ctx, D0);
  try {
    rep.fitted = fit_rates(s);
  } catch (const Error& e) {
    if (e.code() != ErrorCode::InsufficientTrace) throw;
    rep.notes.push_back("rate fit skipped: fewer than 5 records above the distance floor");
  }
  const double slack = 10.0 * ctx.inner_tol;
  const double p = ctx.p, bl = ctx.beta_lower;
  auto constant = [&](const char* key) { return rep.constants.at(key); };

  // Structural invariants shared by every regime.
  {
    CheckBuilder fejer("fejer_monotone", 0.0, 1e-8 + slack);
    CheckBuilder descent("value_descent", 0.0, 1e-8 + slack);
    for (std::size_t i = 0; i + 1 < n; ++i) {
      fejer.add_excess(s.dist[i + 1], s.dist[i]);
      descent.add(s.gap[i + 1], s.gap[i], s.gap[i + 1] - s.gap[i]);
    }
    rep.checks.push_back(fejer.done());
    rep.checks.push_back(descent.done());
    double sum = 0.0;
    for (double st : s.step) sum += std::pow(st, p);
    CheckBuilder summable("step_summability", p * ctx.beta_upper * std::max(0.0, s.gap[0]), slack);
    summable.add(sum, summable.check.bound, sum);
    rep.checks.push_back(summable.done());
    if (ctx.eps_step && s.terminated_by == Termination::StepTol && s.gap[0] >= 0.0) {
      const long long bound = iteration_bound(p, ctx.beta_upper, s.gap[0], 0.0, *ctx.eps_step);
      TheoremCheck c{"stopping_bound", static_cast<double>(bound), static_cast<double>(s.k.back()), 0.0, true};
      c.pass = c.worst_observed <= c.bound;
      rep.checks.push_back(c);
    }
  }

  switch (rep.regime) {
    case Regime::PEq2: {
      const double r = constant("linear_ratio_bound");
      CheckBuilder ratio("linear_ratio_p2", r, slack);
      CheckBuilder value("value_rate_p2", 0.0, slack);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        if (s.dist[i] > kDistanceFloor) ratio.add(s.dist[i + 1], r * s.dist[i], s.dist[i + 1] / s.dist[i]);
        value.add_excess(s.gap[i + 1], D0 * D0 * std::pow(r, 2.0 * s.k[i]) / (2.0 * bl));
      }
      rep.checks.push_back(ratio.done());
      rep.checks.push_back(value.done());
      break;
    }
    case Regime::PGt2: {
      const double c = constant("superlinear_constant");
      const double init_radius = constant("init_radius");
      CheckBuilder step("superlinear_step", c, slack);
      for (std::size_t i = 0; i + 1 < n; ++i) {
        const double lead = std::pow(s.dist[i], p - 1.0);
        if (s.dist[i] > kDistanceFloor) step.add(s.dist[i + 1], c * lead, s.dist[i + 1] / lead);
      }
      rep.checks.push_back(step.done());
      if (D0 <= init_radius) {
        const double root = std::pow(c, 1.0 / (p - 2.0));
        CheckBuilder iter("iterate_envelope_superlinear", 0.0, slack);
        CheckBuilder value("value_rate_superlinear", 0.0, slack);
        for (std::size_t i = 0; i < n; ++i) {
          const double power = std::pow(p - 1.0, s.k[i]);
          iter.add_excess(s.dist[i], std::pow(root * D0, power) / root);
          if (i + 1 < n)
            value.add_excess(s.gap[i + 1], std::pow(c, -p / (p - 2.0)) * std::pow(root * D0, p * power) / (p * bl));
        }
        rep.checks.push_back(iter.done());
        rep.checks.push_back(value.done());
      } else {
        rep.notes.push_back("initial distance exceeds the superlinear initialization radius; envelope checks skipped");
      }
      break;
    }
    case Regime::PIn12: {
      const double eta = constant("eta_p");
      const double r = constant("local_radius");
      std::optional<std::size_t> entry;
      for (std::size_t i = 0; i < n && !entry; ++i)
        if (s.dist[i] <= r) entry = i;
      if (!entry) {
        rep.notes.push_back("iterates never entered the local ball; local checks skipped");
        break;
      }
      rep.constants["local_entry_k"] = s.k[*entry];
      const int k_bar = s.k[*entry];
      CheckBuilder ratio("local_linear_ratio", eta, slack);
      CheckBuilder value("value_rate_local", 0.0, slack);
      for (std::size_t i = *entry; i + 1 < n; ++i) {
        if (s.dist[i] > kDistanceFloor) ratio.add(s.dist[i + 1], eta * s.dist[i], s.dist[i + 1] / s.dist[i]);
        value.add_excess(s.gap[i + 1], std::pow(eta, p * (s.k[i] - k_bar)) * std::pow(D0, p) / (p * bl));
      }
      rep.checks.push_back(ratio.done());
      rep.checks.push_back(value.done());
      break;
    }
    case Regime::GammaZero: {
      const double C = constant("envelope_constant");
      const double e = constant("envelope_exponent");
      CheckBuilder env("sublinear_value_envelope", C, slack);
      for (std::size_t i = 0; i < n; ++i) {
        if (s.k[i] < 1) continue;
        const double kk = static_cast<double>(s.k[i]);
        env.add(s.gap[i], C / std::pow(kk, e), s.gap[i] * std::pow(kk, e));
      }
      rep.checks.push_back(env.done());
      break;
    }
  }

  if (ctx.eps) {
    if (auto it = rep.constants.find("iterate_complexity"); it != rep.constants.end()) {
      rep.iterate_complexity = static_cast<long long>(it->second);
      complexity_check(rep, "iterate_complexity", s, s.dist, *ctx.eps, *rep.iterate_complexity);
    }
    if (auto it = rep.constants.find("value_complexity"); it != rep.constants.end()) {
      rep.value_complexity = static_cast<long long>(it->second);
      // The γ=0 count targets gap ≤ ε; the others target gap < ε.
      const double target = rep.regime == Regime::GammaZero ? std::nextafter(*ctx.eps, INFINITY) : *ctx.eps;
      complexity_check(rep, "value_complexity", s, s.gap, target, *rep.value_complexity);
    }
  }
  return rep;
}

RateReport check_rate_bounds(const RunTrace& trace, const ObjectiveOracle& oracle, const QuasarCertificate& cert,
                             const RateContext& ctx) {
  if (!oracle.min_value && !oracle.minimizer) fail(ErrorCode::MissingMinimizer, "rate checks need h*");
  const double h_star = oracle.min_value.value_or(oracle.value(*oracle.minimizer));
  return check_rate_bounds(series_from_trace(trace, cert.center, h_star), cert, ctx);
}

std::string to_json(const RateReport& rep) {
  using nlohmann::json;
  auto number = [](double v) -> json { return std::isfinite(v) ? json(v) : json(nullptr); };
  json j;
  j["regime"] = regime_name(rep.regime);
  j["fitted"] = {{"linear_ratio", number(rep.fitted.linear_ratio)},
                 {"superlinear_order", number(rep.fitted.superlinear_order)},
                 {"sublinear_exponent", number(rep.fitted.sublinear_exponent)}};
  json checks = json::array();
  for (const auto& c : rep.checks)
    checks.push_back({{"theorem_id", c.id},
                      {"bound_value", number(c.bound)},
                      {"worst_observed", number(c.worst_observed)},
                      {"tolerance", number(c.tolerance)},
                      {"slack", number(c.slack())},
                      {"pass", c.pass}});
  j["theorem_checks"] = checks;
  j["predicted_N"] = {
      {"iterate_complexity", rep.iterate_complexity ? json(*rep.iterate_complexity) : json(nullptr)},
      {"value_complexity", rep.value_complexity ? json(*rep.value_complexity) : json(nullptr)}};
  json constants = json::object();
  for (const auto& [k, v] : rep.constants) constants[k] = number(v);
  j["constants"] = constants;
  j["notes"] = rep.notes;
  j["all_pass"] = rep.all_pass();
  return j.dump(2);
}

}  // namespace hippa
