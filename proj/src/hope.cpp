#include "hippa/hope.hpp"

#include <gsl/gsl_errno.h>
#include <gsl/gsl_min.h>

#include <cmath>
#include <deque>
#include <limits>

namespace hippa {

namespace {

constexpr double kArmijo = 1e-4;
constexpr double kBacktrack = 0.5;
constexpr int kGradientPhase = 20;
constexpr int kMemory = 10;
constexpr double kAnchorRadius = 1e-14;
constexpr double kSmoothingFloor = 1e-8;

Vector lbfgs_direction(const Vector& g, const std::deque<Vector>& s_hist, const std::deque<Vector>& y_hist) {
  const std::size_t m = s_hist.size();
  std::vector<double> alpha(m), rho(m);
  Vector q = -g;
  for (std::size_t i = m; i-- > 0;) {
    rho[i] = 1.0 / y_hist[i].dot(s_hist[i]);
    alpha[i] = rho[i] * s_hist[i].dot(q);
    q -= alpha[i] * y_hist[i];
  }
  if (m > 0) q *= s_hist.back().dot(y_hist.back()) / y_hist.back().squaredNorm();
  for (std::size_t i = 0; i < m; ++i) {
    double b = rho[i] * y_hist[i].dot(q);
    q += (alpha[i] - b) * s_hist[i];
  }
  return q;
}

}  // namespace

LocalSolveResult minimize_local(const std::function<double(const Vector&)>& f,
                                const std::function<Vector(const Vector&)>& grad, const Vector& y0, double tol,
                                int max_iters) {
  LocalSolveResult out;
  Vector y = y0;
  double fy = f(y);
  if (!std::isfinite(fy)) fail(ErrorCode::NonFiniteObjective, "model is not finite at the start point");
  Vector g = grad(y);
  std::deque<Vector> s_hist, y_hist;
  Vector last_s, last_dg;

  int it = 0;
  for (; it < max_iters; ++it) {
    if (!g.allFinite()) break;
    if (g.norm() <= tol) {
      out.converged = true;
      break;
    }
    Vector d;
    double t;
    if (it < kGradientPhase || s_hist.empty()) {
      d = -g;
      // Barzilai-Borwein trial step once a curvature pair exists.
      t = (last_s.size() > 0 && last_s.dot(last_dg) > 0.0) ? last_s.squaredNorm() / last_s.dot(last_dg)
                                                           : std::min(1.0, 1.0 / g.norm());
    } else {
      d = lbfgs_direction(g, s_hist, y_hist);
      t = 1.0;
      if (!(g.dot(d) < 0.0)) {
        s_hist.clear();
        y_hist.clear();
        d = -g;
        t = std::min(1.0, 1.0 / g.norm());
      }
    }
    const double slope = g.dot(d);
    Vector y_new;
    double f_new = std::numeric_limits<double>::infinity();
    bool accepted = false;
    for (int tries = 0; tries < 80; ++tries) {
      y_new = y + t * d;
      f_new = f(y_new);
      if (std::isfinite(f_new) && f_new <= fy + kArmijo * t * slope) {
        accepted = true;
        break;
      }
      t *= kBacktrack;
    }
    if (!accepted) {
      // No representable decrease along a descent direction: numerically stationary.
      out.converged = true;
      break;
    }
    Vector g_new = grad(y_new);
    last_s = y_new - y;
    last_dg = g_new - g;
    if (last_s.dot(last_dg) > 1e-16 * last_s.norm() * last_dg.norm()) {
      s_hist.push_back(last_s);
      y_hist.push_back(last_dg);
      if (static_cast<int>(s_hist.size()) > kMemory) {
        s_hist.pop_front();
        y_hist.pop_front();
      }
    }
    const double decrease = fy - f_new;
    y = std::move(y_new);
    fy = f_new;
    g = std::move(g_new);
    if (decrease <= tol * tol) {
      ++it;
      out.converged = true;
      break;
    }
  }
  out.y = std::move(y);
  out.value = fy;
  out.iters = it;
  return out;
}

void validate_prox_config(const ProxConfig& cfg) {
  if (!(cfg.p > 1.0)) fail(ErrorCode::BadParameter, "prox order p must exceed 1");
  if (!(cfg.beta > 0.0)) fail(ErrorCode::BadParameter, "prox parameter beta must be positive");
  if (!(cfg.inner_tol > 0.0)) fail(ErrorCode::BadParameter, "inner tolerance must be positive");
  if (cfg.inner_max_iters < 1) fail(ErrorCode::BadParameter, "inner iteration budget must be at least 1");
  if (!(cfg.smoothing_mu >= 0.0)) fail(ErrorCode::BadParameter, "smoothing width must be nonnegative");
  if (!(cfg.smoothing_shrink > 0.0 && cfg.smoothing_shrink < 1.0))
    fail(ErrorCode::BadParameter, "smoothing shrink factor must lie in (0,1)");
  if (cfg.multistart < 0) fail(ErrorCode::BadParameter, "multistart count must be nonnegative");
}

double prox_model_value(const ObjectiveOracle& oracle, const Vector& x, const Vector& y, double p, double beta) {
  return oracle.value_fn(y) + std::pow((x - y).norm(), p) / (p * beta);
}

ObjectiveOracle smooth_surrogate(const ObjectiveOracle& oracle, double mu) {
  if (!oracle.atoms) fail(ErrorCode::UnsupportedAtom, "objective has no atom declaration");
  if (!(mu > 0.0)) fail(ErrorCode::BadParameter, "smoothing width must be positive");
  ObjectiveOracle s = make_atomic_oracle(oracle.atoms, mu);
  s.minimizer = oracle.minimizer;
  if (s.minimizer) s.min_value = s.value_fn(*s.minimizer);
  return s;
}

namespace {

LocalSolveResult solve_from(const ObjectiveOracle& oracle, const Vector& x, const Vector& start,
                            const ProxConfig& cfg, bool& all_converged) {
  const double p = cfg.p, beta = cfg.beta;
  auto solve_with = [&](const ObjectiveOracle& h, const Vector& y0) {
    auto f = [&](const Vector& y) { return h.value_fn(y) + std::pow((y - x).norm(), p) / (p * beta); };
    auto grad = [&](const Vector& y) -> Vector {
      Vector gh = h.subgrad_fn(y);
      Vector r = y - x;
      double n = r.norm();
      if (n >= kAnchorRadius) gh += std::pow(n, p - 2.0) / beta * r;
      return gh;
    };
    return minimize_local(f, grad, y0, cfg.inner_tol, cfg.inner_max_iters);
  };

  if (cfg.smoothing_mu > 0.0) {
    LocalSolveResult res;
    res.y = start;
    int total = 0;
    for (double mu = cfg.smoothing_mu;; mu *= cfg.smoothing_shrink) {
      ObjectiveOracle h = smooth_surrogate(oracle, mu);
      LocalSolveResult stage = solve_with(h, res.y);
      total += stage.iters;
      all_converged = all_converged && stage.converged;
      res = std::move(stage);
      if (mu <= kSmoothingFloor) break;
    }
    res.iters = total;
    return res;
  }
  if (!oracle.has_subgradient()) fail(ErrorCode::MissingSubgradient, "prox solve needs a subgradient selection");
  LocalSolveResult res = solve_with(oracle, start);
  all_converged = all_converged && res.converged;
  return res;
}

std::vector<Vector> extra_starts(const ObjectiveOracle& oracle, const Vector& x, double hx, const ProxConfig& cfg) {
  std::vector<Vector> starts;
  if (cfg.multistart <= 0 || !oracle.min_value) return starts;
  // Any prox point y has ‖x−y‖^p ≤ pβ(h(x) − h*), so all minima lie in this ball.
  const double gap = hx - *oracle.min_value;
  if (!(gap > 0.0)) return starts;
  const double radius = std::pow(cfg.p * cfg.beta * gap, 1.0 / cfg.p);
  const int m = cfg.multistart;
  if (x.size() == 1) {
    for (int i = 0; i < m; ++i) {
      Vector s = x;
      s[0] += radius * (-1.0 + 2.0 * (i + 0.5) / m);
      starts.push_back(s);
    }
    return starts;
  }
  std::mt19937_64 rng = SeedStream{cfg.multistart_seed, 7}.engine();
  std::normal_distribution<double> gauss;
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int i = 0; i < m; ++i) {
    Vector d(x.size());
    for (Eigen::Index j = 0; j < d.size(); ++j) d[j] = gauss(rng);
    double r = radius * std::pow(unif(rng), 1.0 / static_cast<double>(x.size()));
    starts.push_back(x + r * d / d.norm());
  }
  return starts;
}

// Global search on a line: scan the containing interval, then Brent-polish the best bracket.
std::optional<Vector> scan_line(const ObjectiveOracle& oracle, const Vector& x, double hx, const ProxConfig& cfg) {
  if (x.size() != 1 || cfg.multistart <= 0 || !oracle.min_value) return std::nullopt;
  const double gap = hx - *oracle.min_value;
  if (!(gap > 0.0)) return std::nullopt;
  const double radius = std::pow(cfg.p * cfg.beta * gap, 1.0 / cfg.p);
  auto model = [&](double t) {
    Vector y(1);
    y[0] = t;
    return prox_model_value(oracle, x, y, cfg.p, cfg.beta);
  };
  const int n = std::max(cfg.multistart, 8);
  const double lo = x[0] - radius, h = 2.0 * radius / n;
  int best = 0;
  double best_val = model(lo);
  for (int i = 1; i <= n; ++i) {
    const double v = model(lo + i * h);
    if (v < best_val) {
      best_val = v;
      best = i;
    }
  }
  double t = lo + best * h;
  const double a = t - h, b = t + h;
  if (model(a) > best_val && model(b) > best_val) {
    struct Ctx {
      decltype(model)* f;
    } ctx{&model};
    gsl_function fn;
    fn.function = [](double u, void* c) { return (*static_cast<Ctx*>(c)->f)(u); };
    fn.params = &ctx;
    gsl_error_handler_t* old = gsl_set_error_handler_off();
    gsl_min_fminimizer* m = gsl_min_fminimizer_alloc(gsl_min_fminimizer_brent);
    if (gsl_min_fminimizer_set_with_values(m, &fn, t, best_val, a, model(a), b, model(b)) == GSL_SUCCESS) {
      for (int it = 0; it < 200; ++it) {
        if (gsl_min_fminimizer_iterate(m) != GSL_SUCCESS) break;
        if (gsl_min_test_interval(gsl_min_fminimizer_x_lower(m), gsl_min_fminimizer_x_upper(m), 1e-14, 0.0) ==
            GSL_SUCCESS)
          break;
      }
      if (gsl_min_fminimizer_f_minimum(m) <= best_val) t = gsl_min_fminimizer_x_minimum(m);
    }
    gsl_min_fminimizer_free(m);
    gsl_set_error_handler(old);
  }
  Vector y(1);
  y[0] = t;
  return y;
}

}  // namespace

ProxResult hope_solve(const ObjectiveOracle& oracle, const Vector& x, const ProxConfig& cfg) {
  validate_prox_config(cfg);
  require_finite(x, "hope_solve");
  const double hx = oracle.value_fn(x);
  if (!std::isfinite(hx)) fail(ErrorCode::NonFiniteObjective, "objective is not finite at the anchor");

  bool converged = true;
  LocalSolveResult best = solve_from(oracle, x, x, cfg, converged);
  double best_model = prox_model_value(oracle, x, best.y, cfg.p, cfg.beta);
  int iters = best.iters;
  for (const Vector& s : extra_starts(oracle, x, hx, cfg)) {
    bool c = true;
    LocalSolveResult r = solve_from(oracle, x, s, cfg, c);
    iters += r.iters;
    double m = prox_model_value(oracle, x, r.y, cfg.p, cfg.beta);
    if (m < best_model) {
      best_model = m;
      best = std::move(r);
      converged = c;
    }
  }

  if (auto y = scan_line(oracle, x, hx, cfg)) {
    const double m = prox_model_value(oracle, x, *y, cfg.p, cfg.beta);
    if (m < best_model) {
      best_model = m;
      best.y = std::move(*y);
    }
  }

  ProxResult out;
  out.inner_iters = iters;
  out.converged = converged;
  if (!std::isfinite(best_model) || best_model > hx) {
    // The anchor is always feasible; smoothing error can push a solution above it.
    out.y = x;
    out.model_value = hx;
  } else {
    out.y = std::move(best.y);
    out.model_value = best_model;
  }
  return out;
}

}  // namespace hippa
