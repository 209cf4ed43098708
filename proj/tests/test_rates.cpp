#include "hippa/algorithm.hpp"
#include "hippa/functions.hpp"
#include "hippa/rates.hpp"
#include "support.hpp"

#include <doctest.h>
#include <json.hpp>

using namespace hippa;
using namespace testing_support;

namespace {

RateSeries series_of(const std::vector<double>& dist, const std::vector<double>& gap) {
  RateSeries s;
  for (std::size_t i = 0; i < dist.size(); ++i) {
    s.k.push_back(static_cast<int>(i));
    s.dist.push_back(dist[i]);
    s.gap.push_back(gap.empty() ? dist[i] * dist[i] : gap[i]);
    s.step.push_back(i + 1 < dist.size() ? std::abs(dist[i] - dist[i + 1]) : 0.0);
  }
  return s;
}

RateContext context(double p, double beta) {
  RateContext c;
  c.p = p;
  c.beta_lower = c.beta_upper = beta;
  c.inner_tol = 1e-13;
  return c;
}

HippaConfig config(double p, double beta, double eps_step, int max_iters) {
  HippaConfig c;
  c.prox.p = p;
  c.prox.inner_tol = 1e-13;
  c.beta = BetaSchedule::constant(beta);
  c.eps_step = eps_step;
  c.max_iters = max_iters;
  return c;
}

}  // namespace

TEST_CASE("fits on synthetic exact sequences") {
  std::vector<double> geo, quad, planted, sup;
  for (int k = 0; k < 20; ++k) geo.push_back(std::pow(3.0, -k));
  CHECK(fit_rates(series_of(geo, {})).linear_ratio == doctest::Approx(1.0 / 3.0).epsilon(1e-12));
  for (int k = 0; k < 8; ++k) quad.push_back(std::pow(0.5, std::pow(2.0, k)));
  CHECK(fit_rates(series_of(quad, {})).superlinear_order == doctest::Approx(2.0).epsilon(1e-9));
  for (int k = 0; k < 30; ++k) planted.push_back(5.0 * std::pow(0.7, k));
  CHECK(fit_rates(series_of(planted, {})).linear_ratio == doctest::Approx(0.7).epsilon(0.01));
  for (int k = 0; k < 10; ++k) sup.push_back(std::pow(0.6, std::pow(1.5, k)));
  CHECK(fit_rates(series_of(sup, {})).superlinear_order == doctest::Approx(1.5).epsilon(0.01));

  std::vector<double> dist, inv, root;
  for (int k = 0; k < 200; ++k) {
    dist.push_back(1.0 / (k + 1.0));
    inv.push_back(k == 0 ? 2.0 : 1.0 / k);
    root.push_back(k == 0 ? 4.0 : 3.0 / std::sqrt(static_cast<double>(k)));
  }
  CHECK(fit_rates(series_of(dist, inv)).sublinear_exponent == doctest::Approx(-1.0).epsilon(1e-9));
  CHECK(fit_rates(series_of(dist, root)).sublinear_exponent == doctest::Approx(-0.5).epsilon(0.01));
}

TEST_CASE("short traces cannot be fitted") {
  try {
    fit_rates(series_of({1.0, 0.1, 1e-13, 0.0}, {}));
    FAIL("expected InsufficientTrace");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::InsufficientTrace);
  }
}

TEST_CASE("theorem constants") {
  const auto cert = squared_norm_cert(2);
  auto p2 = context(2, 1);
  p2.eps = 1e-3;
  const auto b2 = theorem_bounds(cert, p2, 1.0);
  CHECK(b2.at("linear_ratio_bound") == doctest::Approx(1.0 / std::sqrt(5.0)));
  CHECK(b2.at("linear_ratio_bound") == doctest::Approx(0.4472).epsilon(1e-4));
  CHECK(b2.at("iterate_complexity") == 10.0);
  const auto b3 = theorem_bounds(cert, context(3, 1));
  CHECK(b3.at("superlinear_constant") == doctest::Approx(0.5));
  CHECK(b3.at("init_radius") == doctest::Approx(2.0));
  const QuasarCertificate flat{0.5, 0.0, Vector::Zero(2), RegionWhole{}};
  const auto bz = theorem_bounds(flat, context(2, 1), 2.0);
  CHECK(bz.at("envelope_constant") == doctest::Approx(4.0 / (2 * 0.5 * 1.0)));
  CHECK(bz.at("envelope_exponent") == doctest::Approx(1.0));  // gap ≤ constant·k^(−exponent)
}

TEST_CASE("p below two needs a local radius") {
  const auto cert = squared_norm_cert(2);
  try {
    theorem_bounds(cert, context(1.5, 1));
    FAIL("expected RadiusRequired");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::RadiusRequired);
  }
  auto ctx = context(1.5, 1);
  const double r_max = std::pow(kappa_p(1.5) / 4.0, 1.0 / 0.5);
  ctx.radius = r_max;
  const auto b = theorem_bounds(cert, ctx);
  CHECK(b.at("local_radius_max") == doctest::Approx(r_max));
  CHECK(b.at("eta_p") == doctest::Approx(std::pow(3.0 / (kappa_p(1.5) * std::pow(r_max, -0.5)), 2.0)));
  ctx.radius = 2 * r_max;
  CHECK_THROWS_AS(theorem_bounds(cert, ctx), Error);
}

TEST_CASE("quadratic trace passes the linear-rate checks with the expected slack") {
  const auto sq = squared_norm(2);
  const RunTrace t = run_hippa(sq, vec({1, 0}), config(2, 1, 1e-12, 200));
  auto ctx = context(2, 1);
  ctx.eps = 1e-3;
  const RateReport r = check_rate_bounds(t, sq, squared_norm_cert(2), ctx);
  CHECK(r.regime == Regime::PEq2);
  CHECK(r.all_pass());
  const TheoremCheck* lin = r.find("linear_ratio_p2");
  REQUIRE(lin);
  CHECK(lin->worst_observed == doctest::Approx(1.0 / 3.0).epsilon(1e-9));
  CHECK(lin->slack() == doctest::Approx(1.0 / std::sqrt(5.0) - 1.0 / 3.0).epsilon(1e-6));
  CHECK(r.fitted.linear_ratio <= lin->bound);
  REQUIRE(r.iterate_complexity);
  CHECK(*r.iterate_complexity == 10);
  const auto j = nlohmann::json::parse(to_json(r));
  CHECK(j.at("regime") == "p_eq_2");
  CHECK(j.at("all_pass") == true);
  for (const auto& c : j.at("theorem_checks"))
    for (const char* key : {"theorem_id", "bound_value", "worst_observed", "tolerance", "slack", "pass"})
      CHECK(c.contains(key));
}

TEST_CASE("fixed-point trace passes vacuously") {
  const auto sq = squared_norm(2);
  const RunTrace t = run_hippa(sq, Vector::Zero(2), config(2, 1, 1e-12, 10));
  const RateReport r = check_rate_bounds(t, sq, squared_norm_cert(2), context(2, 1));
  CHECK(r.all_pass());
}

TEST_CASE("disk distance with p = 2 stays below the sublinear envelope") {
  const auto e = make_dist_power(DistShape::Disk, 0.5);
  const RunTrace t = run_hippa(e.oracle, vec({3, 0}), config(2, 0.1, 1e-12, 300));
  const RateReport r = check_rate_bounds(t, e.oracle, *e.certificate, context(2, 0.1));
  CHECK(r.regime == Regime::GammaZero);
  const TheoremCheck* env = r.find("sublinear_value_envelope");
  REQUIRE(env);
  CHECK(env->pass);
  // Independent restatement: gap_k ≤ D²/(2κβ′k).
  const double D = 2.0;
  for (const auto& rec : t.records)
    if (rec.k >= 1) CHECK(rec.value <= D * D / (2 * 0.5 * 0.1 * rec.k) + 1e-10);
}

TEST_CASE("checks flag a trace that breaks the bounds") {
  std::vector<double> slow;
  for (int k = 0; k < 20; ++k) slow.push_back(std::pow(0.9, k));
  const RateReport r = check_rate_bounds(series_of(slow, {}), squared_norm_cert(2), context(2, 1));
  CHECK_FALSE(r.all_pass());
  CHECK_FALSE(r.find("linear_ratio_p2")->pass);
  std::vector<double> bumpy{1.0, 0.5, 0.6, 0.1, 0.05, 0.01};
  CHECK_FALSE(check_rate_bounds(series_of(bumpy, {}), squared_norm_cert(2), context(2, 1)).find("fejer_monotone")->pass);
}

TEST_CASE("regimes") {
  CHECK(regime_of(0.0, 3.0) == Regime::GammaZero);
  CHECK(regime_of(1.0, 1.5) == Regime::PIn12);
  CHECK(regime_of(1.0, 2.0) == Regime::PEq2);
  CHECK(regime_of(1.0, 3.0) == Regime::PGt2);
  CHECK(std::string(regime_name(Regime::PGt2)) == "p_gt_2");
}
