#include "hippa/algorithm.hpp"
#include "hippa/functions.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace hippa;
using namespace testing_support;

namespace {

HippaConfig config(double p, double beta, double eps_step = 1e-10, int max_iters = 500) {
  HippaConfig c;
  c.prox.p = p;
  c.prox.inner_tol = 1e-13;
  c.beta = BetaSchedule::constant(beta);
  c.eps_step = eps_step;
  c.max_iters = max_iters;
  return c;
}

void check_invariants(const RunTrace& t, const ObjectiveOracle& o, const QuasarCertificate& cert, double p,
                      double beta_upper) {
  const double slack = 1e-8 + 10 * 1e-13;
  double summed = 0.0;
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    const auto& a = t.records[i];
    const auto& b = t.records[i + 1];
    CHECK(b.value <= a.value + slack);
    CHECK((b.x - cert.center).norm() <= (a.x - cert.center).norm() + slack);
    summed += std::pow(a.step_norm, p);
  }
  CHECK(summed <= p * beta_upper * (t.records.front().value - *o.min_value) + slack);
}

}  // namespace

TEST_CASE("squared norm follows the closed-form recursion") {
  const auto sq = squared_norm(2);
  const Vector x0 = vec({1, 1});
  const RunTrace t = run_hippa(sq, x0, config(2, 1, 1e-300, 10));
  REQUIRE(t.records.size() == 11);
  for (const auto& r : t.records) {
    const Vector expected = x0 / std::pow(3.0, r.k);
    CHECK((r.x - expected).norm() <= 1e-10 * std::pow(3.0, -r.k) + 1e-15);
  }
  // 3^-10 ≈ 1.69e-5 of the initial norm after ten steps.
  CHECK(t.records.back().x.norm() / x0.norm() == doctest::Approx(std::pow(3.0, -10)).epsilon(1e-8));
  CHECK(t.terminated_by == Termination::MaxIters);
}

TEST_CASE("starting at the minimizer stops immediately") {
  for (const auto& id : {"spiky", "dist_disk", "star_flower"}) {
    const auto e = make_zoo_entry(id);
    const RunTrace t = run_hippa(e.oracle, *e.oracle.minimizer, config(2, 1));
    CHECK(t.records.size() == 1);
    CHECK(t.records.front().k == 0);
    CHECK(t.terminated_by == Termination::StepTol);
  }
}

TEST_CASE("spiky norm with p = 3 obeys the superlinear step bound") {
  const auto e = make_spiky_norm();
  const double c = (2 - 0.5) / (1.0 * 0.5 * 1.0);
  CHECK(c == doctest::Approx(3.0));
  const RunTrace t = run_hippa(e.oracle, vec({0.5, 0}), config(3, 1));
  REQUIRE(t.records.size() >= 2);
  for (std::size_t i = 0; i + 1 < t.records.size(); ++i) {
    const double d0 = t.records[i].x.norm(), d1 = t.records[i + 1].x.norm();
    CHECK(d1 <= c * d0 * d0 + 1e-12);
  }
}

TEST_CASE("iteration bound examples") {
  CHECK(iteration_bound(2, 1, 1, 0, 0.1) == 200);
  CHECK(iteration_bound(2, 1, 0, 0, 0.1) == 0);
  CHECK(iteration_bound(3, 2, 1, 0, 0.5) == 48);
  CHECK(iteration_bound(2, 1, 1, 0, 1e-200) == std::numeric_limits<long long>::max());
  CHECK_THROWS_AS(iteration_bound(2, 1, 0, 1, 0.1), Error);
  CHECK_THROWS_AS(iteration_bound(1, 1, 1, 0, 0.1), Error);
}

// Property: descent, Fejér monotonicity, summability, stopping validity and value convergence on zoo runs.
TEST_CASE("outer-loop invariants on deterministic zoo runs") {
  Gen gen(29);
  for (const auto& id : {"spiky", "dist_disk", "dist_cross", "star_flower"}) {
    const auto e = make_zoo_entry(id);
    for (double p : {1.5, 2.0, 3.0}) {
      for (int trial = 0; trial < 3; ++trial) {
        CAPTURE(id);
        CAPTURE(p);
        const Vector x0 = trial == 0 ? e.start(0) : Vector(*e.oracle.minimizer + gen.gaussian(2, 1.5));
        const double beta = gen.uniform(0.3, 2.0);
        const RunTrace t = run_hippa(e.oracle, x0, config(p, beta, 1e-8, 2000));
        check_invariants(t, e.oracle, *e.certificate, p, beta);
        if (t.terminated_by == Termination::StepTol) {
          const long long bound = iteration_bound(p, beta, t.records.front().value, *e.oracle.min_value, 1e-8);
          CHECK(t.records.back().k <= bound);
        }
        CHECK(t.records.back().value - *e.oracle.min_value <= 1e-6);
      }
    }
  }
}

TEST_CASE("beta schedules") {
  const auto g = BetaSchedule::geometric(0.5, 2.0, 3.0);
  CHECK(g.at(0) == 0.5);
  CHECK(g.at(1) == 1.0);
  CHECK(g.at(5) == 3.0);
  CHECK(g.lower() == 0.5);
  CHECK(g.upper() == 3.0);
  const auto c = BetaSchedule::constant(0.8);
  CHECK(c.at(10) == 0.8);
  HippaConfig bad = config(2, 1);
  bad.beta = BetaSchedule::geometric(2.0, 1.0, 1.0);
  CHECK_THROWS_AS(validate_hippa_config(bad), Error);
  bad = config(2, 1);
  bad.eps_step = -1;
  CHECK_THROWS_AS(validate_hippa_config(bad), Error);
}

TEST_CASE("relative-error stopping and projection") {
  const auto e = make_dist_power(DistShape::Disk, 0.5);
  HippaConfig c = config(2, 0.2);
  c.region = RegionBall{Vector::Zero(2), 2.5};
  const RunTrace t = run_hippa(e.oracle, vec({3, 0}), c);
  for (std::size_t i = 1; i < t.records.size(); ++i) CHECK(region_violation(c.region, t.records[i].x) <= 1e-8);
  CHECK(t.metadata.at("projection") == "ball_exact");

  const auto sq = squared_norm(2);
  HippaConfig r = config(2, 1);
  r.eps_rel = 1e-3;
  ObjectiveOracle shifted = translate_oracle(sq, vec({-1, 0}));
  const RunTrace s = run_hippa(shifted, vec({3, 0}), r);
  CHECK(s.terminated_by == Termination::RelErrTol);
  CHECK(*s.records.back().rel_err < 1e-3);
  CHECK(*s.records[s.records.size() - 2].rel_err >= 1e-3);
}

TEST_CASE("runs are reproducible and carry a config digest") {
  const auto e = make_spiky_norm();
  const auto a = run_hippa(e.oracle, e.start(0), config(2, 0.5));
  const auto b = run_hippa(e.oracle, e.start(0), config(2, 0.5));
  REQUIRE(a.records.size() == b.records.size());
  for (std::size_t i = 0; i < a.records.size(); ++i) CHECK(a.records[i].x == b.records[i].x);
  CHECK(a.config_digest == b.config_digest);
  CHECK(a.config_digest != run_hippa(e.oracle, e.start(0), config(2, 0.6)).config_digest);
}
