#include "hippa/functions.hpp"
#include "hippa/hope.hpp"
#include "support.hpp"

#include <doctest.h>

using namespace hippa;
using namespace testing_support;

namespace {

ProxConfig prox(double p, double beta) {
  ProxConfig c;
  c.p = p;
  c.beta = beta;
  c.inner_tol = 1e-12;
  return c;
}

}  // namespace

TEST_CASE("closed-form prox points") {
  const auto sq = make_square().oracle;
  const auto abs = make_abs_value().oracle;
  CHECK(hope_solve(sq, vec({2}), prox(2, 1)).y[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(hope_solve(abs, vec({3}), prox(2, 1)).y[0] == doctest::Approx(2.0).epsilon(1e-8));
  CHECK(hope_solve(sq, vec({1}), prox(3, 1)).y[0] == doctest::Approx(2.0 - std::sqrt(3.0)).epsilon(1e-8));
  // Stationarity 2y = (1−y)² gives the root above; cross-check by grid.
  CHECK(std::abs(grid_prox(sq, 1.0, 3, 1, -3, 3, 1000001) - (2.0 - std::sqrt(3.0))) <= 1e-5);
  CHECK(std::abs(grid_prox(sq, 2.0, 2, 1, -3, 3, 1000001) - 2.0 / 3.0) <= 1e-5);
}

TEST_CASE("prox matches grid brute force on one-dimensional entries") {
  // The models are nonconvex; global prox points need starts spread over the ball that contains them.
  for (const auto& e : {make_abs_value(), make_square(), make_spiky_slice()}) {
    for (double p : {1.5, 2.0, 3.0}) {
      for (double x : {-2.5, -0.6, 0.05, 0.4, 1.3, 3.0}) {
        CAPTURE(e.id);
        CAPTURE(p);
        CAPTURE(x);
        ProxConfig cfg = prox(p, 1.0);
        cfg.multistart = 2000;
        const double y = hope_solve(e.oracle, vec({x}), cfg).y[0];
        const double brute = grid_prox(e.oracle, x, p, 1.0, -4.0, 4.0, 1000000);
        CHECK(std::abs(y - brute) <= 1e-3);
      }
    }
  }
}

TEST_CASE("minimizer is a fixed point of the prox map") {
  for (const auto& id : {"spiky", "dist_disk", "dist_cross", "star_flower", "abs", "square", "spiky_slice"}) {
    const auto e = make_zoo_entry(id);
    REQUIRE(e.oracle.minimizer);
    for (double p : {1.5, 2.0, 3.0}) {
      CAPTURE(id);
      CAPTURE(p);
      const auto r = hope_solve(e.oracle, *e.oracle.minimizer, prox(p, 1.0));
      CHECK((r.y - *e.oracle.minimizer).norm() <= 1e-10);
    }
  }
}

// Property: anchor dominance and the descent chain at random anchors.
TEST_CASE("prox model never exceeds the anchor and descends strictly when moving") {
  Gen gen(23);
  for (const auto& id : {"spiky", "dist_disk", "dist_cross", "star_flower"}) {
    const auto e = make_zoo_entry(id);
    for (double p : {1.5, 2.0, 3.0}) {
      for (int i = 0; i < 20; ++i) {
        CAPTURE(id);
        CAPTURE(p);
        const Vector x = gen.gaussian(2, 2.0);
        const auto r = hope_solve(e.oracle, x, prox(p, gen.uniform(0.2, 2.0)));
        const double hx = e.oracle.value(x);
        CHECK(r.model_value <= hx + 1e-12);
        const double hy = e.oracle.value(r.y);
        CHECK(hy <= hx + 1e-12);
        if ((r.y - x).norm() > 1e-9) CHECK(hy < hx);
      }
    }
  }
}

TEST_CASE("prox model value and configuration checks") {
  const auto sq = make_square().oracle;
  CHECK(prox_model_value(sq, vec({2}), vec({1}), 2, 1) == doctest::Approx(1.0 + 0.5));
  CHECK(prox_model_value(sq, vec({2}), vec({1}), 3, 2) == doctest::Approx(1.0 + 1.0 / 6.0));
  ProxConfig bad = prox(1.0, 1.0);
  CHECK_THROWS_AS(validate_prox_config(bad), Error);
  bad = prox(2.0, 0.0);
  CHECK_THROWS_AS(validate_prox_config(bad), Error);
  CHECK_THROWS_AS(hope_solve(sq, vec({NAN}), prox(2, 1)), Error);
}

TEST_CASE("local minimizer reaches a quadratic's optimum") {
  const auto f = [](const Vector& y) { return (y - vec({1, -2})).squaredNorm() + 0.5 * y[0] * y[0]; };
  const auto g = [](const Vector& y) -> Vector {
    Vector out = 2.0 * (y - vec({1, -2}));
    out[0] += y[0];
    return out;
  };
  const auto r = minimize_local(f, g, vec({5, 5}), 1e-12, 500);
  CHECK(r.converged);
  CHECK(r.y[0] == doctest::Approx(2.0 / 3.0).epsilon(1e-8));
  CHECK(r.y[1] == doctest::Approx(-2.0).epsilon(1e-8));
}
