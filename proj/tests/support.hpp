#pragma once

#include "hippa/core.hpp"
#include "hippa/quasar.hpp"

#include <cmath>
#include <random>

namespace testing_support {

using hippa::Vector;

inline hippa::ObjectiveOracle squared_norm(Eigen::Index n) {
  hippa::ObjectiveOracle o;
  o.dim = n;
  o.value_fn = [](const Vector& x) { return x.squaredNorm(); };
  o.subgrad_fn = [](const Vector& x) -> Vector { return 2.0 * x; };
  o.minimizer = Vector::Zero(n);
  o.min_value = 0.0;
  return o;
}

inline hippa::QuasarCertificate squared_norm_cert(Eigen::Index n) {
  return {1.0, 2.0, Vector::Zero(n), hippa::RegionWhole{}};
}

inline Vector vec(std::initializer_list<double> xs) {
  Vector v(static_cast<Eigen::Index>(xs.size()));
  Eigen::Index i = 0;
  for (double x : xs) v[i++] = x;
  return v;
}

// Hand-rolled generator for property tests: fixed seed per call site.
struct Gen {
  std::mt19937_64 rng;
  explicit Gen(std::uint64_t seed) : rng(seed) {}
  double uniform(double lo, double hi) { return std::uniform_real_distribution<double>(lo, hi)(rng); }
  Vector gaussian(Eigen::Index n, double scale = 1.0) {
    std::normal_distribution<double> d(0.0, scale);
    Vector v(n);
    for (Eigen::Index i = 0; i < n; ++i) v[i] = d(rng);
    return v;
  }
};

// Argmin over a uniform grid of the one-dimensional prox model.
inline double grid_prox(const hippa::ObjectiveOracle& o, double x, double p, double beta, double lo, double hi,
                        long points) {
  double best = lo, best_val = INFINITY;
  for (long i = 0; i < points; ++i) {
    const double y = lo + (hi - lo) * static_cast<double>(i) / static_cast<double>(points - 1);
    Vector v(1);
    v[0] = y;
    const double val = o.value_fn(v) + std::pow(std::abs(x - y), p) / (p * beta);
    if (val < best_val) {
      best_val = val;
      best = y;
    }
  }
  return best;
}

}  // namespace testing_support
