#pragma once

#include "hippa/core.hpp"

namespace hippa {

struct ProxConfig {
  double p = 2.0;
  double beta = 1.0;
  double inner_tol = 1e-10;
  int inner_max_iters = 2000;
  double smoothing_mu = 0.0;
  double smoothing_shrink = 0.1;
  // Extra starts inside the ball that must contain every prox point; needs oracle.min_value. 0 = anchor only.
  // In one dimension this also sets the number of scan cells of a global line search.
  int multistart = 0;
  std::uint64_t multistart_seed = 0;
};

void validate_prox_config(const ProxConfig& cfg);

struct ProxResult {
  Vector y;
  double model_value = 0.0;
  int inner_iters = 0;
  bool converged = false;
};

double prox_model_value(const ObjectiveOracle& oracle, const Vector& x, const Vector& y, double p, double beta);

ProxResult hope_solve(const ObjectiveOracle& oracle, const Vector& x, const ProxConfig& cfg);

ObjectiveOracle smooth_surrogate(const ObjectiveOracle& oracle, double mu);

struct LocalSolveResult {
  Vector y;
  double value = 0.0;
  int iters = 0;
  bool converged = false;
};

// Gradient descent with Armijo backtracking, switching to limited-memory BFGS after 20 iterations.
LocalSolveResult minimize_local(const std::function<double(const Vector&)>& f,
                                const std::function<Vector(const Vector&)>& grad, const Vector& y0, double tol,
                                int max_iters);

}  // namespace hippa
