#pragma once

#include "hippa/core.hpp"
#include "hippa/hope.hpp"

#include <optional>

namespace hippa {

// β_k = min(β′·ρᵏ, β″); ρ = 1 gives the constant schedule β′ = β″.
struct BetaSchedule {
  double initial = 1.0;
  double growth = 1.0;
  double cap = 1.0;

  static BetaSchedule constant(double beta) { return {beta, 1.0, beta}; }
  static BetaSchedule geometric(double beta0, double rho, double cap) { return {beta0, rho, cap}; }
  double at(int k) const;
  double lower() const;
  double upper() const;
};

struct HippaConfig {
  ProxConfig prox;
  BetaSchedule beta = BetaSchedule::constant(1.0);
  double eps_step = 1e-8;
  std::optional<double> eps_rel;
  int max_iters = 1000;
  // Iterates are projected after each step when a region is set (experiment protocol).
  RegionDescriptor region = RegionWhole{};
  std::uint64_t seed = 0;
};

void validate_hippa_config(const HippaConfig& cfg);
std::string describe(const HippaConfig& cfg);

RunTrace run_hippa(const ObjectiveOracle& oracle, const Vector& x0, const HippaConfig& cfg);

long long iteration_bound(double p, double beta_upper, double h0, double h_star, double eps);

// Value and distance bookkeeping shared by every iterative method.
TraceRecord make_record(const ObjectiveOracle& oracle, int k, const Vector& x, std::uint64_t seed);

}  // namespace hippa
