#pragma once

#include "hippa/core.hpp"

#include <optional>
#include <string>

namespace hippa {

enum class BaselineMethod { Pgd, Psgd, Psg, Pssg };
enum class StepRule { Constant, InvSqrtK };

const char* baseline_name(BaselineMethod m);
BaselineMethod parse_baseline(const std::string& name);

struct BaselineConfig {
  BaselineMethod method = BaselineMethod::Pgd;
  double step0 = 0.12;
  StepRule step_rule = StepRule::Constant;
  int batch = 0;  // 0 selects the oracle's default batch for the method
  int max_iters = 2000;
  std::optional<double> rel_err_tol;
  double eps_step = 0.0;
  RegionDescriptor region = RegionWhole{};
  std::uint64_t seed = 0;

  static BaselineConfig defaults(BaselineMethod m);
};

RunTrace run_baseline(const ObjectiveOracle& oracle, const Vector& x0, const BaselineConfig& cfg);

struct ProjectionStats {
  int sweeps = 0;
  bool used_dykstra = false;
};

Vector project_region(const Vector& x, const RegionDescriptor& region, ProjectionStats* stats = nullptr);

}  // namespace hippa
