#pragma once

#include "hippa/algorithm.hpp"
#include "hippa/baselines.hpp"
#include "hippa/functions.hpp"
#include "hippa/rates.hpp"

#include <filesystem>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace hippa {

struct Stopping {
  double eps_step = 1e-8;
  std::optional<double> rel_err_tol;
  int max_iters = 2000;
};

struct HippaMethod {
  std::string label;
  HippaConfig config;
};

struct BaselineMethodSpec {
  std::string label;
  BaselineConfig config;
};

using MethodSpec = std::variant<HippaMethod, BaselineMethodSpec>;

struct ExperimentConfig {
  std::string entry_id;
  ZooOptions entry_options;
  std::vector<MethodSpec> methods;
  std::vector<std::uint64_t> seeds{0};
  Stopping stopping;
  std::filesystem::path output_dir = "out";
  // Projects iterates of every method onto the certificate region when one is declared.
  bool project = true;
  std::optional<double> rate_radius;
  std::optional<double> rate_eps;
};

// Method labels must be unique; stopping fields in a method object override the shared ones.
ExperimentConfig parse_experiment(const std::string& json_text);
ExperimentConfig load_experiment(const std::filesystem::path& path);
// A single "hippa" method object; the "method" key may be omitted.
HippaConfig parse_hippa_config(const std::string& json_text);

struct SummaryRow {
  std::string method;
  int iteration_to_stop = 0;
  double time_s = 0.0;
  std::optional<double> relative_error;
  double objective_value = 0.0;
};

struct ExperimentResult {
  std::vector<std::filesystem::path> artifacts;
  std::vector<SummaryRow> summary;
  std::vector<std::pair<std::string, RunTrace>> traces;  // label with seed suffix
  bool all_checks_pass = true;
};

// Output directory is taken from HIPPA_OUTPUT_DIR when set.
ExperimentResult run_experiment(const ExperimentConfig& cfg);

void write_trace_csv(const RunTrace& trace, const std::filesystem::path& path);
RateSeries read_trace_csv(const std::filesystem::path& path, double h_star = 0.0);
QuasarCertificate parse_certificate_json(const std::string& json_text);
std::string certificate_json(const QuasarCertificate& cert);

}  // namespace hippa
