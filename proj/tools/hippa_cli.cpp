#include "hippa/hippa.h"

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

namespace {

int report_error(hippa_status status) {
  std::cerr << "error: " << hippa_status_name(status) << ": " << hippa_last_error() << '\n';
  return 1;
}

void print_and_free(char* text) {
  std::cout << text << '\n';
  hippa_string_free(text);
}

std::optional<std::string> read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return std::nullopt;
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// Turns repeated key=value pairs into a flat numeric JSON object.
std::optional<std::string> options_json(const std::vector<std::string>& pairs) {
  nlohmann::json j = nlohmann::json::object();
  for (const auto& kv : pairs) {
    const auto eq = kv.find('=');
    if (eq == std::string::npos) return std::nullopt;
    try {
      j[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    } catch (const std::exception&) {
      return std::nullopt;
    }
  }
  return j.dump();
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"HiPPA benchmark runner and quasar-convexity checker"};
  app.set_version_flag("--version", std::string(hippa_version()));
  app.require_subcommand(1);

  std::string config_path;
  auto* run = app.add_subcommand("run", "Run an experiment file and write traces, reports and a summary");
  run->add_option("config", config_path, "Experiment JSON file")->required();

  auto* list = app.add_subcommand("list-zoo", "List objective ids");

  std::string entry_id, property = "definition";
  std::vector<std::string> entry_options;
  int samples = 1000;
  std::uint64_t seed = 0;
  double tolerance = 1e-8;
  auto* verify = app.add_subcommand("verify", "Check an entry's certificate and refute its negative claims");
  verify->add_option("entry", entry_id, "Zoo entry id")->required();
  verify->add_option("--property", property, "definition, first_order, quadratic_growth, pl, error_bound_value, error_bound_subgrad");
  verify->add_option("--samples", samples, "Number of sample points");
  verify->add_option("--seed", seed, "Sampler seed");
  verify->add_option("--tolerance", tolerance, "Allowed violation");
  verify->add_option("--option", entry_options, "Entry option as key=value (repeatable)");

  std::string trace_path, cert_path;
  double p = 2.0, beta = 1.0, h_star = 0.0, inner_tol = 1e-10;
  std::optional<double> beta_upper, radius, eps, eps_step;
  auto* rates = app.add_subcommand("rates", "Check a trace CSV against the rate and complexity bounds");
  rates->add_option("trace", trace_path, "Trace CSV")->required();
  rates->add_option("--cert", cert_path, "Certificate JSON")->required();
  rates->add_option("--p", p, "Proximal order");
  rates->add_option("--beta", beta, "Lower bound on beta_k");
  rates->add_option("--beta-upper", beta_upper, "Upper bound on beta_k (defaults to --beta)");
  rates->add_option("--h-star", h_star, "Minimal value");
  rates->add_option("--radius", radius, "Local radius, required for p in (1,2) with gamma > 0");
  rates->add_option("--eps", eps, "Accuracy for the complexity checks");
  rates->add_option("--eps-step", eps_step, "Step tolerance used by the run");
  rates->add_option("--inner-tol", inner_tol, "Inner-solve tolerance of the run");

  CLI11_PARSE(app, argc, argv);

  if (*run) {
    char* artifacts = nullptr;
    int all_pass = 1;
    const hippa_status st = hippa_run_experiment(config_path.c_str(), &artifacts, &all_pass);
    if (st != HIPPA_OK) return report_error(st);
    print_and_free(artifacts);
    return 0;
  }

  if (*list) {
    char* ids = nullptr;
    const hippa_status st = hippa_zoo_list(&ids);
    if (st != HIPPA_OK) return report_error(st);
    for (const auto& id : nlohmann::json::parse(ids)) std::cout << id.get<std::string>() << '\n';
    hippa_string_free(ids);
    return 0;
  }

  if (*verify) {
    const auto opts = options_json(entry_options);
    if (!opts) {
      std::cerr << "error: --option expects key=number\n";
      return 1;
    }
    hippa_entry* entry = nullptr;
    hippa_status st = hippa_entry_create(entry_id.c_str(), opts->c_str(), &entry);
    if (st != HIPPA_OK) return report_error(st);
    const nlohmann::json sampler{{"samples", samples}, {"seed", seed}, {"tolerance", tolerance}};
    char* report = nullptr;
    int expected = 0;
    st = hippa_verify(entry, property.c_str(), sampler.dump().c_str(), &report, &expected);
    hippa_entry_destroy(entry);
    if (st != HIPPA_OK) return report_error(st);
    print_and_free(report);
    return expected ? 0 : 2;
  }

  const auto cert = read_file(cert_path);
  if (!cert) {
    std::cerr << "error: cannot read certificate '" << cert_path << "'\n";
    return 1;
  }
  nlohmann::json opts{{"p", p}, {"beta", beta}, {"h_star", h_star}, {"inner_tol", inner_tol}};
  if (beta_upper) opts["beta_upper"] = *beta_upper;
  if (radius) opts["radius"] = *radius;
  if (eps) opts["eps"] = *eps;
  if (eps_step) opts["eps_step"] = *eps_step;
  char* report = nullptr;
  int all_pass = 0;
  const hippa_status st = hippa_rates_from_csv(trace_path.c_str(), cert->c_str(), opts.dump().c_str(), &report, &all_pass);
  if (st != HIPPA_OK) return report_error(st);
  print_and_free(report);
  return all_pass ? 0 : 2;
}
