#include "hippa/hippa.h"

#include <doctest.h>
#include <json.hpp>

#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <string>
#include <sys/wait.h>

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

json take_json(char* text) {
  json j = json::parse(text);
  hippa_string_free(text);
  return j;
}

fs::path scratch(const std::string& name) {
  const fs::path p = fs::temp_directory_path() / ("hippa_capi_" + name);
  fs::remove_all(p);
  fs::create_directories(p);
  return p;
}

int run_cli(const std::string& args) {
  const char* cli = std::getenv("HIPPA_CLI");
  REQUIRE(cli);
  const int raw = std::system((std::string(cli) + " " + args + " > /dev/null 2>&1").c_str());
  return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

}  // namespace

TEST_CASE("version, status names and zoo list") {
  CHECK(std::string(hippa_version()) == "1.0.0");
  CHECK(std::string(hippa_status_name(HIPPA_OK)) == "Ok");
  CHECK(std::string(hippa_status_name(HIPPA_UNKNOWN_ENTRY)) == "UnknownEntry");
  CHECK(std::string(hippa_status_name(static_cast<hippa_status>(999))) == "Unknown");
  char* ids = nullptr;
  REQUIRE(hippa_zoo_list(&ids) == HIPPA_OK);
  const json list = take_json(ids);
  CHECK(list.size() == 7);
}

TEST_CASE("entry lifecycle and evaluation") {
  hippa_entry* e = nullptr;
  REQUIRE(hippa_entry_create("spiky", nullptr, &e) == HIPPA_OK);
  size_t dim = 0;
  REQUIRE(hippa_entry_dim(e, &dim) == HIPPA_OK);
  CHECK(dim == 2);
  const double x[2] = {1.0, 0.0};
  double value = 0.0, grad[2] = {0.0, 0.0};
  REQUIRE(hippa_entry_evaluate(e, x, 2, &value, grad) == HIPPA_OK);
  CHECK(value == doctest::Approx(3.0));
  CHECK(std::isfinite(grad[0]));
  CHECK(hippa_entry_evaluate(e, x, 3, &value, nullptr) == HIPPA_BAD_PARAMETER);
  const double bad[2] = {NAN, 0.0};
  CHECK(hippa_entry_evaluate(e, bad, 2, &value, nullptr) == HIPPA_NON_FINITE_INPUT);
  CHECK(std::string(hippa_last_error()).size() > 0);
  double start[2];
  REQUIRE(hippa_entry_start(e, 0, start, 2) == HIPPA_OK);
  CHECK(start[0] == 0.5);
  char* info = nullptr;
  REQUIRE(hippa_entry_info(e, &info) == HIPPA_OK);
  const json j = take_json(info);
  CHECK(j.at("certificate").at("kappa") == 0.5);
  CHECK(std::string(hippa_last_error()).empty());
  hippa_entry_destroy(e);

  hippa_entry* none = nullptr;
  CHECK(hippa_entry_create("nope", nullptr, &none) == HIPPA_UNKNOWN_ENTRY);
  CHECK(none == nullptr);
  CHECK(hippa_entry_create("spiky", "{bad", &none) == HIPPA_CONFIG_PARSE);
  CHECK(hippa_entry_create(nullptr, nullptr, &none) == HIPPA_BAD_PARAMETER);
}

TEST_CASE("verification through the C API") {
  hippa_entry* e = nullptr;
  REQUIRE(hippa_entry_create("spiky", nullptr, &e) == HIPPA_OK);
  char* report = nullptr;
  int expected = 0;
  REQUIRE(hippa_verify(e, "definition", R"({"samples": 2000})", &report, &expected) == HIPPA_OK);
  CHECK(expected == 1);
  const json j = take_json(report);
  CHECK(j.at("certificate").at("passed") == true);
  CHECK(j.at("negative_certificates").at(0).at("refuted") == true);
  CHECK(hippa_verify(e, "bogus", nullptr, &report, &expected) == HIPPA_BAD_PARAMETER);
  hippa_entry_destroy(e);
}

TEST_CASE("HiPPA run, trace export and rate report") {
  const fs::path dir = scratch("run");
  hippa_entry* e = nullptr;
  REQUIRE(hippa_entry_create("square", nullptr, &e) == HIPPA_OK);
  const double x0[1] = {1.0};
  hippa_trace* t = nullptr;
  REQUIRE(hippa_run_hippa(e, x0, 1, R"({"p": 2, "beta": 1, "inner_tol": 1e-13, "eps_step": 1e-12})", &t) == HIPPA_OK);
  size_t len = 0;
  REQUIRE(hippa_trace_length(t, &len) == HIPPA_OK);
  CHECK(len > 10);
  const char* term = nullptr;
  REQUIRE(hippa_trace_terminated_by(t, &term) == HIPPA_OK);
  CHECK(std::string(term) == "step_tol");
  const std::string csv = (dir / "square.csv").string();
  REQUIRE(hippa_trace_write_csv(t, csv.c_str()) == HIPPA_OK);
  hippa_trace_destroy(t);
  hippa_entry_destroy(e);

  char* report = nullptr;
  int pass = 0;
  const char* cert = R"({"kappa": 1, "gamma": 2, "center": [0]})";
  REQUIRE(hippa_rates_from_csv(csv.c_str(), cert, R"({"p": 2, "beta": 1, "inner_tol": 1e-13, "eps": 1e-3})", &report,
                               &pass) == HIPPA_OK);
  CHECK(pass == 1);
  const json r = take_json(report);
  CHECK(r.at("regime") == "p_eq_2");
  CHECK(r.at("fitted").at("linear_ratio").get<double>() == doctest::Approx(1.0 / 3.0).epsilon(1e-6));
  CHECK(hippa_rates_from_csv("/nonexistent.csv", cert, nullptr, &report, &pass) == HIPPA_IO_ERROR);
}

TEST_CASE("experiment through the C API") {
  const fs::path dir = scratch("experiment");
  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << json{{"entry", "dist_disk"},
                             {"output_dir", (dir / "out").string()},
                             {"methods", {{{"method", "hippa"}, {"label", "h"}, {"p", 2}, {"beta", 1.0}}}}}
                            .dump();
  char* artifacts = nullptr;
  int pass = 0;
  REQUIRE(hippa_run_experiment(cfg.string().c_str(), &artifacts, &pass) == HIPPA_OK);
  const json a = take_json(artifacts);
  CHECK(a.size() == 4);
  CHECK(pass == 1);
  CHECK(fs::exists(dir / "out" / "summary.csv"));
  CHECK(hippa_run_experiment((dir / "missing.json").string().c_str(), nullptr, nullptr) == HIPPA_IO_ERROR);
}

TEST_CASE("command-line exit codes") {
  const fs::path dir = scratch("cli");
  CHECK(run_cli("list-zoo") == 0);
  CHECK(run_cli("verify spiky --samples 500") == 0);
  CHECK(run_cli("verify oscillatory") == 0);
  CHECK(run_cli("verify nope") == 1);
  CHECK(run_cli("verify relu_glm --option n=4 --option batch_eval=2000 --samples 100") == 0);
  CHECK(run_cli("") != 0);

  std::ofstream(dir / "slow.csv") << "k,value,step_norm,dist_to_min,rel_err,inner_iters,elapsed_s\n"
                                  << "0,1,0.1,1,,0,0\n1,0.81,0.1,0.9,,0,0\n2,0.6561,0.1,0.81,,0,0\n";
  std::ofstream(dir / "cert.json") << R"({"kappa": 1, "gamma": 2, "center": [0]})";
  CHECK(run_cli("rates " + (dir / "slow.csv").string() + " --cert " + (dir / "cert.json").string()) == 2);
  CHECK(run_cli("rates " + (dir / "missing.csv").string() + " --cert " + (dir / "cert.json").string()) == 1);

  const fs::path cfg = dir / "cfg.json";
  std::ofstream(cfg) << json{{"entry", "spiky"},
                             {"output_dir", (dir / "out").string()},
                             {"methods", {{{"method", "hippa"}, {"label", "h"}, {"p", 3}}}}}
                            .dump();
  CHECK(run_cli("run " + cfg.string()) == 0);
  CHECK(fs::exists(dir / "out" / "h_seed0.csv"));
  std::ofstream(dir / "bad.json") << "{";
  CHECK(run_cli("run " + (dir / "bad.json").string()) == 1);
}
