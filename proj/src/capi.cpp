#include "hippa/hippa.h"

#include "hippa/experiment.hpp"

#include <json.hpp>

#include <cstring>
#include <fstream>
#include <sstream>

using nlohmann::json;

struct hippa_entry {
  hippa::ZooEntry entry;
};

struct hippa_trace {
  hippa::RunTrace trace;
};

static_assert(static_cast<int>(HIPPA_INTERNAL) == static_cast<int>(hippa::ErrorCode::Internal));
static_assert(static_cast<int>(HIPPA_RADIUS_REQUIRED) == static_cast<int>(hippa::ErrorCode::RadiusRequired));

namespace {

thread_local std::string last_error;

template <class F>
hippa_status guarded(F&& body) {
  try {
    body();
    last_error.clear();
    return HIPPA_OK;
  } catch (const hippa::Error& e) {
    last_error = e.what();
    return static_cast<hippa_status>(e.code());
  } catch (const json::exception& e) {
    last_error = e.what();
    return HIPPA_CONFIG_PARSE;
  } catch (const std::exception& e) {
    last_error = e.what();
    return HIPPA_INTERNAL;
  } catch (...) {
    last_error = "unknown failure";
    return HIPPA_INTERNAL;
  }
}

void require(bool ok, const char* what) {
  if (!ok) hippa::fail(hippa::ErrorCode::BadParameter, what);
}

char* dup_string(const std::string& s) {
  char* out = static_cast<char*>(std::malloc(s.size() + 1));
  if (!out) throw std::bad_alloc();
  std::memcpy(out, s.c_str(), s.size() + 1);
  return out;
}

json parse_or_empty(const char* text) {
  if (!text || !*text) return json::object();
  return json::parse(text);
}

hippa::Vector copy_vector(const double* x, size_t n) {
  hippa::Vector v(static_cast<Eigen::Index>(n));
  for (size_t i = 0; i < n; ++i) v[static_cast<Eigen::Index>(i)] = x[i];
  return v;
}

json vec_json(const hippa::Vector& v) { return std::vector<double>(v.data(), v.data() + v.size()); }

json check_json(const hippa::CheckReport& r) {
  json j{{"property", hippa::property_name(r.property)},
         {"samples_tested", r.samples_tested},
         {"worst_violation", r.worst_violation},
         {"tolerance", r.tolerance},
         {"passed", r.passed()}};
  if (r.witness)
    j["witness"] = {{"x", vec_json(r.witness->x)}, {"lambda", r.witness->lambda},
                    {"inequality", hippa::property_name(r.witness->property)}};
  return j;
}

}  // namespace

extern "C" {

const char* hippa_version(void) { return "1.0.0"; }

const char* hippa_status_name(hippa_status status) {
  if (status < HIPPA_OK || status > HIPPA_INTERNAL) return "Unknown";
  return hippa::error_name(static_cast<hippa::ErrorCode>(status));
}

const char* hippa_last_error(void) { return last_error.c_str(); }

void hippa_string_free(char* text) { std::free(text); }

hippa_status hippa_zoo_list(char** ids_json) {
  return guarded([&] {
    require(ids_json, "ids_json must not be null");
    *ids_json = dup_string(json(hippa::zoo_ids()).dump());
  });
}

hippa_status hippa_entry_create(const char* id, const char* options_json, hippa_entry** out) {
  return guarded([&] {
    require(id && out, "id and out must not be null");
    hippa::ZooOptions options;
    const json parsed = parse_or_empty(options_json);
    for (const auto& [k, v] : parsed.items()) options[k] = v.get<double>();
    *out = new hippa_entry{hippa::make_zoo_entry(id, options)};
  });
}

void hippa_entry_destroy(hippa_entry* entry) { delete entry; }

hippa_status hippa_entry_dim(const hippa_entry* entry, size_t* dim) {
  return guarded([&] {
    require(entry && dim, "entry and dim must not be null");
    *dim = static_cast<size_t>(entry->entry.oracle.dim);
  });
}

hippa_status hippa_entry_info(const hippa_entry* entry, char** info_json) {
  return guarded([&] {
    require(entry && info_json, "entry and info_json must not be null");
    const auto& e = entry->entry;
    json j{{"id", e.id},
           {"dim", e.oracle.dim},
           {"provenance", e.provenance},
           {"stochastic", static_cast<bool>(e.oracle.stochastic)},
           {"parameters", e.parameters},
           {"notes", e.notes}};
    if (e.oracle.minimizer) j["minimizer_norm"] = e.oracle.minimizer->norm();
    if (e.oracle.min_value) j["min_value"] = *e.oracle.min_value;
    if (e.certificate) j["certificate"] = json::parse(hippa::certificate_json(*e.certificate));
    j["negative_certificates"] = json::array();
    for (const auto& c : e.negative_certificates)
      j["negative_certificates"].push_back(json::parse(hippa::certificate_json(c)));
    *info_json = dup_string(j.dump(2));
  });
}

hippa_status hippa_entry_evaluate(const hippa_entry* entry, const double* x, size_t n, double* value,
                                  double* subgradient) {
  return guarded([&] {
    require(entry && x && value, "entry, x and value must not be null");
    const auto& o = entry->entry.oracle;
    require(static_cast<Eigen::Index>(n) == o.dim, "dimension mismatch");
    const hippa::Vector v = copy_vector(x, n);
    hippa::require_finite(v, "hippa_entry_evaluate");
    *value = o.value(v);
    if (subgradient) {
      const hippa::Vector g = hippa::subgradient_select(o, v);
      std::copy(g.data(), g.data() + g.size(), subgradient);
    }
  });
}

hippa_status hippa_entry_start(const hippa_entry* entry, uint64_t seed, double* x, size_t n) {
  return guarded([&] {
    require(entry && x, "entry and x must not be null");
    require(static_cast<Eigen::Index>(n) == entry->entry.oracle.dim, "dimension mismatch");
    const hippa::Vector v = entry->entry.start(seed);
    std::copy(v.data(), v.data() + v.size(), x);
  });
}

hippa_status hippa_verify(const hippa_entry* entry, const char* property, const char* options_json,
                          char** report_json, int* all_expected) {
  return guarded([&] {
    require(entry && report_json, "entry and report_json must not be null");
    const auto& e = entry->entry;
    const hippa::Property prop = hippa::parse_property(property ? property : "definition");
    const json opts = parse_or_empty(options_json);
    hippa::SamplerConfig sampler;
    sampler.samples = opts.value("samples", sampler.samples);
    sampler.seed = opts.value("seed", sampler.seed);
    sampler.tolerance = opts.value("tolerance", sampler.tolerance);
    sampler.lambda_grid = opts.value("lambda_grid", sampler.lambda_grid);
    sampler.radius = opts.value("radius", sampler.radius);

    bool expected = true;
    json j{{"entry", e.id}, {"property", hippa::property_name(prop)}};
    if (e.certificate) {
      const hippa::CheckReport r = hippa::verify_certificate(e.oracle, *e.certificate, prop, sampler);
      j["certificate"] = check_json(r);
      expected = expected && r.passed();
    }
    j["negative_certificates"] = json::array();
    for (std::size_t i = 0; i < e.negative_certificates.size(); ++i) {
      const auto& cert = e.negative_certificates[i];
      json n{{"kappa", cert.kappa}, {"gamma", cert.gamma}, {"center", vec_json(cert.center)}};
      bool refuted = false;
      if (i < e.negative_witnesses.size()) {
        const auto& w = e.negative_witnesses[i];
        const double residual = hippa::witness_residual(e.oracle, cert, w);
        refuted = residual > sampler.tolerance;
        n["stored_witness"] = {{"x", vec_json(w.x)},
                               {"lambda", w.lambda},
                               {"inequality", hippa::property_name(w.property)},
                               {"residual", residual}};
      }
      n["refuted"] = refuted;
      expected = expected && refuted;
      j["negative_certificates"].push_back(n);
    }
    j["all_expected"] = expected;
    *report_json = dup_string(j.dump(2));
    if (all_expected) *all_expected = expected ? 1 : 0;
  });
}

hippa_status hippa_run_hippa(const hippa_entry* entry, const double* x0, size_t n, const char* config_json,
                             hippa_trace** out) {
  return guarded([&] {
    require(entry && x0 && out, "entry, x0 and out must not be null");
    require(static_cast<Eigen::Index>(n) == entry->entry.oracle.dim, "dimension mismatch");
    const hippa::HippaConfig cfg = hippa::parse_hippa_config(config_json ? config_json : "");
    *out = new hippa_trace{hippa::run_hippa(entry->entry.oracle, copy_vector(x0, n), cfg)};
  });
}

void hippa_trace_destroy(hippa_trace* trace) { delete trace; }

hippa_status hippa_trace_length(const hippa_trace* trace, size_t* length) {
  return guarded([&] {
    require(trace && length, "trace and length must not be null");
    *length = trace->trace.records.size();
  });
}

hippa_status hippa_trace_write_csv(const hippa_trace* trace, const char* path) {
  return guarded([&] {
    require(trace && path, "trace and path must not be null");
    hippa::write_trace_csv(trace->trace, path);
  });
}

hippa_status hippa_trace_terminated_by(const hippa_trace* trace, const char** name) {
  return guarded([&] {
    require(trace && name, "trace and name must not be null");
    *name = hippa::termination_name(trace->trace.terminated_by);
  });
}

hippa_status hippa_run_experiment(const char* config_path, char** artifacts_json, int* all_checks_pass) {
  return guarded([&] {
    require(config_path, "config_path must not be null");
    const hippa::ExperimentResult r = hippa::run_experiment(hippa::load_experiment(config_path));
    if (artifacts_json) {
      json paths = json::array();
      for (const auto& p : r.artifacts) paths.push_back(p.string());
      *artifacts_json = dup_string(paths.dump(2));
    }
    if (all_checks_pass) *all_checks_pass = r.all_checks_pass ? 1 : 0;
  });
}

hippa_status hippa_rates_from_csv(const char* csv_path, const char* certificate_json, const char* options_json,
                                  char** report_json, int* all_pass) {
  return guarded([&] {
    require(csv_path && certificate_json && report_json, "csv_path, certificate_json and report_json are required");
    const json opts = parse_or_empty(options_json);
    const hippa::QuasarCertificate cert = hippa::parse_certificate_json(certificate_json);
    hippa::RateContext ctx;
    ctx.p = opts.value("p", 2.0);
    ctx.beta_lower = opts.value("beta", 1.0);
    ctx.beta_upper = opts.value("beta_upper", ctx.beta_lower);
    ctx.inner_tol = opts.value("inner_tol", ctx.inner_tol);
    if (opts.contains("radius")) ctx.radius = opts.at("radius").get<double>();
    if (opts.contains("eps")) ctx.eps = opts.at("eps").get<double>();
    if (opts.contains("eps_step")) ctx.eps_step = opts.at("eps_step").get<double>();
    const hippa::RateSeries series = hippa::read_trace_csv(csv_path, opts.value("h_star", 0.0));
    const hippa::RateReport report = hippa::check_rate_bounds(series, cert, ctx);
    *report_json = dup_string(hippa::to_json(report));
    if (all_pass) *all_pass = report.all_pass() ? 1 : 0;
  });
}

}  // extern "C"
