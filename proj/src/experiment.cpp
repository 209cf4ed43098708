#include "hippa/experiment.hpp"

#include <json.hpp>

#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <set>
#include <sstream>

namespace hippa {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

template <class T>
T get_or(const json& j, const char* key, T fallback) {
  auto it = j.find(key);
  return it == j.end() || it->is_null() ? fallback : it->get<T>();
}

std::optional<double> get_opt(const json& j, const char* key) {
  auto it = j.find(key);
  if (it == j.end() || it->is_null()) return std::nullopt;
  return it->get<double>();
}

Stopping parse_stopping(const json& j, Stopping base) {
  base.eps_step = get_or(j, "eps_step", base.eps_step);
  if (auto v = get_opt(j, "rel_err_tol")) base.rel_err_tol = v;
  base.max_iters = get_or(j, "max_iters", base.max_iters);
  return base;
}

BetaSchedule parse_beta(const json& j) {
  auto it = j.find("beta");
  if (it == j.end()) return BetaSchedule::constant(1.0);
  if (it->is_number()) return BetaSchedule::constant(it->get<double>());
  const double initial = it->at("initial").get<double>();
  return BetaSchedule::geometric(initial, get_or(*it, "growth", 1.0), get_or(*it, "cap", initial));
}

MethodSpec parse_method(const json& j, const Stopping& shared) {
  const std::string kind = j.at("method").get<std::string>();
  const Stopping stop = parse_stopping(j, shared);
  if (kind == "hippa") {
    HippaMethod m;
    HippaConfig& c = m.config;
    c.prox.p = get_or(j, "p", 2.0);
    c.prox.inner_tol = get_or(j, "inner_tol", c.prox.inner_tol);
    c.prox.inner_max_iters = get_or(j, "inner_max_iters", c.prox.inner_max_iters);
    c.prox.smoothing_mu = get_or(j, "smoothing_mu", c.prox.smoothing_mu);
    c.prox.smoothing_shrink = get_or(j, "smoothing_shrink", c.prox.smoothing_shrink);
    c.prox.multistart = get_or(j, "multistart", c.prox.multistart);
    c.beta = parse_beta(j);
    c.eps_step = stop.eps_step;
    c.eps_rel = stop.rel_err_tol;
    c.max_iters = stop.max_iters;
    std::ostringstream def;
    def << "hippa-p" << c.prox.p;
    m.label = get_or<std::string>(j, "label", def.str());
    validate_hippa_config(c);
    return m;
  }
  BaselineMethodSpec m;
  m.config = BaselineConfig::defaults(parse_baseline(kind));
  BaselineConfig& c = m.config;
  c.step0 = get_or(j, "step0", c.step0);
  if (auto it = j.find("step_rule"); it != j.end()) {
    const std::string rule = it->get<std::string>();
    if (rule == "constant") c.step_rule = StepRule::Constant;
    else if (rule == "inv_sqrt_k") c.step_rule = StepRule::InvSqrtK;
    else fail(ErrorCode::ConfigParse, "unknown step_rule '" + rule + "'");
  }
  c.batch = get_or(j, "batch", c.batch);
  c.eps_step = get_or(j, "eps_step", 0.0);
  c.rel_err_tol = stop.rel_err_tol;
  c.max_iters = stop.max_iters;
  m.label = get_or<std::string>(j, "label", kind);
  return m;
}

const std::string& label_of(const MethodSpec& m) {
  return std::visit([](const auto& s) -> const std::string& { return s.label; }, m);
}

std::string fmt_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.17g", v);
  return buf;
}

std::string fmt_opt(const std::optional<double>& v) { return v ? fmt_double(*v) : std::string(); }

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) fail(ErrorCode::IoError, "cannot open '" + path.string() + "' for writing");
  out << text;
  if (!out) fail(ErrorCode::IoError, "write to '" + path.string() + "' failed");
}

json vector_json(const Vector& v) { return json(std::vector<double>(v.data(), v.data() + v.size())); }

Vector vector_from(const json& j) {
  auto values = j.get<std::vector<double>>();
  return Eigen::Map<const Vector>(values.data(), static_cast<Eigen::Index>(values.size()));
}

json region_json(const RegionDescriptor& region) {
  if (std::holds_alternative<RegionWhole>(region)) return {{"type", "whole"}};
  auto ball = [](const RegionBall& b) { return json{{"center", vector_json(b.center)}, {"radius", b.radius}}; };
  if (const auto* b = std::get_if<RegionBall>(&region)) {
    json j = ball(*b);
    j["type"] = "ball";
    return j;
  }
  const auto& bi = std::get<RegionBallIntersection>(region);
  return {{"type", "ball_intersection"}, {"first", ball(bi.first)}, {"second", ball(bi.second)}};
}

RegionDescriptor region_from(const json& j) {
  const std::string type = get_or<std::string>(j, "type", "whole");
  auto ball = [](const json& b) { return RegionBall{vector_from(b.at("center")), b.at("radius").get<double>()}; };
  if (type == "whole") return RegionWhole{};
  if (type == "ball") return ball(j);
  if (type == "ball_intersection") return RegionBallIntersection{ball(j.at("first")), ball(j.at("second"))};
  fail(ErrorCode::ConfigParse, "unknown region type '" + type + "'");
}

}  // namespace

ExperimentConfig parse_experiment(const std::string& text) {
  try {
    const json j = json::parse(text);
    ExperimentConfig cfg;
    cfg.entry_id = j.at("entry").get<std::string>();
    if (auto it = j.find("entry_options"); it != j.end())
      for (const auto& [k, v] : it->items()) cfg.entry_options[k] = v.get<double>();
    if (auto it = j.find("seeds"); it != j.end()) cfg.seeds = it->get<std::vector<std::uint64_t>>();
    if (cfg.seeds.empty()) fail(ErrorCode::ConfigParse, "seeds must not be empty");
    if (auto it = j.find("stopping"); it != j.end()) cfg.stopping = parse_stopping(*it, cfg.stopping);
    cfg.output_dir = get_or<std::string>(j, "output_dir", "out");
    cfg.project = get_or(j, "project", true);
    if (auto it = j.find("rates"); it != j.end()) {
      cfg.rate_radius = get_opt(*it, "radius");
      cfg.rate_eps = get_opt(*it, "eps");
    }
    std::set<std::string> labels;
    for (const auto& m : j.at("methods")) {
      cfg.methods.push_back(parse_method(m, cfg.stopping));
      if (!labels.insert(label_of(cfg.methods.back())).second)
        fail(ErrorCode::ConfigParse, "duplicate method label '" + label_of(cfg.methods.back()) + "'");
    }
    if (cfg.methods.empty()) fail(ErrorCode::ConfigParse, "at least one method is required");
    return cfg;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, e.what());
  } catch (const Error& e) {
    if (e.code() == ErrorCode::BadParameter) fail(ErrorCode::ConfigParse, e.what());
    throw;
  }
}

HippaConfig parse_hippa_config(const std::string& text) {
  try {
    json j = text.empty() ? json::object() : json::parse(text);
    if (!j.contains("method")) j["method"] = "hippa";
    if (j.at("method") != "hippa") fail(ErrorCode::ConfigParse, "expected a hippa method object");
    return std::get<HippaMethod>(parse_method(j, Stopping{})).config;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, e.what());
  }
}

ExperimentConfig load_experiment(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_experiment(ss.str());
}

void write_trace_csv(const RunTrace& trace, const fs::path& path) {
  std::string out = "k,value,step_norm,dist_to_min,rel_err,inner_iters,elapsed_s\n";
  for (const auto& r : trace.records) {
    out += std::to_string(r.k) + ',' + fmt_double(r.value) + ',' + fmt_double(r.step_norm) + ',' +
           fmt_opt(r.dist_to_min) + ',' + fmt_opt(r.rel_err) + ',' + std::to_string(r.inner_iters) + ',' +
           fmt_double(r.elapsed_s) + '\n';
  }
  write_text(path, out);
}

RateSeries read_trace_csv(const fs::path& path, double h_star) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::IoError, "cannot read '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line)) fail(ErrorCode::ConfigParse, "empty trace file");
  std::vector<std::string> header;
  {
    std::stringstream hs(line);
    for (std::string cell; std::getline(hs, cell, ',');) header.push_back(cell);
  }
  auto column = [&](const char* name) {
    for (std::size_t i = 0; i < header.size(); ++i)
      if (header[i] == name) return i;
    fail(ErrorCode::ConfigParse, std::string("trace is missing column '") + name + "'");
  };
  const std::size_t ck = column("k"), cv = column("value"), cs = column("step_norm"), cd = column("dist_to_min");
  RateSeries s;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    std::vector<std::string> cells;
    std::stringstream ls(line);
    for (std::string cell; std::getline(ls, cell, ',');) cells.push_back(cell);
    cells.resize(header.size());
    if (cells[cd].empty()) fail(ErrorCode::MissingMinimizer, "trace has no dist_to_min values");
    try {
      s.k.push_back(std::stoi(cells[ck]));
      s.gap.push_back(std::stod(cells[cv]) - h_star);
      s.step.push_back(std::stod(cells[cs]));
      s.dist.push_back(std::stod(cells[cd]));
    } catch (const std::exception&) {
      fail(ErrorCode::ConfigParse, "malformed trace row: " + line);
    }
  }
  return s;
}

std::string certificate_json(const QuasarCertificate& cert) {
  json j{{"kappa", cert.kappa}, {"gamma", cert.gamma}, {"center", vector_json(cert.center)},
         {"region", region_json(cert.region)}};
  return j.dump(2);
}

QuasarCertificate parse_certificate_json(const std::string& text) {
  try {
    const json j = json::parse(text);
    QuasarCertificate cert;
    cert.kappa = j.at("kappa").get<double>();
    cert.gamma = j.at("gamma").get<double>();
    if (auto it = j.find("center"); it != j.end()) cert.center = vector_from(*it);
    if (auto it = j.find("region"); it != j.end()) cert.region = region_from(*it);
    return cert;
  } catch (const json::exception& e) {
    fail(ErrorCode::ConfigParse, e.what());
  }
}

ExperimentResult run_experiment(const ExperimentConfig& cfg) {
  const ZooEntry entry = make_zoo_entry(cfg.entry_id, cfg.entry_options);
  fs::path dir = cfg.output_dir;
  if (const char* env = std::getenv("HIPPA_OUTPUT_DIR"); env && *env) dir = env;
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec) fail(ErrorCode::IoError, "cannot create '" + dir.string() + "': " + ec.message());

  ExperimentResult result;
  const RegionDescriptor region =
      cfg.project && entry.certificate ? entry.certificate->region : RegionDescriptor{RegionWhole{}};
  if (entry.certificate) {
    fs::path p = dir / (entry.id + "_certificate.json");
    write_text(p, certificate_json(*entry.certificate));
    result.artifacts.push_back(p);
  }
  const bool multi = cfg.seeds.size() > 1;

  for (const auto& method : cfg.methods) {
    const std::string& label = label_of(method);
    json report = json::object();
    report["method"] = label;
    report["entry"] = entry.id;
    report["runs"] = json::array();
    for (std::uint64_t seed : cfg.seeds) {
      const Vector x0 = entry.start(seed);
      RunTrace trace;
      std::optional<RateContext> ctx;
      if (const auto* h = std::get_if<HippaMethod>(&method)) {
        HippaConfig c = h->config;
        c.seed = seed;
        c.region = region;
        trace = run_hippa(entry.oracle, x0, c);
        ctx = rate_context(c, cfg.rate_radius, cfg.rate_eps);
      } else {
        BaselineConfig c = std::get<BaselineMethodSpec>(method).config;
        c.seed = seed;
        c.region = region;
        trace = run_baseline(entry.oracle, x0, c);
      }
      const fs::path csv = dir / (label + "_seed" + std::to_string(seed) + ".csv");
      write_trace_csv(trace, csv);
      result.artifacts.push_back(csv);

      json run{{"seed", seed},
               {"terminated_by", termination_name(trace.terminated_by)},
               {"config_digest", trace.config_digest},
               {"metadata", trace.metadata}};
      // Theorem checks apply to deterministic HiPPA runs; everything else gets a fit only.
      try {
        if (ctx && entry.certificate && !entry.oracle.stochastic && entry.oracle.minimizer) {
          RateReport rep = check_rate_bounds(trace, entry.oracle, *entry.certificate, *ctx);
          run["report"] = json::parse(to_json(rep));
          result.all_checks_pass = result.all_checks_pass && rep.all_pass();
        } else if (entry.oracle.minimizer && !entry.oracle.stochastic) {
          RateFit fit = estimate_rate(trace, entry.oracle);
          auto num = [](double v) { return std::isfinite(v) ? json(v) : json(nullptr); };
          run["fitted"] = {{"linear_ratio", num(fit.linear_ratio)},
                           {"superlinear_order", num(fit.superlinear_order)},
                           {"sublinear_exponent", num(fit.sublinear_exponent)}};
        } else {
          run["note"] = "stochastic objective: rate fitting not performed";
        }
      } catch (const Error& e) {
        run["note"] = std::string(error_name(e.code())) + ": " + e.what();
      }
      report["runs"].push_back(run);

      const TraceRecord& last = trace.records.back();
      result.summary.push_back(SummaryRow{multi ? label + "_seed" + std::to_string(seed) : label, last.k,
                                          last.elapsed_s, last.rel_err, last.value});
      result.traces.emplace_back(label + "_seed" + std::to_string(seed), std::move(trace));
    }
    const fs::path rp = dir / (label + "_report.json");
    write_text(rp, report.dump(2));
    result.artifacts.push_back(rp);
  }

  std::string summary = "method,iteration_to_stop,time_s,relative_error,objective_value\n";
  for (const auto& row : result.summary)
    summary += row.method + ',' + std::to_string(row.iteration_to_stop) + ',' + fmt_double(row.time_s) + ',' +
               fmt_opt(row.relative_error) + ',' + fmt_double(row.objective_value) + '\n';
  const fs::path sp = dir / "summary.csv";
  write_text(sp, summary);
  result.artifacts.push_back(sp);
  return result;
}

}  // namespace hippa
