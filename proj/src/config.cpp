#include "coagfrag/config.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "coagfrag/errors.hpp"
#include "coagfrag/oracles.hpp"

namespace coagfrag {
namespace {

using nlohmann::json;

// Reads one JSON object, recording every problem instead of stopping at the
// first. Keys never asked for are reported by finish().
class Reader {
 public:
  Reader(const json& j, std::string path, std::vector<std::string>& errors)
      : j_(j), path_(std::move(path)), errors_(errors) {
    ok_ = j.is_object();
    if (!ok_) errors_.push_back(where() + " must be an object");
  }

  bool ok() const { return ok_; }
  bool has(const std::string& key) {
    seen_.insert(key);
    return ok_ && j_.contains(key);
  }
  const json& at(const std::string& key) const { return j_.at(key); }
  std::string child(const std::string& key) const {
    return path_.empty() ? key : path_ + "." + key;
  }
  void error(const std::string& key, const std::string& msg) {
    errors_.push_back(child(key) + " " + msg);
  }

  void number(const std::string& key, double& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (v.is_number()) out = v.get<double>();
    else error(key, "must be a number");
  }
  void number(const std::string& key, std::optional<double>& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (v.is_number()) out = v.get<double>();
    else error(key, "must be a number");
  }
  template <class U>
  void count(const std::string& key, U& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (v.is_number_unsigned() || (v.is_number_integer() && v.get<long long>() >= 0)) {
      out = v.get<U>();
    } else {
      error(key, "must be a non-negative integer");
    }
  }
  void string(const std::string& key, std::string& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (v.is_string()) out = v.get<std::string>();
    else error(key, "must be a string");
  }
  void numbers(const std::string& key, std::vector<double>& out) {
    if (!has(key)) return;
    const auto& v = at(key);
    if (!v.is_array()) {
      error(key, "must be an array of numbers");
      return;
    }
    out.clear();
    for (const auto& e : v) {
      if (!e.is_number()) {
        error(key, "must be an array of numbers");
        return;
      }
      out.push_back(e.get<double>());
    }
  }
  template <class E>
  void choice(const std::string& key, E& out, E (*parse)(std::string_view)) {
    std::string s;
    if (!has(key)) return;
    string(key, s);
    if (!at(key).is_string()) return;
    try {
      out = parse(s);
    } catch (const ConfigError& e) {
      error(key, std::string("is invalid: ") + e.what());
    }
  }

  void finish() {
    if (!ok_) return;
    for (const auto& [key, value] : j_.items()) {
      if (!seen_.count(key)) errors_.push_back("unknown key '" + child(key) + "'");
    }
  }

 private:
  std::string where() const { return path_.empty() ? "configuration" : path_; }

  const json& j_;
  std::string path_;
  std::vector<std::string>& errors_;
  std::set<std::string> seen_;
  bool ok_ = false;
};

void prefixed(std::vector<std::string>& errors, const std::string& prefix,
              const std::vector<std::string>& more) {
  for (const auto& e : more) errors.push_back(prefix + ": " + e);
}

void read_kernel(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  if (!top.has("kernel") || top.at("kernel").is_null()) return;
  Reader r(top.at("kernel"), "kernel", errors);
  if (!r.ok()) return;
  CoagulationParams p;
  if (!r.has("family")) r.error("family", "is required");
  r.choice("family", p.family, &parse_kernel_family);
  r.number("k0", p.k0);
  r.number("c", p.c);
  r.number("mu1", p.mu1);
  r.number("mu2", p.mu2);
  if (r.has("table")) {
    Reader t(r.at("table"), "kernel.table", errors);
    t.numbers("sizes", p.table_sizes);
    t.numbers("values", p.table_values);
    t.finish();
  }
  r.finish();
  prefixed(errors, "kernel", validate(p));
  cfg.kernel = p;
}

void read_fragmentation(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  if (!top.has("fragmentation") || top.at("fragmentation").is_null()) return;
  Reader r(top.at("fragmentation"), "fragmentation", errors);
  if (!r.ok()) return;
  FragmentationParams p;
  r.choice("family", p.family, &parse_rate_family);
  r.number("gamma", p.gamma);
  r.number("alpha", p.alpha);
  r.number("s0", p.s0);
  if (r.has("table")) {
    Reader t(r.at("table"), "fragmentation.table", errors);
    t.numbers("sizes", p.rate_sizes);
    t.numbers("rates", p.rate_values);
    t.finish();
  }
  r.finish();
  prefixed(errors, "fragmentation", validate(p));
  cfg.fragmentation = p;
}

void read_hypotheses(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  if (!top.has("hypotheses")) return;
  const auto& v = top.at("hypotheses");
  if (v.is_string()) {
    if (v.get<std::string>() != "suggest") {
      errors.push_back("hypotheses must be \"suggest\" or an object of constants");
    }
    return;
  }
  Reader r(v, "hypotheses", errors);
  auto& d = cfg.hypotheses;
  r.number("k1", d.k1);
  r.number("mu", d.mu);
  r.number("m", d.m);
  r.number("lambda", d.lambda);
  r.number("L_gamma", d.L_gamma);
  r.number("nu", d.nu);
  r.finish();
  if (d.k1 && !(*d.k1 > 0.0)) errors.push_back("hypotheses.k1 must be > 0");
  if (d.mu && !(*d.mu >= 0.0 && *d.mu < 1.0)) errors.push_back("hypotheses.mu must be in [0, 1)");
  if (d.m && !(*d.m > 0.0)) errors.push_back("hypotheses.m must be > 0");
  if (d.lambda && !(*d.lambda > 0.0 && *d.lambda < 1.0)) {
    errors.push_back("hypotheses.lambda must be in (0, 1)");
  }
  if (d.L_gamma && !(*d.L_gamma > 0.0)) errors.push_back("hypotheses.L_gamma must be > 0");
  if (d.nu && !(*d.nu > -1.0)) errors.push_back("hypotheses.nu must be > -1");
}

void read_grid(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  if (top.has("grid")) {
    Reader r(top.at("grid"), "grid", errors);
    r.number("x_min", cfg.grid.x_min);
    r.number("x_max", cfg.grid.x_max);
    r.count("n_cells", cfg.grid.n_cells);
    r.choice("pivot", cfg.grid.pivot, &parse_pivot_rule);
    r.finish();
  }
  prefixed(errors, "grid", validate(cfg.grid));
}

void read_initial(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  auto& ic = cfg.initial;
  if (top.has("initial")) {
    Reader r(top.at("initial"), "initial", errors);
    if (!r.ok()) return;
    if (r.has("csv")) {
      ic.kind = InitialCondition::Kind::kCsv;
      r.string("csv", ic.csv_path);
    } else {
      std::string profile = "exponential";
      r.string("profile", profile);
      if (profile == "exponential") {
        ic.kind = InitialCondition::Kind::kExponential;
        r.number("amplitude", ic.amplitude);
        r.number("scale", ic.scale);
      } else if (profile == "monodisperse") {
        ic.kind = InitialCondition::Kind::kMonodisperse;
        r.number("size", ic.size);
        r.number("number", ic.number);
      } else if (profile == "zero") {
        ic.kind = InitialCondition::Kind::kZero;
      } else {
        r.error("profile", "must be exponential, monodisperse or zero (got '" + profile + "')");
      }
    }
    r.finish();
  }
  switch (ic.kind) {
    case InitialCondition::Kind::kExponential:
      if (!(std::isfinite(ic.amplitude) && ic.amplitude >= 0.0)) {
        errors.push_back("initial.amplitude must be >= 0");
      }
      if (!(std::isfinite(ic.scale) && ic.scale > 0.0)) errors.push_back("initial.scale must be > 0");
      break;
    case InitialCondition::Kind::kMonodisperse:
      if (!(ic.size >= cfg.grid.x_min && ic.size <= cfg.grid.x_max)) {
        errors.push_back("initial.size must lie inside [grid.x_min, grid.x_max]");
      }
      if (!(std::isfinite(ic.number) && ic.number >= 0.0)) {
        errors.push_back("initial.number must be >= 0");
      }
      break;
    case InitialCondition::Kind::kCsv:
      if (ic.csv_path.empty()) errors.push_back("initial.csv must name a file");
      break;
    case InitialCondition::Kind::kZero:
      break;
  }
}

void read_time(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  auto& t = cfg.time;
  auto& c = t.controller;
  if (top.has("time")) {
    Reader r(top.at("time"), "time", errors);
    r.number("t_end", t.t_end);
    r.count("snapshots", t.snapshots);
    r.numbers("snapshot_times", t.snapshot_times);
    r.number("rtol", c.rtol);
    r.number("atol", c.atol);
    r.number("safety", c.safety);
    r.number("dt_initial", c.dt_initial);
    r.finish();
  }
  if (!(std::isfinite(t.t_end) && t.t_end >= 0.0)) errors.push_back("time.t_end must be >= 0");
  if (t.snapshot_times.empty() && t.snapshots == 0) {
    errors.push_back("time.snapshots must be >= 1");
  }
  for (std::size_t i = 0; i < t.snapshot_times.size(); ++i) {
    const double s = t.snapshot_times[i];
    if (!(s > 0.0 && s <= t.t_end)) {
      errors.push_back("time.snapshot_times must lie in (0, t_end]");
      break;
    }
    if (i > 0 && !(s > t.snapshot_times[i - 1])) {
      errors.push_back("time.snapshot_times must be strictly increasing");
      break;
    }
  }
  if (!(c.rtol > 0.0 && c.rtol < 1.0)) errors.push_back("time.rtol must be in (0, 1)");
  if (!(c.atol >= 0.0 && std::isfinite(c.atol))) errors.push_back("time.atol must be >= 0");
  if (!(c.safety > 0.0 && c.safety <= 1.0)) errors.push_back("time.safety must be in (0, 1]");
  if (!(c.dt_initial > 0.0 && std::isfinite(c.dt_initial))) {
    errors.push_back("time.dt_initial must be > 0");
  }
}

void read_audit(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  auto& a = cfg.audit;
  if (top.has("audit")) {
    Reader r(top.at("audit"), "audit", errors);
    r.number("x_min", a.x_min);
    r.number("x_max", a.x_max);
    r.count("points", a.points);
    r.count("inner", a.inner);
    r.count("random_points", a.random_points);
    r.finish();
  }
  if (a.points < 1000) errors.push_back("audit.points must be >= 1000");
  if (a.inner == 0) errors.push_back("audit.inner must be > 0");
  if (!(a.x_min > 0.0 && a.x_max > a.x_min && std::isfinite(a.x_max))) {
    errors.push_back("audit needs 0 < x_min < x_max");
  }
}

void read_compare(Reader& top, ScenarioConfig& cfg, std::vector<std::string>& errors) {
  auto& c = cfg.compare;
  if (top.has("compare")) {
    Reader r(top.at("compare"), "compare", errors);
    r.number("epsilon", c.epsilon);
    r.number("tau_disc", c.tau_disc);
    r.count("samples", c.samples);
    r.string("shape", c.shape);
    r.finish();
  }
  if (!(c.epsilon >= 0.0 && c.epsilon < 1.0)) errors.push_back("compare.epsilon must be in [0, 1)");
  if (!(c.tau_disc >= 0.0 && std::isfinite(c.tau_disc))) {
    errors.push_back("compare.tau_disc must be >= 0");
  }
  if (c.samples == 0) errors.push_back("compare.samples must be >= 1");
  if (c.shape != "sin-log" && c.shape != "uniform") {
    errors.push_back("compare.shape must be sin-log or uniform");
  }
}

std::size_t line_of(const std::string& text, std::size_t byte) {
  byte = std::min(byte, text.size());
  return 1 + static_cast<std::size_t>(std::count(text.begin(), text.begin() + static_cast<std::ptrdiff_t>(byte), '\n'));
}

}  // namespace

ScenarioConfig config_from_json(const json& j) {
  std::vector<std::string> errors;
  ScenarioConfig cfg;
  Reader top(j, "", errors);
  if (top.ok()) {
    top.string("name", cfg.name);
    read_kernel(top, cfg, errors);
    read_fragmentation(top, cfg, errors);
    read_hypotheses(top, cfg, errors);
    read_grid(top, cfg, errors);
    read_initial(top, cfg, errors);
    read_time(top, cfg, errors);
    top.choice("truncation", cfg.truncation, &parse_truncation_mode);
    top.choice("dust", cfg.dust, &parse_dust_policy);
    top.numbers("moment_orders", cfg.moment_orders);
    for (double r : cfg.moment_orders) {
      if (!(r >= 0.0 && std::isfinite(r))) {
        errors.push_back("moment_orders must be finite and >= 0");
        break;
      }
    }
    top.string("output", cfg.output);
    top.count("seed", cfg.seed);
    read_audit(top, cfg, errors);
    read_compare(top, cfg, errors);
    if (top.has("levels")) {
      const auto& v = top.at("levels");
      bool good = v.is_array();
      if (good) {
        for (const auto& e : v) {
          if (!e.is_number_integer() || e.get<long long>() < 8) {
            good = false;
            break;
          }
          cfg.levels.push_back(e.get<std::size_t>());
        }
      }
      if (!good) errors.push_back("levels must be an array of integers >= 8");
    }
    top.finish();
  }
  if (!errors.empty()) {
    std::string msg = "invalid configuration (" + std::to_string(errors.size()) + " problem" +
                      (errors.size() == 1 ? "" : "s") + "):";
    for (const auto& e : errors) msg += "\n  - " + e;
    throw ConfigError(msg);
  }
  return cfg;
}

ScenarioConfig parse_config(const std::string& text, const std::string& source) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::parse_error& e) {
    std::ostringstream os;
    os << source << ":" << line_of(text, e.byte) << ": JSON parse error: " << e.what();
    throw ConfigError(os.str());
  }
  try {
    return config_from_json(j);
  } catch (const ConfigError& e) {
    throw ConfigError(source + ": " + e.what());
  }
}

ScenarioConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open configuration file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  ScenarioConfig cfg = parse_config(ss.str(), path);
  if (cfg.initial.kind == InitialCondition::Kind::kCsv) {
    std::filesystem::path p(cfg.initial.csv_path);
    if (p.is_relative()) {
      cfg.initial.csv_path = (std::filesystem::path(path).parent_path() / p).lexically_normal().string();
    }
  }
  return cfg;
}

json to_json(const ScenarioConfig& cfg) {
  json j;
  j["name"] = cfg.name;
  if (cfg.kernel) {
    const auto& p = *cfg.kernel;
    json k = {{"family", std::string(to_string(p.family))},
              {"k0", p.k0},
              {"c", p.c},
              {"mu1", p.mu1},
              {"mu2", p.mu2}};
    if (p.family == KernelFamily::kCustomTable) {
      k["table"] = {{"sizes", p.table_sizes}, {"values", p.table_values}};
    }
    j["kernel"] = k;
  } else {
    j["kernel"] = nullptr;
  }
  if (cfg.fragmentation) {
    const auto& p = *cfg.fragmentation;
    json f = {{"family", std::string(to_string(p.family))},
              {"gamma", p.gamma},
              {"alpha", p.alpha},
              {"s0", p.s0}};
    if (p.family == RateFamily::kCustom) {
      f["table"] = {{"sizes", p.rate_sizes}, {"rates", p.rate_values}};
    }
    j["fragmentation"] = f;
  } else {
    j["fragmentation"] = nullptr;
  }
  const auto& d = cfg.hypotheses;
  if (d.suggest_all()) {
    j["hypotheses"] = "suggest";
  } else {
    json h = json::object();
    if (d.k1) h["k1"] = *d.k1;
    if (d.mu) h["mu"] = *d.mu;
    if (d.m) h["m"] = *d.m;
    if (d.lambda) h["lambda"] = *d.lambda;
    if (d.L_gamma) h["L_gamma"] = *d.L_gamma;
    if (d.nu) h["nu"] = *d.nu;
    j["hypotheses"] = h;
  }
  j["grid"] = {{"x_min", cfg.grid.x_min},
               {"x_max", cfg.grid.x_max},
               {"n_cells", cfg.grid.n_cells},
               {"pivot", std::string(to_string(cfg.grid.pivot))}};
  const auto& ic = cfg.initial;
  switch (ic.kind) {
    case InitialCondition::Kind::kExponential:
      j["initial"] = {{"profile", "exponential"}, {"amplitude", ic.amplitude}, {"scale", ic.scale}};
      break;
    case InitialCondition::Kind::kMonodisperse:
      j["initial"] = {{"profile", "monodisperse"}, {"size", ic.size}, {"number", ic.number}};
      break;
    case InitialCondition::Kind::kZero:
      j["initial"] = {{"profile", "zero"}};
      break;
    case InitialCondition::Kind::kCsv:
      j["initial"] = {{"csv", ic.csv_path}};
      break;
  }
  const auto& t = cfg.time;
  j["time"] = {{"t_end", t.t_end},
               {"snapshots", t.snapshots},
               {"snapshot_times", t.snapshot_times},
               {"rtol", t.controller.rtol},
               {"atol", t.controller.atol},
               {"safety", t.controller.safety},
               {"dt_initial", t.controller.dt_initial}};
  j["truncation"] = std::string(to_string(cfg.truncation));
  j["dust"] = std::string(to_string(cfg.dust));
  j["moment_orders"] = cfg.moment_orders;
  j["output"] = cfg.output;
  j["seed"] = cfg.seed;
  j["audit"] = {{"x_min", cfg.audit.x_min},
                {"x_max", cfg.audit.x_max},
                {"points", cfg.audit.points},
                {"inner", cfg.audit.inner},
                {"random_points", cfg.audit.random_points}};
  j["compare"] = {{"epsilon", cfg.compare.epsilon},
                  {"tau_disc", cfg.compare.tau_disc},
                  {"samples", cfg.compare.samples},
                  {"shape", cfg.compare.shape}};
  j["levels"] = cfg.levels;
  return j;
}

ScenarioConfig fixture_config(const std::string& name) {
  ScenarioConfig cfg;
  cfg.name = name;
  cfg.time.t_end = 1.0;
  cfg.time.snapshots = 10;
  if (name == "scott-constant") {
    CoagulationParams k;
    k.family = KernelFamily::kConstant;
    cfg.kernel = k;
  } else if (name == "ziff-linear-binary") {
    FragmentationParams f;
    f.gamma = 1.0;
    f.alpha = 0.0;
    cfg.fragmentation = f;
  } else if (name == "powerlaw-number-growth") {
    FragmentationParams f;
    f.gamma = 1.0;
    f.alpha = -0.5;
    cfg.fragmentation = f;
    // Fragments pile up at small sizes; a lower cutoff keeps dust negligible.
    cfg.grid.x_min = 1e-6;
    cfg.grid.n_cells = 384;
    cfg.time.t_end = 2.0;
    cfg.time.snapshots = 20;
  } else {
    throw ConfigError("unknown fixture '" + name +
                      "' (expected scott-constant, ziff-linear-binary or powerlaw-number-growth)");
  }
  return cfg;
}

OutputSchedule schedule_for(const TimeConfig& time) {
  if (!time.snapshot_times.empty()) return OutputSchedule{time.snapshot_times};
  return OutputSchedule::uniform(time.t_end, time.snapshots);
}

Density initial_density(const InitialCondition& ic, const std::shared_ptr<const Grid>& grid) {
  switch (ic.kind) {
    case InitialCondition::Kind::kExponential: {
      const double a = ic.amplitude;
      const double l = ic.scale;
      return project([a, l](double x) { return a * std::exp(-x / l); }, grid);
    }
    case InitialCondition::Kind::kMonodisperse:
      return monodisperse(grid, ic.size, ic.number);
    case InitialCondition::Kind::kZero:
      return Density::zero(grid);
    case InitialCondition::Kind::kCsv:
      return remap(read_density_csv(ic.csv_path), grid);
  }
  return Density::zero(grid);
}

Scenario build_scenario(const ScenarioConfig& cfg, std::optional<std::size_t> n_cells) {
  GridSpec gs = cfg.grid;
  if (n_cells) gs.n_cells = *n_cells;
  auto grid = Grid::make(gs);
  std::optional<CoagulationKernel> kernel;
  if (cfg.kernel) kernel = CoagulationKernel(*cfg.kernel);
  std::optional<FragmentationSpec> frag;
  if (cfg.fragmentation) frag = FragmentationSpec(*cfg.fragmentation);
  AssemblyOptions opts;
  opts.truncation = cfg.truncation;
  opts.dust = cfg.dust;
  auto tables = assemble(kernel, frag, grid, opts);
  return Scenario{cfg, grid, kernel, frag, initial_density(cfg.initial, grid), tables};
}

ResolvedConstants resolve_constants(const DeclaredConstants& declared,
                                    const std::optional<CoagulationKernel>& kernel,
                                    const std::optional<FragmentationSpec>& fragmentation) {
  ResolvedConstants out;
  auto& c = out.constants;
  std::optional<CoagulationConstants> kc;
  std::string kc_reason;
  if (!kernel) {
    kc = CoagulationConstants{1.0, 0.0};
  } else {
    try {
      kc = suggest_coagulation_constants(*kernel);
    } catch (const UnsupportedError& e) {
      kc_reason = e.what();
    }
  }
  std::optional<FragmentationConstants> fc;
  std::string fc_reason;
  if (!fragmentation) {
    fc_reason = "no fragmentation";
  } else {
    try {
      fc = suggest_fragmentation_constants(*fragmentation);
    } catch (const UnsupportedError& e) {
      fc_reason = e.what();
    }
  }
  auto fill = [&](const char* name, const std::optional<double>& d, double& slot, bool derivable,
                  double derived, const std::string& reason) {
    if (d) {
      slot = *d;
    } else if (derivable) {
      slot = derived;
    } else {
      out.missing.push_back(name);
      std::ostringstream os;
      os.precision(17);
      os << name << ": not derivable (" << reason << "); using default " << slot;
      out.notes.push_back(os.str());
    }
  };
  fill("k1", declared.k1, c.k1, kc.has_value(), kc ? kc->k1 : 0.0, kc_reason);
  fill("mu", declared.mu, c.mu, kc.has_value(), kc ? kc->mu : 0.0, kc_reason);
  fill("m", declared.m, c.m, fc.has_value(), fc ? fc->m : 0.0, fc_reason);
  fill("lambda", declared.lambda, c.lambda, fc.has_value(), fc ? fc->lambda : 0.0, fc_reason);
  fill("L_gamma", declared.L_gamma, c.L_gamma, fc.has_value(), fc ? fc->L_gamma : 0.0, fc_reason);
  fill("nu", declared.nu, c.nu, fc.has_value(), fc ? fc->nu : 0.0, fc_reason);
  return out;
}

}  // namespace coagfrag
