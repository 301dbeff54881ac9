#include "levyest/run_config.hpp"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <map>
#include <sstream>

namespace levyest {
namespace {

struct Entry {
  std::string value;
  int line = 0;
  bool used = false;
};

struct Ini {
  std::string origin;
  // section -> key -> entry; sections and keys are case-sensitive.
  std::map<std::string, std::map<std::string, Entry>> sections;

  [[noreturn]] void fail(int line, const std::string& what) const {
    throw config_error(origin + ":" + std::to_string(line) + ": " + what);
  }
};

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

const std::vector<std::string> kKnownSections = {
    "run",      "model",      "sampling", "kernel",
    "adaptive", "estimate",   "experiment", "output"};

Ini parse_ini(const std::string& text, const std::string& origin) {
  Ini ini;
  ini.origin = origin;
  std::istringstream is(text);
  std::string raw, section;
  int line = 0;
  while (std::getline(is, raw)) {
    ++line;
    std::string s = trim(raw);
    if (s.empty() || s[0] == '#' || s[0] == ';') continue;
    if (s.front() == '[') {
      if (s.back() != ']') ini.fail(line, "unterminated section header");
      section = trim(s.substr(1, s.size() - 2));
      if (std::find(kKnownSections.begin(), kKnownSections.end(), section) ==
          kKnownSections.end())
        ini.fail(line, "unknown section [" + section + "]");
      ini.sections[section];  // empty sections are allowed
      continue;
    }
    const auto eq = s.find('=');
    if (eq == std::string::npos)
      ini.fail(line, "expected 'key = value', got '" + s + "'");
    if (section.empty()) ini.fail(line, "key outside of any [section]");
    const std::string key = trim(s.substr(0, eq));
    const std::string value = trim(s.substr(eq + 1));
    if (key.empty()) ini.fail(line, "empty key");
    auto [it, fresh] = ini.sections[section].emplace(key, Entry{value, line});
    if (!fresh)
      ini.fail(line, "duplicate key '" + key + "' in [" + section +
                         "] (first at line " + std::to_string(it->second.line) +
                         ")");
  }
  return ini;
}

// Typed access; every read marks the key used so leftovers can be reported.
class Reader {
 public:
  explicit Reader(Ini& ini) : ini_(ini) {}

  std::optional<std::string> raw(const std::string& sec,
                                 const std::string& key) {
    auto s = ini_.sections.find(sec);
    if (s == ini_.sections.end()) return std::nullopt;
    auto k = s->second.find(key);
    if (k == s->second.end()) return std::nullopt;
    k->second.used = true;
    last_line_ = k->second.line;
    return k->second.value;
  }

  std::string str(const std::string& sec, const std::string& key,
                  const std::string& fallback) {
    auto v = raw(sec, key);
    return v ? *v : fallback;
  }

  template <typename T>
  std::optional<T> number(const std::string& sec, const std::string& key) {
    auto v = raw(sec, key);
    if (!v) return std::nullopt;
    T out{};
    if (!parse_number(*v, &out))
      ini_.fail(last_line_, "key '" + key + "' in [" + sec +
                                "]: expected a number, got '" + *v + "'");
    return out;
  }

  template <typename T>
  T number_or(const std::string& sec, const std::string& key, T fallback) {
    auto v = number<T>(sec, key);
    return v ? *v : fallback;
  }

  double require_number(const std::string& sec, const std::string& key) {
    auto v = number<double>(sec, key);
    if (!v)
      throw config_error(ini_.origin + ": missing required key '" + key +
                         "' in [" + sec + "]");
    return *v;
  }

  std::vector<double> number_list(const std::string& sec,
                                  const std::string& key) {
    auto v = raw(sec, key);
    if (!v) return {};
    std::vector<double> out;
    std::string item;
    std::istringstream is(*v);
    while (std::getline(is, item, ',')) {
      double d = 0.0;
      if (!parse_number(trim(item), &d))
        ini_.fail(last_line_, "key '" + key + "' in [" + sec +
                                  "]: bad list element '" + trim(item) + "'");
      out.push_back(d);
    }
    if (out.empty())
      ini_.fail(last_line_, "key '" + key + "' in [" + sec + "]: empty list");
    return out;
  }

  [[noreturn]] void bad_value(const std::string& sec, const std::string& key,
                              const std::string& got,
                              const std::string& expect) {
    ini_.fail(last_line_, "key '" + key + "' in [" + sec + "]: expected " +
                              expect + ", got '" + got + "'");
  }

  void finish() {
    for (const auto& [sec, keys] : ini_.sections)
      for (const auto& [key, entry] : keys)
        if (!entry.used)
          ini_.fail(entry.line, "unknown key '" + key + "' in [" + sec + "]");
  }

 private:
  static bool parse_number(const std::string& s, double* out) {
    if (s.empty()) return false;
    char* end = nullptr;
    const double v = std::strtod(s.c_str(), &end);
    if (end != s.c_str() + s.size()) return false;
    *out = v;
    return true;
  }
  static bool parse_number(const std::string& s, int* out) {
    if (s.empty()) return false;
    int v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return false;
    *out = v;
    return true;
  }
  static bool parse_number(const std::string& s, std::int64_t* out) {
    if (s.empty()) return false;
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return false;
    *out = v;
    return true;
  }
  static bool parse_number(const std::string& s, std::uint64_t* out) {
    if (s.empty()) return false;
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
    if (ec != std::errc() || p != s.data() + s.size()) return false;
    *out = v;
    return true;
  }

  Ini& ini_;
  int last_line_ = 0;
};

Model read_model(Reader& r) {
  const std::string kind = r.str("model", "kind", "");
  if (kind == "sqrt_jump") return Model::sqrt_jump();
  if (kind == "gamma")
    return Model::gamma_process(r.require_number("model", "shape"),
                                r.require_number("model", "rate"));
  if (kind == "merton")
    return Model::merton(r.require_number("model", "intensity"),
                         r.require_number("model", "jump_sd"));
  if (kind == "variance_gamma")
    return Model::variance_gamma(r.require_number("model", "drift"),
                                 r.require_number("model", "volatility"),
                                 r.require_number("model", "variance_rate"));
  r.bad_value("model", "kind", kind,
              "one of sqrt_jump|gamma|merton|variance_gamma");
}

SamplingScheme read_scheme(Reader& r) {
  const std::string kind = r.str("sampling", "scheme", "");
  SamplingScheme out;
  if (kind == "regular") {
    out = RegularScheme{r.require_number("sampling", "delta"),
                        r.number_or<std::int64_t>("sampling", "n", 0)};
  } else if (kind == "irregular") {
    IrregularScheme s{r.number_list("sampling", "intervals")};
    if (s.intervals.empty())
      throw config_error("[sampling]: key 'intervals' is required");
    out = std::move(s);
  } else if (kind == "power_decay") {
    out = PowerDecayScheme{r.require_number("sampling", "coefficient"),
                           r.require_number("sampling", "alpha"),
                           r.number_or<std::int64_t>("sampling", "n", 0)};
  } else {
    r.bad_value("sampling", "scheme", kind,
                "one of regular|irregular|power_decay");
  }
  validate_scheme(out);
  return out;
}

KernelSpec read_kernel(Reader& r) {
  const std::string base_name = r.str("kernel", "base", "gaussian");
  const std::string table = r.str("kernel", "table", "");
  BaseDensity base = BaseDensity::gaussian();
  if (base_name == "gaussian") {
  } else if (base_name == "cauchy") {
    base = BaseDensity::cauchy();
  } else if (base_name == "tabulated") {
    if (table.empty())
      throw config_error("[kernel]: base=tabulated requires key 'table'");
    base = BaseDensity::tabulated_from_csv(table);
  } else {
    r.bad_value("kernel", "base", base_name,
                "one of gaussian|cauchy|tabulated");
  }
  const int order = r.number_or<int>("kernel", "order", 2);
  const std::string rule_name =
      r.str("kernel", "rule", "convolution_power");
  ScalingRule rule = ScalingRule::convolution_power;
  if (rule_name == "literal")
    rule = ScalingRule::literal;
  else if (rule_name != "convolution_power")
    r.bad_value("kernel", "rule", rule_name,
                "one of convolution_power|literal");
  return build_kernel(base, order, rule);
}

}  // namespace

RunConfig RunConfig::from_string(const std::string& text,
                                 const std::string& origin) {
  Ini ini = parse_ini(text, origin);
  Reader r(ini);
  RunConfig cfg;
  try {
    cfg.seed = r.number_or<std::uint64_t>("run", "seed", 1);
    cfg.threads = r.number_or<int>("run", "threads", 0);

    if (ini.sections.count("model")) cfg.model = read_model(r);
    if (ini.sections.count("sampling")) cfg.scheme = read_scheme(r);
    if (ini.sections.count("kernel")) cfg.kernel = read_kernel(r);

    cfg.grid_rule = r.str("adaptive", "grid", "simulation");
    if (cfg.grid_rule != "simulation" && cfg.grid_rule != "theory" &&
        cfg.grid_rule != "explicit")
      throw config_error(
          "[adaptive]: key 'grid' must be simulation|theory|explicit");
    cfg.grid_m = r.number<int>("adaptive", "m");
    cfg.grid_values = r.number_list("adaptive", "values");
    if (cfg.grid_rule == "explicit" && cfg.grid_values.empty())
      throw config_error("[adaptive]: grid=explicit requires key 'values'");
    cfg.c = r.number_or<double>("adaptive", "c", 0.1);
    const std::string mode = r.str("adaptive", "c0_mode", "empirical");
    if (mode == "oracle")
      cfg.c0_mode = C0Mode::oracle;
    else if (mode == "empirical")
      cfg.c0_mode = C0Mode::empirical;
    else if (mode == "manual")
      cfg.c0_mode = C0Mode::manual;
    else
      r.bad_value("adaptive", "c0_mode", mode,
                  "one of oracle|empirical|manual");
    cfg.manual_c0 = r.number_or<double>("adaptive", "manual_c0", 0.0);
    cfg.quadrature_step =
        r.number_or<double>("adaptive", "quadrature_step", 0.0);
    const std::string path = r.str("adaptive", "path", "auto");
    if (path == "auto")
      cfg.path = CurvePath::automatic;
    else if (path == "direct")
      cfg.path = CurvePath::direct;
    else if (path == "fft")
      cfg.path = CurvePath::fft;
    else
      r.bad_value("adaptive", "path", path, "one of auto|direct|fft");
    cfg.min_bins = r.number_or<int>("adaptive", "min_bins", 4096);

    cfg.estimate_mode = r.str("estimate", "mode", "adaptive");
    if (cfg.estimate_mode != "fixed" && cfg.estimate_mode != "adaptive")
      throw config_error("[estimate]: key 'mode' must be fixed|adaptive");
    cfg.fixed_h = r.number<double>("estimate", "h");
    if (cfg.estimate_mode == "fixed" && !cfg.fixed_h)
      throw config_error("[estimate]: mode=fixed requires key 'h'");
    cfg.est_lo = r.number<double>("estimate", "eval_lo");
    cfg.est_hi = r.number<double>("estimate", "eval_hi");
    cfg.est_points = r.number_or<int>("estimate", "n_points", 50);

    cfg.eval_lo = r.number<double>("experiment", "eval_lo");
    cfg.eval_hi = r.number<double>("experiment", "eval_hi");
    cfg.n_points = r.number_or<int>("experiment", "n_points", 50);
    cfg.replications = r.number_or<int>("experiment", "replications", 10);

    cfg.out_prefix = r.str("output", "out", "levyest_out");
    cfg.output_format = r.str("output", "format", "both");
    if (cfg.output_format != "json" && cfg.output_format != "csv" &&
        cfg.output_format != "both")
      throw config_error("[output]: key 'format' must be json|csv|both");

    r.finish();
  } catch (const config_error&) {
    throw;
  } catch (const std::exception& e) {
    // Library-level validation of configured values is still a config problem.
    throw config_error(origin + ": " + e.what());
  }
  return cfg;
}

RunConfig RunConfig::from_file(const std::string& path) {
  std::ifstream in(path);
  if (!in)
    throw config_error("cannot open config file '" + path + "'");
  std::ostringstream buf;
  buf << in.rdbuf();
  return from_string(buf.str(), path);
}

BandwidthGrid RunConfig::resolve_grid(double n_delta_bar) const {
  if (grid_rule == "explicit") {
    auto values = grid_values;
    return BandwidthGrid::explicit_values(std::move(values));
  }
  const std::size_t m = grid_m ? static_cast<std::size_t>(*grid_m)
                               : BandwidthGrid::default_m(n_delta_bar);
  return grid_rule == "theory" ? BandwidthGrid::theory(m)
                               : BandwidthGrid::simulation(m);
}

AdaptiveConfig RunConfig::make_adaptive(double n_delta_bar) const {
  AdaptiveConfig out;
  out.grid = resolve_grid(n_delta_bar);
  out.c = c;
  out.c0_mode = c0_mode;
  out.manual_c0 = manual_c0;
  out.quadrature_step = quadrature_step;
  out.path = path;
  out.min_bins = min_bins;
  return out;
}

ExperimentSpec RunConfig::make_experiment() const {
  if (!model)
    throw config_error("bench needs a [model] section");
  if (!scheme)
    throw config_error("bench needs a [sampling] section");
  ExperimentSpec spec;
  spec.model = *model;
  spec.scheme = *scheme;
  spec.kernel = kernel;
  // With auto_m the placeholder grid below is rebuilt per experiment from
  // n delta_bar; otherwise resolve_grid already ignores its argument.
  spec.config = make_adaptive(1000.0);
  spec.auto_m = !(grid_m || grid_rule == "explicit");
  const auto fallback = model->default_eval_interval();
  spec.eval_lo = eval_lo ? *eval_lo : fallback.first;
  spec.eval_hi = eval_hi ? *eval_hi : fallback.second;
  spec.n_points = n_points;
  spec.replications = replications;
  spec.master_seed = seed;
  spec.threads = threads;
  return spec;
}

}  // namespace levyest
