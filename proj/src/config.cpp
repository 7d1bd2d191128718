#include "tmine/config.hpp"

#include <algorithm>
#include <cctype>
#include <charconv>
#include <cmath>
#include <fstream>
#include <sstream>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

std::string trim(const std::string& s) {
  std::size_t b = 0, e = s.size();
  while (b < e && std::isspace(static_cast<unsigned char>(s[b]))) ++b;
  while (e > b && std::isspace(static_cast<unsigned char>(s[e - 1]))) --e;
  return s.substr(b, e - b);
}

double parse_double_or_throw(const std::string& key, const std::string& text) {
  const std::string t = trim(text);
  const char* begin = t.data();
  if (!t.empty() && *begin == '+') ++begin;
  double v{};
  auto [ptr, ec] = std::from_chars(begin, t.data() + t.size(), v);
  if (ec != std::errc() || ptr != t.data() + t.size())
    throw input_error("config key '" + key + "': expected a number, got '" + text + "'");
  return v;
}

}  // namespace

std::string KeyValues::get_string(const std::string& key,
                                  const std::string& fallback) const {
  const auto it = kv.find(key);
  return it == kv.end() ? fallback : it->second;
}

double KeyValues::get_double(const std::string& key, double fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  return parse_double_or_throw(key, it->second);
}

int KeyValues::get_int(const std::string& key, int fallback) const {
  const double v = get_double(key, double(fallback));
  if (v != std::floor(v))
    throw input_error("config key '" + key + "': expected an integer");
  return int(v);
}

bool KeyValues::get_bool(const std::string& key, bool fallback) const {
  const auto it = kv.find(key);
  if (it == kv.end()) return fallback;
  std::string v = trim(it->second);
  std::transform(v.begin(), v.end(), v.begin(),
                 [](unsigned char c) { return std::tolower(c); });
  if (v == "true" || v == "1" || v == "yes" || v == "on") return true;
  if (v == "false" || v == "0" || v == "no" || v == "off") return false;
  throw input_error("config key '" + key + "': expected a boolean, got '" +
                    it->second + "'");
}

std::string KeyValues::to_text() const {
  std::string out;
  for (const auto& [k, v] : kv) {
    out += k;
    out += " = ";
    out += v;
    out += '\n';
  }
  return out;
}

KeyValues parse_config_text(const std::string& text) {
  KeyValues kv;
  std::string section;
  std::string line;
  std::stringstream ss(text);
  int lineno = 0;
  while (std::getline(ss, line)) {
    ++lineno;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    std::string t = trim(line);
    if (t.empty() || t.front() == '#' || t.front() == ';') continue;
    if (t.front() == '[') {
      if (t.back() != ']')
        throw input_error("config line " + std::to_string(lineno) +
                          ": malformed section header");
      section = trim(t.substr(1, t.size() - 2));
      continue;
    }
    const auto eq = t.find('=');
    if (eq == std::string::npos)
      throw input_error("config line " + std::to_string(lineno) +
                        ": expected key = value");
    std::string key = trim(t.substr(0, eq));
    const std::string value = trim(t.substr(eq + 1));
    if (key.empty())
      throw input_error("config line " + std::to_string(lineno) + ": empty key");
    if (!section.empty()) key = section + "." + key;
    kv.kv[key] = value;
  }
  return kv;
}

KeyValues parse_config_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open config file: " + path);
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_config_text(buf.str());
}

void apply_override(KeyValues& kv, const std::string& assignment) {
  const auto eq = assignment.find('=');
  if (eq == std::string::npos || eq == 0)
    throw input_error("--set expects key=value, got '" + assignment + "'");
  kv.kv[trim(assignment.substr(0, eq))] = trim(assignment.substr(eq + 1));
}

std::uint64_t fnv1a64(const std::string& text) {
  std::uint64_t h = 1469598103934665603ull;
  for (unsigned char c : text) {
    h ^= c;
    h *= 1099511628211ull;
  }
  return h;
}

std::string hex16(std::uint64_t v) {
  static const char* digits = "0123456789abcdef";
  std::string s(16, '0');
  for (int i = 15; i >= 0; --i) {
    s[std::size_t(i)] = digits[v & 0xf];
    v >>= 4;
  }
  return s;
}

double RunConfig::element_lambda(const std::string& element, bool& fixed) const {
  const std::string key = "fit.lambda." + element;
  if (resolved.has(key)) {
    fixed = true;
    return resolved.get_double(key, 0.0);
  }
  if (lambda_mode != "gcv") {
    fixed = true;
    return lambda_fixed;
  }
  fixed = false;
  return 0.0;
}

double RunConfig::element_power(const std::string& element) const {
  return resolved.get_double("fit.power." + element, power);
}

std::vector<double> RunConfig::lambda_grid() const {
  std::vector<double> grid;
  grid.reserve(std::size_t(lambda_grid_count));
  if (lambda_grid_count == 1) {
    grid.push_back(lambda_grid_min);
    return grid;
  }
  const double lmin = std::log10(lambda_grid_min);
  const double lmax = std::log10(lambda_grid_max);
  for (int i = 0; i < lambda_grid_count; ++i)
    grid.push_back(std::pow(10.0, lmin + (lmax - lmin) * double(i) /
                                             double(lambda_grid_count - 1)));
  return grid;
}

RunConfig resolve_run_config(const KeyValues& user) {
  RunConfig c;
  KeyValues defaults;
  auto def = [&defaults](const std::string& k, const std::string& v) {
    defaults.kv[k] = v;
  };
  def("censoring.policy", "half_limit");
  def("censoring.fraction", "0.5");
  def("transect.min_n", "8");
  def("transect.max_missing", "0.1");
  def("fit.n_basis", "10");
  def("fit.degree", "3");
  def("fit.power", "1.5");
  def("fit.power_profile", "false");
  def("fit.lambda", "gcv");
  def("fit.lambda_grid.min", "1e-4");
  def("fit.lambda_grid.max", "1e6");
  def("fit.lambda_grid.count", "30");
  def("fit.residuals", "true");
  def("grid.m", "512");
  def("threshold.policy", "quantile");
  def("threshold.q", "0.9");
  def("threshold.value", "0");
  def("threshold.global", "false");
  def("rank.top_k", "70");
  def("rank.plots", "topk");
  def("synth.seed", "1");
  def("synth.n_samples", "50");
  def("synth.n_elements", "20");
  def("synth.planted", "");
  def("synth.centers", "6000");
  def("synth.width", "300");
  def("synth.amplitude", "3");
  def("synth.baseline", "constant");
  def("synth.baseline_level", "10");
  def("synth.power", "1.5");
  def("synth.dispersion", "0.1");
  def("synth.length", "12000");
  def("synth.site", "synthetic");
  def("synth.material", "synthetic");
  def("input", "");
  def("out", "out");
  def("site", "");
  def("material", "");

  c.resolved = defaults;
  for (const auto& [k, v] : user.kv) c.resolved.kv[k] = v;
  const KeyValues& r = c.resolved;

  c.input = r.get_string("input", "");
  c.out = r.get_string("out", "out");
  c.censoring_policy = r.get_string("censoring.policy", "half_limit");
  if (c.censoring_policy != "half_limit" && c.censoring_policy != "fixed_fraction" &&
      c.censoring_policy != "drop")
    throw input_error("censoring.policy must be half_limit, fixed_fraction or drop");
  c.censoring_fraction = r.get_double("censoring.fraction", 0.5);
  c.site_filter = r.get_string("site", "");
  c.material_filter = r.get_string("material", "");
  c.max_missing = r.get_double("transect.max_missing", 0.10);
  c.min_n = r.get_int("transect.min_n", 8);
  if (c.min_n < 2) throw input_error("transect.min_n must be >= 2");

  c.n_basis_cap = r.get_int("fit.n_basis", 10);
  c.degree = r.get_int("fit.degree", 3);
  if (c.degree < 2) throw input_error("fit.degree must be >= 2");
  c.power = r.get_double("fit.power", 1.5);
  if (!(c.power >= 1.0 && c.power <= 2.0))
    throw input_error("fit.power must lie in [1, 2]");
  c.power_profile = r.get_bool("fit.power_profile", false);
  const std::string lam = r.get_string("fit.lambda", "gcv");
  if (lam == "gcv") {
    c.lambda_mode = "gcv";
  } else {
    c.lambda_mode = "fixed";
    c.lambda_fixed = r.get_double("fit.lambda", 1.0);
    if (!(c.lambda_fixed >= 0.0)) throw input_error("fit.lambda must be >= 0");
  }
  c.lambda_grid_min = r.get_double("fit.lambda_grid.min", 1e-4);
  c.lambda_grid_max = r.get_double("fit.lambda_grid.max", 1e6);
  c.lambda_grid_count = r.get_int("fit.lambda_grid.count", 30);
  if (!(c.lambda_grid_min > 0.0) || !(c.lambda_grid_max >= c.lambda_grid_min))
    throw input_error("fit.lambda_grid bounds must satisfy 0 < min <= max");
  if (c.lambda_grid_count < 1)
    throw input_error("fit.lambda_grid.count must be >= 1");
  c.write_residuals = r.get_bool("fit.residuals", true);

  c.grid_m = r.get_int("grid.m", 512);
  if (c.grid_m < 16) throw input_error("grid.m must be >= 16");
  c.threshold_policy = r.get_string("threshold.policy", "quantile");
  if (c.threshold_policy != "quantile" && c.threshold_policy != "absolute")
    throw input_error("threshold.policy must be quantile or absolute");
  c.threshold_q = r.get_double("threshold.q", 0.90);
  if (!(c.threshold_q > 0.0 && c.threshold_q < 1.0))
    throw input_error("threshold.q must lie in (0, 1)");
  c.threshold_value = r.get_double("threshold.value", 0.0);
  c.threshold_global = r.get_bool("threshold.global", false);
  c.top_k = r.get_int("rank.top_k", 70);
  if (c.top_k < 1) throw input_error("rank.top_k must be >= 1");
  c.plots = r.get_string("rank.plots", "topk");
  if (c.plots != "none" && c.plots != "topk" && c.plots != "all")
    throw input_error("rank.plots must be none, topk or all");

  const double seed = r.get_double("synth.seed", 1.0);
  if (!(seed >= 0.0)) throw input_error("synth.seed must be >= 0");
  c.seed = std::uint64_t(seed);
  c.synth_n_samples = r.get_int("synth.n_samples", 50);
  c.synth_n_elements = r.get_int("synth.n_elements", 20);
  c.synth_planted = r.get_string("synth.planted", "");
  c.synth_centers = r.get_string("synth.centers", "6000");
  c.synth_width = r.get_double("synth.width", 300.0);
  c.synth_amplitude = r.get_double("synth.amplitude", 3.0);
  c.synth_baseline = r.get_string("synth.baseline", "constant");
  if (c.synth_baseline != "constant" && c.synth_baseline != "linear" &&
      c.synth_baseline != "sinusoid")
    throw input_error("synth.baseline must be constant, linear or sinusoid");
  c.synth_baseline_level = r.get_double("synth.baseline_level", 10.0);
  c.synth_power = r.get_double("synth.power", 1.5);
  c.synth_dispersion = r.get_double("synth.dispersion", 0.1);
  c.synth_length = r.get_double("synth.length", 12000.0);
  c.synth_site = r.get_string("synth.site", "synthetic");
  c.synth_material = r.get_string("synth.material", "synthetic");
  return c;
}

}  // namespace tmine
