#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

namespace tmine {

/// Flat key=value store. Config files are INI-style: `key = value` lines,
/// `#`/`;` comments, optional `[section]` headers that prefix keys with
/// "section.".
struct KeyValues {
  std::map<std::string, std::string> kv;

  bool has(const std::string& key) const { return kv.count(key) != 0; }
  void set(const std::string& key, const std::string& value) { kv[key] = value; }
  std::string get_string(const std::string& key, const std::string& fallback) const;
  double get_double(const std::string& key, double fallback) const;
  int get_int(const std::string& key, int fallback) const;
  bool get_bool(const std::string& key, bool fallback) const;

  /// Canonical text: sorted `key = value` lines.
  std::string to_text() const;
};

KeyValues parse_config_text(const std::string& text);
KeyValues parse_config_file(const std::string& path);

/// Applies one `--set key=value` override.
void apply_override(KeyValues& kv, const std::string& assignment);

std::uint64_t fnv1a64(const std::string& text);
std::string hex16(std::uint64_t v);

/// Fully resolved run configuration: defaults merged with the config file
/// and --set overrides. `resolved` holds the complete effective key set and
/// is what gets written into every output directory.
struct RunConfig {
  KeyValues resolved;

  std::string input;   // file or directory, meaning depends on the command
  std::string out;     // output directory

  // ingest
  std::string censoring_policy = "half_limit";  // half_limit|fixed_fraction|drop
  double censoring_fraction = 0.5;
  std::string site_filter;      // empty = all
  std::string material_filter;  // empty = all
  double max_missing = 0.10;

  // fit
  int min_n = 8;
  int n_basis_cap = 10;
  int degree = 3;
  double power = 1.5;
  bool power_profile = false;
  std::string lambda_mode = "gcv";  // "gcv" or a number via fit.lambda
  double lambda_fixed = 1.0;
  double lambda_grid_min = 1e-4;
  double lambda_grid_max = 1e6;
  int lambda_grid_count = 30;
  bool write_residuals = true;

  // rank
  int grid_m = 512;
  std::string threshold_policy = "quantile";  // quantile|absolute
  double threshold_q = 0.90;
  double threshold_value = 0.0;
  bool threshold_global = false;
  int top_k = 70;
  std::string plots = "topk";  // none|topk|all

  // synth
  std::uint64_t seed = 1;
  int synth_n_samples = 50;
  int synth_n_elements = 20;
  std::string synth_planted;  // comma-separated element indices (1-based)
  std::string synth_centers = "6000";
  double synth_width = 300.0;
  double synth_amplitude = 3.0;
  std::string synth_baseline = "constant";
  double synth_baseline_level = 10.0;
  double synth_power = 1.5;
  double synth_dispersion = 0.1;
  double synth_length = 12000.0;
  std::string synth_site = "synthetic";
  std::string synth_material = "synthetic";

  std::string hash() const { return hex16(fnv1a64(resolved.to_text())); }

  double element_lambda(const std::string& element, bool& fixed) const;
  double element_power(const std::string& element) const;
  std::vector<double> lambda_grid() const;
};

RunConfig resolve_run_config(const KeyValues& user);

}  // namespace tmine
