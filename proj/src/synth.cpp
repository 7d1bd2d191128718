#include "tmine/synth.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <random>
#include <set>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::string element_name(int index) {
  const std::string num = std::to_string(index + 1);
  return "El" + std::string(num.size() < 2 ? 2 - num.size() : 0, '0') + num;
}

// Per-element baseline shape parameters, drawn once per generate() call so
// every element trends differently (as real element concentrations do).
struct BaselineShape {
  double slope = 0.0;      // Linear: factor (1 + slope * (u - 1/2))
  double amplitude = 0.0;  // Sinusoid
  double phase = 0.0;
};

double baseline_at(const SynthConfig& cfg, const BaselineShape& shape, double x) {
  const double u = x / cfg.transect_length;
  switch (cfg.baseline) {
    case SynthConfig::Baseline::Linear:
      return cfg.baseline_level * (1.0 + shape.slope * (u - 0.5));
    case SynthConfig::Baseline::Sinusoid:
      return cfg.baseline_level *
             (1.0 + shape.amplitude * std::sin(2.0 * kPi * u + shape.phase));
    case SynthConfig::Baseline::Constant:
    default:
      return cfg.baseline_level;
  }
}

double bump_factor(const SynthConfig& cfg, double x) {
  double factor = 1.0;
  for (double c : cfg.anomaly_centers) {
    const double z = (x - c) / cfg.anomaly_width;
    factor *= 1.0 + (cfg.anomaly_amplitude - 1.0) * std::exp(-0.5 * z * z);
  }
  return factor;
}

// Positive draw with Tweedie variance phi * mu^p. Compound Poisson-gamma
// for p in (1,2); the Poisson count is floored at one event so the sample
// stays strictly positive (the fitter only assumes the variance function).
double draw_positive_tweedie(std::mt19937_64& rng, double mu, double p, double phi) {
  if (p >= 2.0) {
    std::gamma_distribution<double> gamma(1.0 / phi, phi * mu);
    return std::max(gamma(rng), 1e-300);
  }
  if (p <= 1.0) {
    std::poisson_distribution<long> pois(mu / phi);
    return phi * double(std::max<long>(pois(rng), 1));
  }
  const double lambda = std::pow(mu, 2.0 - p) / (phi * (2.0 - p));
  const double alpha = (2.0 - p) / (p - 1.0);
  const double theta = phi * (p - 1.0) * std::pow(mu, p - 1.0);
  std::poisson_distribution<long> pois(lambda);
  const long events = std::max<long>(pois(rng), 1);
  std::gamma_distribution<double> gamma(alpha * double(events), theta);
  return std::max(gamma(rng), 1e-300);
}

}  // namespace

std::pair<SampleTable, GroundTruth> generate(const SynthConfig& cfg) {
  if (cfg.n_samples < 2) throw input_error("synth: n_samples must be >= 2");
  if (cfg.n_elements < 2) throw input_error("synth: n_elements must be >= 2");
  if (!(cfg.anomaly_amplitude >= 1.0))
    throw input_error("synth: anomaly amplitude must be >= 1");
  if (!(cfg.anomaly_width > 0.0)) throw input_error("synth: anomaly width must be > 0");
  if (!(cfg.transect_length > 0.0))
    throw input_error("synth: transect length must be > 0");
  if (!(cfg.noise_power >= 1.0 && cfg.noise_power <= 2.0))
    throw input_error("synth: noise power must lie in [1, 2]");
  if (!(cfg.noise_dispersion > 0.0))
    throw input_error("synth: noise dispersion must be > 0");
  if (cfg.n_traverses < 1) throw input_error("synth: need at least one traverse");
  std::set<int> planted(cfg.planted_elements.begin(), cfg.planted_elements.end());
  for (int e : planted)
    if (e < 0 || e >= cfg.n_elements)
      throw input_error("synth: planted element index out of range");
  for (double c : cfg.anomaly_centers)
    if (c < 0.0 || c > cfg.transect_length)
      throw input_error("synth: anomaly center outside the transect");

  std::mt19937_64 rng(cfg.seed);
  std::uniform_real_distribution<double> unif(0.0, 1.0);

  std::vector<double> positions(std::size_t(cfg.n_samples));
  for (auto& x : positions) x = unif(rng) * cfg.transect_length;
  std::sort(positions.begin(), positions.end());

  // Per-element baseline multipliers (lognormal around one) and trend
  // shapes, so pairwise log-ratios carry honest smooth structure even
  // without planted anomalies.
  std::normal_distribution<double> normal(0.0, 0.25);
  std::vector<double> level(std::size_t(cfg.n_elements));
  for (auto& l : level) l = std::exp(normal(rng));
  std::vector<BaselineShape> shape(std::size_t(cfg.n_elements));
  for (auto& s : shape) {
    s.slope = 2.0 * unif(rng) - 1.0;          // in [-1, 1]
    s.amplitude = 0.1 + 0.3 * unif(rng);      // in [0.1, 0.4]
    s.phase = 2.0 * kPi * unif(rng);
  }

  SampleTable table;
  for (int e = 0; e < cfg.n_elements; ++e)
    table.element_names.push_back(element_name(e));
  table.material_names.push_back(cfg.material);

  for (int i = 0; i < cfg.n_samples; ++i) {
    SampleRow row;
    row.site_id = cfg.site_id;
    row.material = cfg.material;
    const int traverse = i % cfg.n_traverses;
    row.traverse_id = "T" + std::to_string(traverse + 1);
    row.easting = positions[std::size_t(i)];
    row.northing = (double(traverse) - 0.5 * double(cfg.n_traverses - 1)) *
                   cfg.traverse_spacing;
    row.weight = 1.0;
    row.concentrations.reserve(std::size_t(cfg.n_elements));
    for (int e = 0; e < cfg.n_elements; ++e) {
      double mu =
          baseline_at(cfg, shape[std::size_t(e)], row.easting) * level[std::size_t(e)];
      if (planted.count(e)) mu *= bump_factor(cfg, row.easting);
      row.concentrations.push_back(CellValue::value(
          draw_positive_tweedie(rng, mu, cfg.noise_power, cfg.noise_dispersion)));
    }
    table.rows.push_back(std::move(row));
  }

  GroundTruth truth;
  for (int e : planted) truth.planted_elements.push_back(element_name(e));
  for (double c : cfg.anomaly_centers) {
    if (planted.empty()) break;
    truth.intervals.emplace_back(
        std::max(c - 2.0 * cfg.anomaly_width, 0.0),
        std::min(c + 2.0 * cfg.anomaly_width, cfg.transect_length));
  }
  return {std::move(table), std::move(truth)};
}

double interval_union_length(std::vector<std::pair<double, double>> iv) {
  std::sort(iv.begin(), iv.end());
  double total = 0.0, hi = -std::numeric_limits<double>::infinity();
  for (const auto& [a, b] : iv) {
    if (b <= hi) continue;
    total += b - std::max(a, hi);
    hi = b;
  }
  return total;
}

double interval_jaccard(const std::vector<std::pair<double, double>>& a,
                        const std::vector<std::pair<double, double>>& b) {
  // |A n B| = |A| + |B| - |A u B| on interval unions.
  std::vector<std::pair<double, double>> both = a;
  both.insert(both.end(), b.begin(), b.end());
  const double la = interval_union_length(a);
  const double lb = interval_union_length(b);
  const double lu = interval_union_length(both);
  if (lu <= 0.0) return 0.0;
  const double li = std::max(la + lb - lu, 0.0);
  return li / lu;
}

RecoveryMetrics score_recovery(const RankedPairs& ranked,
                               const std::vector<CurvatureProfile>& profiles,
                               const GroundTruth& truth, int k) {
  if (k < 1) throw input_error("score_recovery requires k >= 1");
  RecoveryMetrics metrics;
  if (truth.planted_elements.empty() || ranked.pairs.empty()) return metrics;

  const std::set<std::string> planted(truth.planted_elements.begin(),
                                      truth.planted_elements.end());
  const int considered = std::min<int>(k, int(ranked.pairs.size()));
  int hits = 0;
  for (int i = 0; i < considered; ++i) {
    const auto& p = ranked.pairs[std::size_t(i)];
    if (planted.count(p.element1) || planted.count(p.element2)) ++hits;
  }
  metrics.top_k_planted_fraction = double(hits) / double(considered);

  if (!truth.intervals.empty()) {
    const auto& top = ranked.pairs.front();
    for (const auto& profile : profiles) {
      const bool match = (profile.element1 == top.element1 &&
                          profile.element2 == top.element2) ||
                         (profile.element1 == top.element2 &&
                          profile.element2 == top.element1);
      if (!match) continue;
      metrics.jaccard_top_pair = interval_jaccard(profile.x_intervals, truth.intervals);
      break;
    }
  }
  return metrics;
}

}  // namespace tmine
