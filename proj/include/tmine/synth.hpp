#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "tmine/ingest.hpp"
#include "tmine/ranking.hpp"

namespace tmine {

/// Synthetic transect generator: smooth positive baselines per element,
/// multiplicative Gaussian bumps at the anomaly centers for the planted
/// elements, observation noise from a compound Poisson-gamma construction
/// consistent with the Tweedie variance function at (power, dispersion).
struct SynthConfig {
  std::uint64_t seed = 1;
  int n_samples = 50;
  int n_elements = 20;
  std::vector<int> planted_elements;      // indices into the element list
  std::vector<double> anomaly_centers;    // meters along the transect
  double anomaly_width = 300.0;           // Gaussian sigma, meters
  double anomaly_amplitude = 3.0;         // multiplicative factor > 1 at the center

  enum class Baseline { Constant, Linear, Sinusoid };
  Baseline baseline = Baseline::Constant;
  double baseline_level = 10.0;

  double noise_power = 1.5;       // Tweedie p in [1,2]
  double noise_dispersion = 0.1;  // Tweedie phi > 0
  double transect_length = 12000.0;  // meters

  std::string site_id = "synthetic";
  std::string material = "synthetic";
  int n_traverses = 3;
  double traverse_spacing = 300.0;  // perpendicular offset between traverses
};

struct GroundTruth {
  std::vector<std::string> planted_elements;
  std::vector<std::pair<double, double>> intervals;  // transect coordinates
};

std::pair<SampleTable, GroundTruth> generate(const SynthConfig& config);

struct RecoveryMetrics {
  double top_k_planted_fraction = 0.0;  // top-k pairs containing a planted element
  std::optional<double> jaccard_top_pair;  // flagged vs true anomaly intervals
};

/// Scores how well a ranking recovers the planted signal. The Jaccard index
/// compares the union of the top pair's flagged physical intervals with the
/// union of the true anomaly intervals; absent when the truth is empty.
RecoveryMetrics score_recovery(const RankedPairs& ranked,
                               const std::vector<CurvatureProfile>& profiles,
                               const GroundTruth& truth, int k);

/// Length of the union, and Jaccard index of two interval unions.
double interval_union_length(std::vector<std::pair<double, double>> intervals);
double interval_jaccard(const std::vector<std::pair<double, double>>& a,
                        const std::vector<std::pair<double, double>>& b);

}  // namespace tmine
