#pragma once

#include <string>
#include <utility>
#include <vector>

#include "tmine/config.hpp"
#include "tmine/curvature.hpp"
#include "tmine/gam.hpp"
#include "tmine/ingest.hpp"
#include "tmine/ranking.hpp"
#include "tmine/synth.hpp"

namespace tmine {

/// Fitted curves for every converged element of one transect. Fits live on
/// the normalized coordinate u in [0,1]; x_min/x_max map u back to meters.
struct FitBundle {
  std::string site_id;
  std::string material;
  double x_min = 0.0;
  double x_max = 1.0;
  Eigen::VectorXd sample_positions;  // physical, for flagging predictions
  std::vector<std::string> element_names;
  std::vector<FittedCurve> fits;
  std::vector<std::pair<std::string, std::string>> skipped;  // element, reason
  std::string config_hash;
};

std::string transect_to_json(const Transect& transect, const std::string& config_hash);
Transect transect_from_json(const std::string& text, const std::string& origin);

std::string fit_bundle_to_json(const FitBundle& bundle);
FitBundle fit_bundle_from_json(const std::string& text, const std::string& origin);

std::string ground_truth_to_json(const GroundTruth& truth, const std::string& config_hash);
GroundTruth ground_truth_from_json(const std::string& text, const std::string& origin);

std::string profile_to_json(const CurvatureProfile& profile, const std::string& config_hash);

/// CSV builders. Every report starts with a `# config <hash>` provenance line.
std::string samples_to_csv(const SampleTable& table);
std::string profile_to_csv(const CurvatureProfile& profile, const std::string& config_hash);
std::string heatmap_to_csv(const CValueMatrix& matrix, const std::string& config_hash);
std::string topk_to_csv(const RankedPairs& ranked, const std::string& config_hash);
std::string pathfinders_to_csv(const std::vector<PathfinderScore>& scores,
                               const std::string& config_hash);
std::string comparison_to_csv(const MaterialComparison& cmp, const std::string& config_hash);

/// Filesystem helpers (wrap stream failures into io_error).
void write_text_file(const std::string& path, const std::string& content);
std::string read_text_file(const std::string& path);

/// Deterministic shortest-ish numeric formatting for CSV ("%.17g" keeps
/// doubles round-trippable, "%.10g" for report values).
std::string format_full(double v);
std::string format_report(double v);

}  // namespace tmine
