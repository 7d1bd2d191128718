#pragma once

#include <string>

#include "tmine/curvature.hpp"
#include "tmine/ranking.hpp"

namespace tmine {

/// Curvature plot for one pair: kappa over the transect, dashed threshold
/// line, flagged sample positions as blue points.
std::string svg_curvature_plot(const CurvatureProfile& profile,
                               const Eigen::Ref<const Eigen::VectorXd>& sample_positions,
                               const std::string& material,
                               const std::string& config_hash);

/// Symmetric heatmap, sequential blue scale (darker = larger) linear over
/// [0, vmax]; vmax is shared across the figure set for comparability.
std::string svg_heatmap(const CValueMatrix& matrix, double vmax,
                        const std::string& config_hash);

/// Top-k c-values per material as one line each.
std::string svg_comparison(const MaterialComparison& cmp,
                           const std::string& config_hash);

}  // namespace tmine
