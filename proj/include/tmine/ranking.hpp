#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmine/curvature.hpp"

namespace tmine {

/// Symmetric per-material matrix of c-values, zero diagonal, entries stored
/// once per unordered pair so symmetry is exact.
struct CValueMatrix {
  std::string material;
  std::vector<std::string> element_names;
  Eigen::MatrixXd C;
};

CValueMatrix c_matrix(const std::vector<CurvatureProfile>& profiles,
                      const std::vector<std::string>& element_names,
                      const std::string& material);

struct RankedPair {
  std::string element1, element2;
  double c = 0.0;
  std::string material;  // set by the pooled overload
};

struct RankedPairs {
  std::string material;
  std::vector<RankedPair> pairs;  // c descending, ties by pair label
};

/// k largest unordered-pair c-values; returns all pairs when k exceeds the
/// pair count. Ties break lexicographically by pair label so reports are
/// byte-reproducible.
RankedPairs top_k(const CValueMatrix& matrix, int k);
RankedPairs top_k(const std::vector<CValueMatrix>& matrices, int k);

struct PathfinderScore {
  std::string element;
  double row_mean = 0.0;  // mean of the element's row, diagonal excluded
  double row_max = 0.0;
};

/// Elements sorted by descending row mean; a consistently dark heatmap row.
std::vector<PathfinderScore> pathfinder_scores(const CValueMatrix& matrix);

/// rank (1..k) x material table of c-values for the cross-material line
/// plot; missing ranks are NaN-padded. Materials without any ranked pair
/// are excluded and reported.
struct MaterialComparison {
  std::vector<std::string> materials;
  Eigen::MatrixXd c;  // k x #materials
  std::vector<std::string> excluded;
};

MaterialComparison material_comparison(const std::vector<RankedPairs>& per_material,
                                       int k);

}  // namespace tmine
