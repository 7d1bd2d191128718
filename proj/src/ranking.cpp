#include "tmine/ranking.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

bool ranked_before(const RankedPair& a, const RankedPair& b) {
  if (a.c != b.c) return a.c > b.c;
  if (a.material != b.material) return a.material < b.material;
  if (a.element1 != b.element1) return a.element1 < b.element1;
  return a.element2 < b.element2;
}

std::vector<RankedPair> collect_pairs(const CValueMatrix& m) {
  std::vector<RankedPair> pairs;
  const int d = int(m.element_names.size());
  pairs.reserve(std::size_t(d) * (d - 1) / 2);
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      pairs.push_back({m.element_names[i], m.element_names[j], m.C(i, j), m.material});
  return pairs;
}

}  // namespace

CValueMatrix c_matrix(const std::vector<CurvatureProfile>& profiles,
                      const std::vector<std::string>& element_names,
                      const std::string& material) {
  const int d = int(element_names.size());
  std::map<std::string, int> index;
  for (int i = 0; i < d; ++i) {
    if (!index.emplace(element_names[i], i).second)
      throw input_error("duplicate element name: " + element_names[i]);
  }

  CValueMatrix m;
  m.material = material;
  m.element_names = element_names;
  m.C = Eigen::MatrixXd::Zero(d, d);

  std::vector<std::vector<bool>> seen(d, std::vector<bool>(d, false));
  for (const auto& p : profiles) {
    const auto it1 = index.find(p.element1);
    const auto it2 = index.find(p.element2);
    if (it1 == index.end() || it2 == index.end())
      throw input_error("profile references unknown element '" +
                        (it1 == index.end() ? p.element1 : p.element2) + "'");
    const int i = it1->second, j = it2->second;
    if (i == j) throw input_error("profile pairs an element with itself: " + p.element1);
    if (seen[i][j])
      throw input_error("duplicate profile for pair " + p.element1 + "/" + p.element2);
    seen[i][j] = seen[j][i] = true;
    m.C(i, j) = p.c;
    m.C(j, i) = p.c;
  }

  std::string gaps;
  for (int i = 0; i < d; ++i)
    for (int j = i + 1; j < d; ++j)
      if (!seen[i][j]) {
        if (!gaps.empty()) gaps += ", ";
        gaps += element_names[i] + "/" + element_names[j];
      }
  if (!gaps.empty()) throw input_error("missing pair profiles: " + gaps);
  return m;
}

RankedPairs top_k(const CValueMatrix& matrix, int k) {
  if (k < 1) throw input_error("top_k requires k >= 1");
  RankedPairs out;
  out.material = matrix.material;
  out.pairs = collect_pairs(matrix);
  std::sort(out.pairs.begin(), out.pairs.end(), ranked_before);
  if (int(out.pairs.size()) > k) out.pairs.resize(std::size_t(k));
  for (auto& p : out.pairs) p.material.clear();
  return out;
}

RankedPairs top_k(const std::vector<CValueMatrix>& matrices, int k) {
  if (k < 1) throw input_error("top_k requires k >= 1");
  RankedPairs out;
  out.material = "(all)";
  for (const auto& m : matrices) {
    auto pairs = collect_pairs(m);
    out.pairs.insert(out.pairs.end(), pairs.begin(), pairs.end());
  }
  std::sort(out.pairs.begin(), out.pairs.end(), ranked_before);
  if (int(out.pairs.size()) > k) out.pairs.resize(std::size_t(k));
  return out;
}

std::vector<PathfinderScore> pathfinder_scores(const CValueMatrix& matrix) {
  const int d = int(matrix.element_names.size());
  std::vector<PathfinderScore> scores;
  scores.reserve(std::size_t(d));
  for (int i = 0; i < d; ++i) {
    PathfinderScore s;
    s.element = matrix.element_names[i];
    double sum = 0.0, mx = 0.0;
    for (int j = 0; j < d; ++j) {
      if (j == i) continue;
      sum += matrix.C(i, j);
      mx = std::max(mx, matrix.C(i, j));
    }
    s.row_mean = d > 1 ? sum / double(d - 1) : 0.0;
    s.row_max = mx;
    scores.push_back(std::move(s));
  }
  std::sort(scores.begin(), scores.end(),
            [](const PathfinderScore& a, const PathfinderScore& b) {
              if (a.row_mean != b.row_mean) return a.row_mean > b.row_mean;
              return a.element < b.element;
            });
  return scores;
}

MaterialComparison material_comparison(const std::vector<RankedPairs>& per_material,
                                       int k) {
  if (k < 1) throw input_error("material comparison requires k >= 1");
  if (per_material.empty())
    throw input_error("material comparison requires at least one material");

  MaterialComparison cmp;
  std::vector<const RankedPairs*> usable;
  for (const auto& rp : per_material) {
    if (rp.pairs.empty())
      cmp.excluded.push_back(rp.material);
    else
      usable.push_back(&rp);
  }
  if (usable.empty())
    throw input_error("material comparison: no material has ranked pairs");

  cmp.c = Eigen::MatrixXd::Constant(k, int(usable.size()),
                                    std::numeric_limits<double>::quiet_NaN());
  for (int m = 0; m < int(usable.size()); ++m) {
    cmp.materials.push_back(usable[m]->material);
    const auto& pairs = usable[m]->pairs;
    for (int r = 0; r < k && r < int(pairs.size()); ++r)
      cmp.c(r, m) = pairs[std::size_t(r)].c;
  }
  return cmp;
}

}  // namespace tmine
