#include "tmine/curvature.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

void check_same_domain(const FittedCurve& a, const FittedCurve& b) {
  const double span = std::max(a.basis.span(), 1e-300);
  if (std::abs(a.basis.domain_min() - b.basis.domain_min()) > 1e-9 * span ||
      std::abs(a.basis.domain_max() - b.basis.domain_max()) > 1e-9 * span)
    throw input_error("log-ratio requires fits on the same domain");
}

double range_to_k(const Eigen::VectorXd& g) {
  const double range = g.maxCoeff() - g.minCoeff();
  return range >= 1e-12 ? 1.0 / range : 0.0;
}

}  // namespace

PairGrid make_pair_grid(const SplineBasis& basis, int m) {
  if (m < 16) throw input_error("pair grid needs at least 16 points");
  PairGrid grid;
  grid.u = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
  const double lo = basis.domain_min();
  grid.span = basis.span();
  Eigen::VectorXd x = lo + grid.span * grid.u.array();
  x[m - 1] = basis.domain_max();
  grid.B0 = design_matrix(basis, x, 0);
  grid.B1 = design_matrix(basis, x, 1);
  grid.B2 = design_matrix(basis, x, 2);
  grid.knots = basis.knots;
  grid.degree = basis.degree;
  return grid;
}

LogRatioCurve logratio_curve(const FittedCurve& fit1, const FittedCurve& fit2,
                             const PairGrid& grid) {
  const auto same_knots = [&grid](const SplineBasis& b) {
    return b.degree == grid.degree && b.knots.size() == grid.knots.size() &&
           b.knots == grid.knots;
  };
  if (!same_knots(fit1.basis) || !same_knots(fit2.basis))
    throw input_error("pair grid was built for a different basis");
  LogRatioCurve curve;
  curve.u = grid.u;
  const Eigen::VectorXd delta = fit1.coefficients - fit2.coefficients;
  curve.g = grid.B0 * delta;
  curve.g1 = grid.span * (grid.B1 * delta);
  curve.g2 = grid.span * grid.span * (grid.B2 * delta);
  curve.k = range_to_k(curve.g);
  return curve;
}

LogRatioCurve logratio_curve(const FittedCurve& fit1, const FittedCurve& fit2,
                             int m) {
  if (m < 16) throw input_error("log-ratio grid needs at least 16 points");
  check_same_domain(fit1, fit2);

  LogRatioCurve curve;
  curve.u = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
  curve.g.resize(m);
  curve.g1.resize(m);
  curve.g2.resize(m);
  const double lo = fit1.basis.domain_min();
  const double span = fit1.basis.span();
  for (int i = 0; i < m; ++i) {
    const double x = (i == m - 1) ? fit1.basis.domain_max() : lo + span * curve.u[i];
    curve.g[i] = evaluate(fit1, x, 0) - evaluate(fit2, x, 0);
    curve.g1[i] = span * (evaluate(fit1, x, 1) - evaluate(fit2, x, 1));
    curve.g2[i] = span * span * (evaluate(fit1, x, 2) - evaluate(fit2, x, 2));
  }
  curve.k = range_to_k(curve.g);
  return curve;
}

Eigen::VectorXd curvature_of(const LogRatioCurve& curve) {
  const Eigen::Index m = curve.g.size();
  if (curve.degenerate()) return Eigen::VectorXd::Zero(m);
  Eigen::VectorXd kappa(m);
  for (Eigen::Index i = 0; i < m; ++i) {
    const double kg1 = curve.k * curve.g1[i];
    const double kg2 = curve.k * curve.g2[i];
    kappa[i] = std::abs(kg2) / std::pow(1.0 + kg1 * kg1, 1.5);
  }
  return kappa;
}

double pick_threshold(const Eigen::Ref<const Eigen::VectorXd>& kappa,
                      const ThresholdPolicy& policy) {
  if (kappa.size() == 0) throw input_error("cannot pick threshold: empty curvature");
  if (policy.kind == ThresholdPolicy::Kind::Absolute) {
    if (!(policy.value >= 0.0))
      throw input_error("absolute threshold must be >= 0");
    return policy.value;
  }
  if (!(policy.q > 0.0 && policy.q < 1.0))
    throw input_error("threshold quantile must lie in (0, 1)");
  std::vector<double> sorted(kappa.data(), kappa.data() + kappa.size());
  std::sort(sorted.begin(), sorted.end());
  const double h = policy.q * double(sorted.size() - 1);
  const auto lo = static_cast<std::size_t>(std::floor(h));
  if (lo + 1 >= sorted.size()) return sorted.back();
  return sorted[lo] + (h - double(lo)) * (sorted[lo + 1] - sorted[lo]);
}

std::vector<ExceedanceInterval> exceedance_intervals(
    const Eigen::Ref<const Eigen::VectorXd>& kappa,
    const Eigen::Ref<const Eigen::VectorXd>& u, double threshold) {
  if (kappa.size() != u.size())
    throw input_error("curvature and grid must have equal lengths");
  const Eigen::Index m = kappa.size();
  std::vector<ExceedanceInterval> intervals;

  Eigen::Index i = 0;
  while (i < m) {
    if (!(kappa[i] >= threshold)) {
      ++i;
      continue;
    }
    ExceedanceInterval iv;
    iv.first = int(i);
    Eigen::Index j = i;
    while (j + 1 < m && kappa[j + 1] >= threshold) ++j;
    iv.last = int(j);

    // Interpolated crossing before the run, or the domain boundary itself.
    if (i == 0) {
      iv.u_lo = u[0];
    } else {
      const double frac = (threshold - kappa[i - 1]) / (kappa[i] - kappa[i - 1]);
      iv.u_lo = u[i - 1] + frac * (u[i] - u[i - 1]);
    }
    if (j == m - 1) {
      iv.u_hi = u[m - 1];
    } else {
      const double frac = (kappa[j] - threshold) / (kappa[j] - kappa[j + 1]);
      iv.u_hi = u[j] + frac * (u[j + 1] - u[j]);
    }

    for (Eigen::Index t = i; t <= j; ++t) {
      const double exc = kappa[t] - threshold;
      if (exc > 0.0) iv.peak = std::max(iv.peak, exc * exc);
    }
    // A tangential touch (peak 0) is not a crossing; skip it.
    if (iv.peak > 0.0) intervals.push_back(iv);
    i = j + 1;
  }
  return intervals;
}

double c_value(const Eigen::Ref<const Eigen::VectorXd>& kappa, double threshold,
               const std::vector<ExceedanceInterval>& intervals) {
  if (intervals.empty()) return 0.0;
  const double L = 2.0 * double(intervals.size());
  double sum = 0.0;
  for (const auto& iv : intervals) {
    double peak = 0.0;
    for (int t = iv.first; t <= iv.last && t < kappa.size(); ++t) {
      const double exc = std::max(kappa[t] - threshold, 0.0);
      peak = std::max(peak, exc * exc);
    }
    sum += peak;
  }
  return 2.0 / L * sum;
}

CurvatureProfile profile_pair(const FittedCurve& fit1, const FittedCurve& fit2,
                              const std::string& element1,
                              const std::string& element2,
                              const ProfileConfig& config, double x_phys_min,
                              double x_phys_max,
                              const Eigen::Ref<const Eigen::VectorXd>& sample_positions,
                              const PairGrid* grid) {
  const LogRatioCurve curve = grid ? logratio_curve(fit1, fit2, *grid)
                                   : logratio_curve(fit1, fit2, config.m);
  CurvatureProfile profile;
  profile.element1 = element1;
  profile.element2 = element2;
  profile.u = curve.u;
  profile.g = curve.g;
  profile.k = curve.k;
  profile.kappa = curvature_of(curve);
  const double phys_span = x_phys_max - x_phys_min;
  profile.x = x_phys_min + phys_span * curve.u.array();

  profile.threshold = pick_threshold(profile.kappa, config.threshold);
  profile.intervals = exceedance_intervals(profile.kappa, profile.u, profile.threshold);
  profile.c = c_value(profile.kappa, profile.threshold, profile.intervals);

  for (const auto& iv : profile.intervals)
    profile.x_intervals.emplace_back(x_phys_min + phys_span * iv.u_lo,
                                     x_phys_min + phys_span * iv.u_hi);
  for (Eigen::Index s = 0; s < sample_positions.size(); ++s) {
    const double pos = sample_positions[s];
    for (const auto& [lo, hi] : profile.x_intervals) {
      if (pos >= lo && pos <= hi) {
        profile.flagged_samples.push_back(int(s));
        break;
      }
    }
  }
  return profile;
}

}  // namespace tmine
