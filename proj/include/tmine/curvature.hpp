#pragma once

#include <string>
#include <vector>

#include <Eigen/Dense>

#include "tmine/gam.hpp"

namespace tmine {

/// Log-ratio of two fitted curves on an even grid, differentiated with
/// respect to the normalized coordinate u = (x - x_min)/(x_max - x_min).
/// Under the log link g(x) = eta_1(x) - eta_2(x) exactly.
struct LogRatioCurve {
  Eigen::VectorXd u;   // m points, 0..1
  Eigen::VectorXd g;   // log f1 - log f2
  Eigen::VectorXd g1;  // dg/du
  Eigen::VectorXd g2;  // d2g/du2
  double k = 0.0;      // 1 / range(g); 0 flags a degenerate (constant) curve

  bool degenerate() const { return k == 0.0; }
};

/// Basis evaluations cached on an even m-point grid; lets the all-pairs
/// sweep reuse one set of design matrices when every element of a transect
/// shares the same basis.
struct PairGrid {
  Eigen::VectorXd u;
  Eigen::MatrixXd B0, B1, B2;  // m x n_basis, derivatives w.r.t. x
  double span = 1.0;           // basis domain width (chain-rule factor)
  Eigen::VectorXd knots;       // identity check against the fits
  int degree = 3;
};

PairGrid make_pair_grid(const SplineBasis& basis, int m);

LogRatioCurve logratio_curve(const FittedCurve& fit1, const FittedCurve& fit2,
                             int m = 512);
LogRatioCurve logratio_curve(const FittedCurve& fit1, const FittedCurve& fit2,
                             const PairGrid& grid);

/// kappa(u) = |k g''(u)| / (1 + (k g'(u))^2)^{3/2}; identically zero for
/// degenerate curves.
Eigen::VectorXd curvature_of(const LogRatioCurve& curve);

struct ThresholdPolicy {
  enum class Kind { Quantile, Absolute };
  Kind kind = Kind::Quantile;
  double q = 0.90;     // quantile over the kappa grid
  double value = 0.0;  // absolute threshold
};

/// Empirical q-quantile (linear interpolation over the sorted grid values)
/// or the absolute value unchanged.
double pick_threshold(const Eigen::Ref<const Eigen::VectorXd>& kappa,
                      const ThresholdPolicy& policy);

/// One maximal run with kappa >= threshold. Endpoints are refined by linear
/// interpolation between adjacent grid points; a run touching the domain
/// boundary starts or ends exactly there. peak = max (kappa - T)+^2 over
/// the run's grid points.
struct ExceedanceInterval {
  double u_lo = 0.0;
  double u_hi = 0.0;
  int first = 0;  // inclusive grid-index range of the run
  int last = 0;
  double peak = 0.0;
};

/// Maximal runs where kappa >= threshold, dropping tangential touches whose
/// peak exceedance is zero (a touch is not a crossing, so it contributes
/// nothing to the c-value and would only distort the crossing count L).
std::vector<ExceedanceInterval> exceedance_intervals(
    const Eigen::Ref<const Eigen::VectorXd>& kappa,
    const Eigen::Ref<const Eigen::VectorXd>& u, double threshold);

/// c = (2/L) sum over intervals of the peak squared exceedance, L = 2 x
/// number of intervals; zero when no interval exceeds the threshold.
double c_value(const Eigen::Ref<const Eigen::VectorXd>& kappa, double threshold,
               const std::vector<ExceedanceInterval>& intervals);

struct ProfileConfig {
  int m = 512;
  ThresholdPolicy threshold;
};

/// Full per-pair result, with exceedance intervals mapped to physical
/// positions and sample points inside them flagged as predicted
/// mineralization.
struct CurvatureProfile {
  std::string element1, element2;
  Eigen::VectorXd u;      // grid in [0,1]
  Eigen::VectorXd x;      // grid in physical transect coordinates
  Eigen::VectorXd g;
  Eigen::VectorXd kappa;
  double k = 0.0;
  double threshold = 0.0;
  double c = 0.0;
  std::vector<ExceedanceInterval> intervals;       // u coordinates
  std::vector<std::pair<double, double>> x_intervals;  // physical coordinates
  std::vector<int> flagged_samples;  // indices into sample_positions
};

CurvatureProfile profile_pair(const FittedCurve& fit1, const FittedCurve& fit2,
                              const std::string& element1,
                              const std::string& element2,
                              const ProfileConfig& config, double x_phys_min,
                              double x_phys_max,
                              const Eigen::Ref<const Eigen::VectorXd>& sample_positions,
                              const PairGrid* grid = nullptr);

}  // namespace tmine
