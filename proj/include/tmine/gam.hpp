#pragma once

#include <vector>

#include <Eigen/Dense>

#include "tmine/bspline.hpp"
#include "tmine/tweedie.hpp"

namespace tmine {

/// One element's penalized Tweedie GAM fit on a B-spline basis with log
/// link. eta(x) = sum_j beta_j B_j(x), mu(x) = exp(eta(x)).
struct FittedCurve {
  SplineBasis basis;
  Eigen::VectorXd coefficients;
  FamilyConfig family;
  double lambda = 0.0;
  double gcv_score = 0.0;
  bool converged = false;
  int iterations = 0;

  // Fit diagnostics (not part of the serialized schema's required fields).
  double deviance = 0.0;             // total weighted deviance at the fit
  double penalized_objective = 0.0;  // deviance + 2*lambda*beta'S beta
  double edf = 0.0;                  // trace of the influence matrix
  double gradient_norm = 0.0;        // penalized-deviance gradient at beta
  double ridge_used = 0.0;           // largest ridge added during IRLS
  std::vector<double> objective_trace;

  double eval(double x, int order = 0) const;
};

struct FitOptions {
  double tol = 1e-8;
  int max_iter = 200;
  // Effective-df cost factor in the GCV denominator, n D / (n - gamma tr H)^2.
  // 1.0 is plain GCV; ~1.4 discourages its occasional undersmoothing.
  double gcv_gamma = 1.0;
};

/// Minimizes sum_i w_i d(y_i, exp(eta(x_i)), p) + 2 lambda beta' S beta by
/// iteratively reweighted penalized least squares (working weight
/// w_i mu_i^{2-p}), with step halving so the objective never increases and
/// ridge escalation (1e-10 growing x10 up to 1e-2) on singular working
/// systems. Stops on relative objective change < tol or max_iter sweeps.
FittedCurve fit_gam(const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& weights,
                    const SplineBasis& basis, const FamilyConfig& family,
                    double lambda, const FitOptions& options = {});

/// eta(x), eta'(x) or eta''(x) via analytic B-spline derivative recurrences.
/// Throws input_error when x lies outside the fitted domain.
double evaluate(const FittedCurve& curve, double x, int order = 0);

struct GcvPoint {
  double lambda = 0.0;
  double gcv = 0.0;
  double edf = 0.0;
  bool valid = false;  // false when edf >= n or the fit failed
};

struct LambdaSelection {
  double lambda = 0.0;
  std::vector<GcvPoint> curve;
};

/// GCV selection over a lambda grid: gcv = n D / (n - tr H)^2 with D the
/// total weighted deviance and H the influence matrix of the final IRLS
/// step. Ties prefer the larger lambda. Throws numeric_error when every
/// grid point has tr(H) >= n (basis too rich for the data).
LambdaSelection select_lambda(const Eigen::Ref<const Eigen::VectorXd>& y,
                              const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& weights,
                              const SplineBasis& basis,
                              const FamilyConfig& family,
                              const std::vector<double>& lambda_grid,
                              const FitOptions& options = {});

}  // namespace tmine
