#include "tmine/gam.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

#include <Eigen/Cholesky>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

constexpr double kInf = std::numeric_limits<double>::infinity();

double penalized_objective_at(const Eigen::MatrixXd& B,
                              const Eigen::MatrixXd& S,
                              const Eigen::Ref<const Eigen::VectorXd>& y,
                              const Eigen::Ref<const Eigen::VectorXd>& w,
                              double p, double lambda,
                              const Eigen::VectorXd& beta) {
  const Eigen::VectorXd eta = B * beta;
  double dev = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i) {
    const double mu = std::exp(eta[i]);
    if (!(mu > 0.0) || std::isnan(mu)) return kInf;
    dev += w[i] * tweedie_unit_deviance(y[i], mu, p);
    if (!std::isfinite(dev)) return kInf;
  }
  return dev + 2.0 * lambda * beta.dot(S * beta);
}

// Square root of the penalty: S = C'C. Null-space eigenvalues come out of
// the eigensolver at roundoff size, and a large lambda would amplify them
// into a phantom penalty on affine fits, so anything below a relative
// threshold is clamped to exactly zero.
Eigen::MatrixXd penalty_sqrt(const Eigen::MatrixXd& S) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(S);
  const double cutoff = 1e-12 * std::max(es.eigenvalues().maxCoeff(), 0.0);
  Eigen::VectorXd roots = es.eigenvalues();
  for (Eigen::Index i = 0; i < roots.size(); ++i)
    roots[i] = roots[i] > cutoff ? std::sqrt(roots[i]) : 0.0;
  return roots.asDiagonal() * es.eigenvectors().transpose();
}

// One penalized weighted least-squares step,
//   min || Wsqrt (z - B beta) ||^2 + 2 lambda || C beta ||^2,
// solved through the augmented QR factorization (well conditioned even for
// extreme lambda, where the normal equations lose half the digits). Ridge
// rows are appended on escalation when the solve degenerates.
double solve_penalized_ls(const Eigen::MatrixXd& B, const Eigen::MatrixXd& C,
                          const Eigen::VectorXd& wsqrt, const Eigen::VectorXd& z,
                          double lambda, Eigen::VectorXd& x) {
  const Eigen::Index n = B.rows();
  const Eigen::Index nb = B.cols();
  double ridge = 0.0;
  while (true) {
    const Eigen::Index rows = n + nb + (ridge > 0.0 ? nb : 0);
    Eigen::MatrixXd M = Eigen::MatrixXd::Zero(rows, nb);
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(rows);
    M.topRows(n) = wsqrt.asDiagonal() * B;
    rhs.head(n) = wsqrt.cwiseProduct(z);
    M.middleRows(n, nb) = std::sqrt(2.0 * lambda) * C;
    if (ridge > 0.0)
      M.bottomRows(nb) =
          std::sqrt(ridge) * Eigen::MatrixXd::Identity(nb, nb);
    x = M.colPivHouseholderQr().solve(rhs);
    if (x.allFinite()) return ridge;
    if (ridge >= 1e-2)
      throw numeric_error(
          "singular penalized normal equations after ridge escalation");
    ridge = (ridge == 0.0) ? 1e-10 : ridge * 10.0;
  }
}

}  // namespace

double FittedCurve::eval(double x, int order) const {
  return evaluate(*this, x, order);
}

double evaluate(const FittedCurve& curve, double x, int order) {
  if (order < 0 || order > 2)
    throw input_error("derivative order must be 0, 1 or 2");
  const double lo = curve.basis.domain_min();
  const double hi = curve.basis.domain_max();
  const double tol = 1e-9 * std::max(1.0, hi - lo);
  if (x < lo - tol || x > hi + tol)
    throw input_error("extrapolation outside the fitted domain");
  return basis_row(curve.basis, x, order).dot(curve.coefficients);
}

FittedCurve fit_gam(const Eigen::Ref<const Eigen::VectorXd>& y,
                    const Eigen::Ref<const Eigen::VectorXd>& x,
                    const Eigen::Ref<const Eigen::VectorXd>& weights,
                    const SplineBasis& basis, const FamilyConfig& family,
                    double lambda, const FitOptions& options) {
  const Eigen::Index n = y.size();
  if (x.size() != n || weights.size() != n)
    throw input_error("fit_gam: y, positions and weights must have equal lengths");
  if (n < 2) throw input_error("fit_gam: need at least two observations");
  for (Eigen::Index i = 0; i < n; ++i) {
    if (!(y[i] > 0.0) || !std::isfinite(y[i]))
      throw input_error("fit_gam: responses must be finite and > 0");
    if (!(weights[i] >= 0.0) || !std::isfinite(weights[i]))
      throw input_error("fit_gam: weights must be finite and >= 0");
  }
  if (!(lambda >= 0.0) || !std::isfinite(lambda))
    throw input_error("fit_gam: lambda must be finite and >= 0");
  const double p = family.power;
  if (!(p >= 1.0 && p <= 2.0))
    throw input_error("fit_gam: tweedie power must lie in [1, 2]");

  const Eigen::MatrixXd B = design_matrix(basis, x);
  const Eigen::MatrixXd C = penalty_sqrt(penalty_matrix(basis));
  // PSD form of the penalty with an exact affine null space; identical to
  // the assembled matrix up to roundoff.
  const Eigen::MatrixXd S = C.transpose() * C;
  const int nb = basis.n_basis;

  auto objective = [&](const Eigen::VectorXd& beta) {
    return penalized_objective_at(B, S, y, weights, p, lambda, beta);
  };

  FittedCurve fit;
  fit.basis = basis;
  fit.family = family;
  fit.lambda = lambda;

  // mu-start at the data themselves; the first sweep solves the working
  // system built at mu = y without a previous beta.
  Eigen::VectorXd eta = y.array().log();
  Eigen::VectorXd beta = Eigen::VectorXd::Zero(nb);
  double obj = kInf;
  bool have_beta = false;

  Eigen::VectorXd mu(n), wk(n), z(n);
  int iter = 0;
  for (; iter < options.max_iter; ++iter) {
    mu = eta.array().exp();
    for (Eigen::Index i = 0; i < n; ++i) {
      wk[i] = weights[i] * std::pow(mu[i], 2.0 - p);
      z[i] = eta[i] + (y[i] - mu[i]) / mu[i];
    }
    Eigen::VectorXd candidate;
    const double ridge =
        solve_penalized_ls(B, C, wk.cwiseSqrt(), z, lambda, candidate);
    fit.ridge_used = std::max(fit.ridge_used, ridge);

    if (!have_beta) {
      double cobj = objective(candidate);
      if (!std::isfinite(cobj)) {
        // Pathological first step: restart from the constant fit, which is
        // always feasible (partition of unity puts constants in the span).
        const double wsum = weights.sum();
        const double ybar = (wsum > 0.0) ? weights.dot(y) / wsum : y.mean();
        candidate.setConstant(std::log(std::max(ybar, 1e-300)));
        cobj = objective(candidate);
      }
      beta = candidate;
      obj = cobj;
      have_beta = true;
      fit.objective_trace.push_back(obj);
      eta = B * beta;
      continue;
    }

    // Step halving keeps the penalized deviance nonincreasing.
    const Eigen::VectorXd direction = candidate - beta;
    double t = 1.0;
    double new_obj = objective(beta + direction);
    while (!(new_obj <= obj) && t > 1e-12) {
      t *= 0.5;
      new_obj = objective(beta + t * direction);
    }
    if (!(new_obj <= obj)) {
      // No improving step exists at working precision: numerical optimum.
      fit.converged = true;
      break;
    }
    beta += t * direction;
    eta = B * beta;
    const double change = obj - new_obj;
    obj = new_obj;
    fit.objective_trace.push_back(obj);
    if (change <= options.tol * std::max(std::abs(obj) + change, 1e-12)) {
      fit.converged = true;
      ++iter;
      break;
    }
  }

  fit.coefficients = beta;
  fit.iterations = iter;
  fit.penalized_objective = obj;

  // Final-state summaries: deviance, edf from the influence matrix of the
  // last working system, Pearson dispersion, GCV and gradient norm.
  mu = (B * beta).array().exp();
  fit.deviance = tweedie_total_deviance(y, mu, weights, p);

  for (Eigen::Index i = 0; i < n; ++i)
    wk[i] = weights[i] * std::pow(mu[i], 2.0 - p);
  Eigen::MatrixXd BtWB = B.transpose() * wk.asDiagonal() * B;
  Eigen::MatrixXd A = BtWB + 2.0 * lambda * S;
  if (fit.ridge_used > 0.0) A.diagonal().array() += fit.ridge_used;
  fit.edf = A.ldlt().solve(BtWB).trace();

  double pearson = 0.0;
  for (Eigen::Index i = 0; i < n; ++i)
    pearson += weights[i] * (y[i] - mu[i]) * (y[i] - mu[i]) / std::pow(mu[i], p);
  fit.family.dispersion =
      std::max(pearson / std::max(double(n) - fit.edf, 1e-8), 1e-12);

  const double denom = double(n) - options.gcv_gamma * fit.edf;
  fit.gcv_score = (denom > 1e-9) ? double(n) * fit.deviance / (denom * denom) : kInf;

  Eigen::VectorXd v(n);
  for (Eigen::Index i = 0; i < n; ++i)
    v[i] = weights[i] * std::pow(mu[i], 1.0 - p) * (mu[i] - y[i]);
  fit.gradient_norm = (2.0 * B.transpose() * v + 4.0 * lambda * S * beta).norm();

  return fit;
}

LambdaSelection select_lambda(const Eigen::Ref<const Eigen::VectorXd>& y,
                              const Eigen::Ref<const Eigen::VectorXd>& x,
                              const Eigen::Ref<const Eigen::VectorXd>& weights,
                              const SplineBasis& basis,
                              const FamilyConfig& family,
                              const std::vector<double>& lambda_grid,
                              const FitOptions& options) {
  if (lambda_grid.empty()) throw input_error("lambda grid must not be empty");
  for (double l : lambda_grid)
    if (!(l >= 0.0) || !std::isfinite(l))
      throw input_error("lambda grid entries must be finite and >= 0");

  const double n = double(y.size());
  LambdaSelection sel;
  sel.curve.reserve(lambda_grid.size());
  bool any_valid = false;
  double best_gcv = kInf;
  double best_lambda = 0.0;

  for (double l : lambda_grid) {
    GcvPoint pt;
    pt.lambda = l;
    try {
      const FittedCurve fit = fit_gam(y, x, weights, basis, family, l, options);
      pt.edf = fit.edf;
      pt.gcv = fit.gcv_score;
      pt.valid = std::isfinite(fit.gcv_score) && fit.edf < n - 1e-9;
    } catch (const numeric_error&) {
      pt.valid = false;
      pt.gcv = kInf;
    }
    sel.curve.push_back(pt);
    if (!pt.valid) continue;
    any_valid = true;
    if (pt.gcv < best_gcv || (pt.gcv == best_gcv && l > best_lambda)) {
      best_gcv = pt.gcv;
      best_lambda = l;
    }
  }

  if (!any_valid)
    throw numeric_error(
        "lambda selection failed: effective df >= n on the whole grid "
        "(basis too rich)");
  sel.lambda = best_lambda;
  return sel;
}

}  // namespace tmine
