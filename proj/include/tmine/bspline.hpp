#pragma once

#include <Eigen/Dense>

namespace tmine {

/// Clamped B-spline basis over a 1-D domain.
///
/// The knot vector carries (degree+1)-fold boundary knots, so the basis
/// spans all splines on [domain_min, domain_max] with the usual partition
/// of unity. n_basis = #interior knots + degree + 1.
struct SplineBasis {
  int degree = 3;
  Eigen::VectorXd knots;
  int n_basis = 0;

  double domain_min() const { return knots[degree]; }
  double domain_max() const { return knots[knots.size() - 1 - degree]; }
  double span() const { return domain_max() - domain_min(); }
};

/// Builds a clamped basis with interior knots at quantiles of `positions`.
/// Falls back to uniform interior knots when the quantiles collide (heavily
/// tied positions). Throws input_error on a degenerate domain.
SplineBasis build_basis(const Eigen::Ref<const Eigen::VectorXd>& positions,
                        int n_basis, int degree = 3);

/// Value (order 0) or analytic derivative (order >= 1) of the single basis
/// function B_{j,degree} on an arbitrary nondecreasing knot vector, by the
/// Cox-de Boor recursion. The rightmost nonempty span is treated as closed
/// so that evaluation at the last knot is well defined.
double bspline_value(const Eigen::Ref<const Eigen::VectorXd>& knots,
                     int degree, int j, double x, int order = 0);

/// All n_basis basis values (or order-th derivatives) at x.
/// x must lie in the basis domain up to a small tolerance.
Eigen::VectorXd basis_row(const SplineBasis& basis, double x, int order = 0);

/// Rows of basis_row stacked for each entry of x: size(x) x n_basis.
Eigen::MatrixXd design_matrix(const SplineBasis& basis,
                              const Eigen::Ref<const Eigen::VectorXd>& x,
                              int order = 0);

/// S_jk = integral of B_j'' B_k'' over the domain, assembled per knot span
/// with Gauss-Legendre quadrature of order 2*degree. Exact for the
/// piecewise-polynomial integrand, so beta'S'beta vanishes identically for
/// affine splines. Requires degree >= 2.
Eigen::MatrixXd penalty_matrix(const SplineBasis& basis);

/// Greville abscissae: xi_j = mean of knots t_{j+1}..t_{j+degree}.
/// Linear functions are reproduced exactly by beta_j = a*xi_j + b.
Eigen::VectorXd greville_abscissae(const SplineBasis& basis);

/// Gauss-Legendre nodes and weights on [-1, 1] (Golub-Welsch).
void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights);

}  // namespace tmine
