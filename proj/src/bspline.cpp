#include "tmine/bspline.hpp"

#include <algorithm>
#include <cmath>
#include <vector>

#include <Eigen/Eigenvalues>

#include "tmine/errors.hpp"

namespace tmine {

namespace {

// Half-open span [t_j, t_{j+1}), closed on the right when t_{j+1} is the
// final knot (so clamped bases evaluate at the right domain end).
bool span_contains(const Eigen::Ref<const Eigen::VectorXd>& t, int j, double x) {
  if (t[j] <= x && x < t[j + 1]) return true;
  return t[j] < t[j + 1] && x == t[j + 1] && t[j + 1] == t[t.size() - 1];
}

double cox_de_boor(const Eigen::Ref<const Eigen::VectorXd>& t, int d, int j,
                   double x) {
  if (d == 0) return span_contains(t, j, x) ? 1.0 : 0.0;
  double acc = 0.0;
  const double dl = t[j + d] - t[j];
  if (dl > 0.0) acc += (x - t[j]) / dl * cox_de_boor(t, d - 1, j, x);
  const double dr = t[j + d + 1] - t[j + 1];
  if (dr > 0.0) acc += (t[j + d + 1] - x) / dr * cox_de_boor(t, d - 1, j + 1, x);
  return acc;
}

double cox_de_boor_deriv(const Eigen::Ref<const Eigen::VectorXd>& t, int d,
                         int j, double x, int order) {
  if (order == 0) return cox_de_boor(t, d, j, x);
  if (d == 0) return 0.0;
  double acc = 0.0;
  const double dl = t[j + d] - t[j];
  if (dl > 0.0) acc += cox_de_boor_deriv(t, d - 1, j, x, order - 1) / dl;
  const double dr = t[j + d + 1] - t[j + 1];
  if (dr > 0.0) acc -= cox_de_boor_deriv(t, d - 1, j + 1, x, order - 1) / dr;
  return d * acc;
}

double clamp_to_domain(const SplineBasis& b, double x) {
  const double lo = b.domain_min();
  const double hi = b.domain_max();
  const double tol = 1e-9 * std::max(1.0, hi - lo);
  if (x < lo - tol || x > hi + tol)
    throw input_error("evaluation point outside basis domain");
  return std::clamp(x, lo, hi);
}

}  // namespace

double bspline_value(const Eigen::Ref<const Eigen::VectorXd>& knots, int degree,
                     int j, double x, int order) {
  if (degree < 0 || order < 0) throw input_error("degree and order must be nonnegative");
  if (j < 0 || j + degree + 1 >= knots.size())
    throw input_error("basis index out of range for knot vector");
  return cox_de_boor_deriv(knots, degree, j, x, order);
}

SplineBasis build_basis(const Eigen::Ref<const Eigen::VectorXd>& positions,
                        int n_basis, int degree) {
  if (degree < 1) throw input_error("spline degree must be >= 1");
  if (n_basis < degree + 2)
    throw input_error("n_basis must be at least degree + 2");
  if (positions.size() < 2) throw input_error("need at least two positions");

  std::vector<double> xs(positions.data(), positions.data() + positions.size());
  std::sort(xs.begin(), xs.end());
  const double lo = xs.front();
  const double hi = xs.back();
  if (!std::isfinite(lo) || !std::isfinite(hi))
    throw input_error("positions must be finite");
  const double span = hi - lo;
  if (!(span > 0.0))
    throw input_error("degenerate domain: positions span a single point");

  const int n_interior = n_basis - degree - 1;
  std::vector<double> interior(n_interior);
  for (int i = 0; i < n_interior; ++i) {
    const double q = double(i + 1) / double(n_interior + 1);
    const double h = q * double(xs.size() - 1);
    const auto k = static_cast<std::size_t>(std::floor(h));
    const double frac = h - double(k);
    interior[i] = (k + 1 < xs.size()) ? xs[k] + frac * (xs[k + 1] - xs[k]) : xs[k];
  }

  // Quantile knots can collide on heavily tied data; fall back to a uniform
  // interior grid, which is always strictly increasing.
  const double min_gap = 1e-10 * span;
  bool ok = true;
  double prev = lo;
  for (double t : interior) {
    if (!(t > prev + min_gap) || !(t < hi - min_gap)) {
      ok = false;
      break;
    }
    prev = t;
  }
  if (!ok) {
    for (int i = 0; i < n_interior; ++i)
      interior[i] = lo + span * double(i + 1) / double(n_interior + 1);
  }

  SplineBasis basis;
  basis.degree = degree;
  basis.n_basis = n_basis;
  basis.knots.resize(n_basis + degree + 1);
  int pos = 0;
  for (int i = 0; i <= degree; ++i) basis.knots[pos++] = lo;
  for (double t : interior) basis.knots[pos++] = t;
  for (int i = 0; i <= degree; ++i) basis.knots[pos++] = hi;
  return basis;
}

Eigen::VectorXd basis_row(const SplineBasis& basis, double x, int order) {
  const double xc = clamp_to_domain(basis, x);
  Eigen::VectorXd row(basis.n_basis);
  for (int j = 0; j < basis.n_basis; ++j)
    row[j] = bspline_value(basis.knots, basis.degree, j, xc, order);
  return row;
}

Eigen::MatrixXd design_matrix(const SplineBasis& basis,
                              const Eigen::Ref<const Eigen::VectorXd>& x,
                              int order) {
  Eigen::MatrixXd B(x.size(), basis.n_basis);
  for (Eigen::Index i = 0; i < x.size(); ++i)
    B.row(i) = basis_row(basis, x[i], order).transpose();
  return B;
}

Eigen::MatrixXd penalty_matrix(const SplineBasis& basis) {
  if (basis.degree < 2)
    throw input_error("unsupported degree: curvature penalty needs degree >= 2");

  Eigen::VectorXd nodes, weights;
  gauss_legendre(2 * basis.degree, nodes, weights);

  const int n = basis.n_basis;
  Eigen::MatrixXd S = Eigen::MatrixXd::Zero(n, n);
  const auto& t = basis.knots;
  for (int k = basis.degree; k + 1 < t.size() - basis.degree; ++k) {
    const double width = t[k + 1] - t[k];
    if (!(width > 0.0)) continue;
    for (int g = 0; g < nodes.size(); ++g) {
      const double x = t[k] + 0.5 * width * (nodes[g] + 1.0);
      const double w = 0.5 * width * weights[g];
      Eigen::VectorXd row = basis_row(basis, x, 2);
      S.selfadjointView<Eigen::Lower>().rankUpdate(row, w);
    }
  }
  return S.selfadjointView<Eigen::Lower>();
}

Eigen::VectorXd greville_abscissae(const SplineBasis& basis) {
  Eigen::VectorXd xi(basis.n_basis);
  for (int j = 0; j < basis.n_basis; ++j)
    xi[j] = basis.knots.segment(j + 1, basis.degree).mean();
  return xi;
}

void gauss_legendre(int n, Eigen::VectorXd& nodes, Eigen::VectorXd& weights) {
  if (n < 1) throw input_error("quadrature order must be positive");
  Eigen::MatrixXd J = Eigen::MatrixXd::Zero(n, n);
  for (int i = 1; i < n; ++i) {
    const double b = i / std::sqrt(4.0 * i * i - 1.0);
    J(i, i - 1) = b;
    J(i - 1, i) = b;
  }
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(J);
  nodes = es.eigenvalues();
  weights = 2.0 * es.eigenvectors().row(0).array().square();
}

}  // namespace tmine
