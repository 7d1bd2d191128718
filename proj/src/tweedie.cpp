#include "tmine/tweedie.hpp"

#include <cmath>
#include <limits>

#include "tmine/errors.hpp"

namespace tmine {

double tweedie_unit_deviance(double y, double mu, double p) {
  if (!(y > 0.0) || !std::isfinite(y))
    throw input_error("tweedie deviance requires y > 0");
  if (std::isnan(mu) || !(mu > 0.0))
    throw input_error("tweedie deviance requires mu > 0");
  if (!(p >= 1.0 && p <= 2.0))
    throw input_error("tweedie power must lie in [1, 2]");
  if (std::isinf(mu)) return std::numeric_limits<double>::infinity();

  double d;
  if (p == 1.0) {
    d = 2.0 * (y * std::log(y / mu) - (y - mu));
  } else if (p == 2.0) {
    d = 2.0 * (y / mu - 1.0 - std::log(y / mu));
  } else {
    const double p1 = 1.0 - p;
    const double p2 = 2.0 - p;
    d = 2.0 * (std::pow(y, p2) / (p1 * p2) - y * std::pow(mu, p1) / p1 +
               std::pow(mu, p2) / p2);
  }
  // Clamp roundoff near mu == y; the true deviance is nonnegative.
  return d < 0.0 ? 0.0 : d;
}

double tweedie_total_deviance(const Eigen::Ref<const Eigen::VectorXd>& y,
                              const Eigen::Ref<const Eigen::VectorXd>& mu,
                              const Eigen::Ref<const Eigen::VectorXd>& w,
                              double p) {
  if (y.size() != mu.size() || y.size() != w.size())
    throw input_error("deviance inputs must have equal lengths");
  double total = 0.0;
  for (Eigen::Index i = 0; i < y.size(); ++i)
    total += w[i] * tweedie_unit_deviance(y[i], mu[i], p);
  return total;
}

}  // namespace tmine
