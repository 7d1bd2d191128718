#pragma once

#include <Eigen/Dense>

namespace tmine {

/// Tweedie family with log link. power p in [1,2] interpolates Poisson (1)
/// and gamma (2); the variance function is V(mu) = mu^p. dispersion is
/// estimated by the fitter (Pearson statistic over residual df).
struct FamilyConfig {
  double power = 1.5;
  double dispersion = 1.0;
};

/// Tweedie unit deviance d(y, mu) for y > 0, mu > 0, p in [1,2].
/// p in (1,2):  2 [ y^{2-p}/((1-p)(2-p)) - y mu^{1-p}/(1-p) + mu^{2-p}/(2-p) ]
/// p = 1:       2 [ y log(y/mu) - (y - mu) ]        (Poisson)
/// p = 2:       2 [ (y - mu)/mu - log(y/mu) ]       (gamma)
/// Nonnegative, zero exactly at mu = y; +inf at mu -> 0 or mu -> inf.
double tweedie_unit_deviance(double y, double mu, double p);

/// Sum of w_i * d(y_i, mu_i, p).
double tweedie_total_deviance(const Eigen::Ref<const Eigen::VectorXd>& y,
                              const Eigen::Ref<const Eigen::VectorXd>& mu,
                              const Eigen::Ref<const Eigen::VectorXd>& w,
                              double p);

}  // namespace tmine
