#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "tmine/curvature.hpp"
#include "tmine/errors.hpp"

using namespace tmine;

namespace {

constexpr double kPi = 3.14159265358979323846;

// A fitted curve whose linear predictor interpolates f on [0,1].
FittedCurve curve_for(const SplineBasis& basis, const std::function<double(double)>& f) {
  FittedCurve fit;
  fit.basis = basis;
  fit.coefficients = oracle::interpolate_coeffs(basis, f);
  fit.converged = true;
  return fit;
}

SplineBasis unit_basis(int n_basis = 8) {
  Eigen::VectorXd x = Eigen::VectorXd::LinSpaced(30, 0.0, 1.0);
  return build_basis(x, n_basis, 3);
}

}  // namespace

TEST_CASE("log-ratio of identical fits is degenerate with c = 0") {
  const SplineBasis basis = unit_basis();
  const FittedCurve f = curve_for(basis, [](double x) { return 1.0 + x * x; });
  const LogRatioCurve curve = logratio_curve(f, f, 64);
  CHECK(curve.degenerate());
  CHECK(curve.g.cwiseAbs().maxCoeff() == 0.0);
  const Eigen::VectorXd kappa = curvature_of(curve);
  CHECK(kappa.cwiseAbs().maxCoeff() == 0.0);

  ProfileConfig pc;
  Eigen::VectorXd samples = Eigen::VectorXd::LinSpaced(10, 0.0, 100.0);
  const CurvatureProfile profile =
      profile_pair(f, f, "A", "B", pc, 0.0, 100.0, samples);
  CHECK(profile.c == 0.0);
  CHECK(profile.intervals.empty());
  CHECK(profile.flagged_samples.empty());
}

TEST_CASE("scaling one element shifts g but not its derivatives or k") {
  const SplineBasis basis = unit_basis();
  const FittedCurve f1 = curve_for(basis, [](double x) { return 1.0 + std::sin(3.0 * x); });
  const FittedCurve f2 = curve_for(basis, [](double x) { return 0.5 + 0.2 * x; });
  FittedCurve f1_scaled = f1;
  f1_scaled.coefficients.array() += std::log(10.0);  // concentrations x10

  const LogRatioCurve a = logratio_curve(f1, f2, 128);
  const LogRatioCurve b = logratio_curve(f1_scaled, f2, 128);
  CHECK((b.g - a.g).cwiseAbs().maxCoeff() ==
        doctest::Approx(std::log(10.0)).epsilon(1e-12));
  CHECK((b.g - a.g).maxCoeff() - (b.g - a.g).minCoeff() < 1e-12);
  CHECK((b.g1 - a.g1).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((b.g2 - a.g2).cwiseAbs().maxCoeff() < 1e-11);
  CHECK(b.k == doctest::Approx(a.k).epsilon(1e-12));
}

TEST_CASE("polynomial pair: eta1 = u^2, eta2 = u on [0,1]") {
  const SplineBasis basis = unit_basis();
  const FittedCurve f1 = curve_for(basis, [](double x) { return x * x; });
  const FittedCurve f2 = curve_for(basis, [](double x) { return x; });
  const LogRatioCurve curve = logratio_curve(f1, f2, 513);
  // u = 0.5 is grid point 256 of 513.
  CHECK(curve.g[256] == doctest::Approx(-0.25).epsilon(1e-10));
  CHECK(std::abs(curve.g1[256]) < 1e-9);
  for (int i = 0; i < 513; i += 64)
    CHECK(curve.g2[i] == doctest::Approx(2.0).epsilon(1e-8));
}

TEST_CASE("swapping the pair negates g and leaves kappa and c unchanged") {
  const SplineBasis basis = unit_basis();
  const FittedCurve f1 =
      curve_for(basis, [](double x) { return std::sin(5.0 * x) + 2.0 * x; });
  const FittedCurve f2 = curve_for(basis, [](double x) { return 0.3 * x * x; });
  const LogRatioCurve ab = logratio_curve(f1, f2, 256);
  const LogRatioCurve ba = logratio_curve(f2, f1, 256);
  CHECK((ab.g + ba.g).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ab.g1 + ba.g1).cwiseAbs().maxCoeff() == 0.0);
  CHECK((ab.g2 + ba.g2).cwiseAbs().maxCoeff() == 0.0);
  CHECK(ab.k == ba.k);

  const Eigen::VectorXd kab = curvature_of(ab);
  const Eigen::VectorXd kba = curvature_of(ba);
  CHECK((kab - kba).cwiseAbs().maxCoeff() == 0.0);

  ProfileConfig pc;
  Eigen::VectorXd samples = Eigen::VectorXd::LinSpaced(20, 0.0, 1.0);
  const CurvatureProfile pab = profile_pair(f1, f2, "A", "B", pc, 0.0, 1.0, samples);
  const CurvatureProfile pba = profile_pair(f2, f1, "B", "A", pc, 0.0, 1.0, samples);
  CHECK(pab.c == pba.c);
  CHECK(pab.threshold == pba.threshold);
  REQUIRE(pab.intervals.size() == pba.intervals.size());
  for (std::size_t i = 0; i < pab.intervals.size(); ++i) {
    CHECK(pab.intervals[i].u_lo == pba.intervals[i].u_lo);
    CHECK(pab.intervals[i].u_hi == pba.intervals[i].u_hi);
  }
  CHECK(pab.flagged_samples == pba.flagged_samples);
}

TEST_CASE("curvature formula: sine curvature at its extremum is 4 pi^2") {
  const int m = 4001;
  LogRatioCurve curve;
  curve.u = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
  curve.g.resize(m);
  curve.g1.resize(m);
  curve.g2.resize(m);
  for (int i = 0; i < m; ++i) {
    const double u = curve.u[i];
    curve.g[i] = std::sin(2.0 * kPi * u);
    curve.g1[i] = 2.0 * kPi * std::cos(2.0 * kPi * u);
    curve.g2[i] = -4.0 * kPi * kPi * std::sin(2.0 * kPi * u);
  }
  curve.k = 1.0;  // forced, per the example
  const Eigen::VectorXd kappa = curvature_of(curve);
  const int at = 1000;  // u = 0.25
  CHECK(curve.u[at] == doctest::Approx(0.25).epsilon(1e-12));
  CHECK(kappa[at] == doctest::Approx(4.0 * kPi * kPi).epsilon(0.01));
}

TEST_CASE("curvature formula: zero slope point") {
  LogRatioCurve curve;
  curve.u = Eigen::VectorXd::LinSpaced(3, 0.0, 1.0);
  curve.g = Eigen::VectorXd::Zero(3);
  curve.g1 = Eigen::VectorXd::Zero(3);
  curve.g2 = Eigen::VectorXd::Constant(3, 2.0);
  curve.k = 1.0;
  const Eigen::VectorXd kappa = curvature_of(curve);
  CHECK(kappa[1] == 2.0);
}

TEST_CASE("pick_threshold") {
  ThresholdPolicy quantile;
  quantile.kind = ThresholdPolicy::Kind::Quantile;
  quantile.q = 0.9;

  Eigen::VectorXd constant = Eigen::VectorXd::Constant(100, 5.0);
  CHECK(pick_threshold(constant, quantile) == 5.0);

  Eigen::VectorXd ladder(100);
  for (int i = 0; i < 100; ++i) ladder[i] = 100.0 - i;  // unsorted on purpose
  CHECK(pick_threshold(ladder, quantile) == doctest::Approx(90.1).epsilon(1e-12));

  ThresholdPolicy absolute;
  absolute.kind = ThresholdPolicy::Kind::Absolute;
  absolute.value = 0.3;
  CHECK(pick_threshold(ladder, absolute) == 0.3);

  ThresholdPolicy bad = quantile;
  bad.q = 1.0;
  CHECK_THROWS_AS(pick_threshold(ladder, bad), input_error);
  CHECK_THROWS_AS(pick_threshold(Eigen::VectorXd(), quantile), input_error);
}

TEST_CASE("exceedance intervals: interpolated interior crossings") {
  Eigen::VectorXd kappa(3), u(3);
  kappa << 0.1, 0.5, 0.1;
  u << 0.0, 0.5, 1.0;
  const auto intervals = exceedance_intervals(kappa, u, 0.3);
  REQUIRE(intervals.size() == 1);
  CHECK(intervals[0].u_lo == doctest::Approx(0.25).epsilon(1e-14));
  CHECK(intervals[0].u_hi == doctest::Approx(0.75).epsilon(1e-14));
  CHECK(intervals[0].peak == doctest::Approx(0.04).epsilon(1e-14));
}

TEST_CASE("exceedance intervals: sub-threshold curve gives none") {
  Eigen::VectorXd kappa = Eigen::VectorXd::Constant(10, 0.1);
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(10, 0.0, 1.0);
  CHECK(exceedance_intervals(kappa, u, 0.3).empty());
}

TEST_CASE("exceedance intervals: boundaries count as crossings") {
  Eigen::VectorXd kappa(3), u(3);
  kappa << 0.6, 0.1, 0.6;
  u << 0.0, 0.5, 1.0;
  const auto intervals = exceedance_intervals(kappa, u, 0.3);
  REQUIRE(intervals.size() == 2);
  CHECK(intervals[0].u_lo == 0.0);
  CHECK(intervals[0].u_hi == doctest::Approx(0.3).epsilon(1e-14));
  CHECK(intervals[1].u_lo == doctest::Approx(0.7).epsilon(1e-14));
  CHECK(intervals[1].u_hi == 1.0);
}

TEST_CASE("c-value: closed-form examples") {
  // No exceedance.
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(5, 0.0, 1.0);
  Eigen::VectorXd low = Eigen::VectorXd::Constant(5, 0.1);
  CHECK(c_value(low, 0.3, exceedance_intervals(low, u, 0.3)) == 0.0);

  // One interval with peak exceedance 0.5 -> c = 0.25.
  Eigen::VectorXd one(5);
  one << 0.0, 0.8, 0.0, 0.0, 0.0;
  const auto iv1 = exceedance_intervals(one, u, 0.3);
  REQUIRE(iv1.size() == 1);
  CHECK(c_value(one, 0.3, iv1) == doctest::Approx(0.25).epsilon(1e-15));

  // Two intervals with peaks 0.5 and 0.3 -> c = (0.25 + 0.09) / 2 = 0.17.
  Eigen::VectorXd two(5);
  two << 0.8, 0.0, 0.6, 0.0, 0.0;
  const auto iv2 = exceedance_intervals(two, u, 0.3);
  REQUIRE(iv2.size() == 2);
  CHECK(c_value(two, 0.3, iv2) == doctest::Approx(0.17).epsilon(1e-15));
}

TEST_CASE("c-value matches the brute-force Eq. (1) evaluation") {
  std::mt19937 rng(41);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  for (int t = 0; t < 50; ++t) {
    const int m = 257;
    Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
    Eigen::VectorXd kappa = Eigen::VectorXd::Zero(m);
    const int bumps = 1 + int(unif(rng) * 3.0);
    for (int b = 0; b < bumps; ++b) {
      const double center = 0.1 + 0.8 * unif(rng);
      const double width = 0.02 + 0.06 * unif(rng);
      const double height = 0.5 + 2.0 * unif(rng);
      for (int i = 0; i < m; ++i) {
        const double z = (u[i] - center) / width;
        kappa[i] += height * std::exp(-0.5 * z * z);
      }
    }
    const double threshold = 0.25 + 0.5 * unif(rng);
    const auto intervals = exceedance_intervals(kappa, u, threshold);
    const double ours = c_value(kappa, threshold, intervals);
    int runs = 0;
    const double brute = oracle::c_value_bruteforce(u, kappa, threshold, 200, &runs);
    CHECK(runs == int(intervals.size()));
    CHECK(std::abs(ours - brute) <= 1e-6 * std::max(1.0, std::abs(brute)));
  }
}

TEST_CASE("interval peaks dominate: dropping non-peak points never raises c") {
  std::mt19937 rng(43);
  std::uniform_real_distribution<double> unif(0.0, 1.0);
  const int m = 129;
  Eigen::VectorXd u = Eigen::VectorXd::LinSpaced(m, 0.0, 1.0);
  Eigen::VectorXd kappa(m);
  for (int i = 0; i < m; ++i)
    kappa[i] = std::abs(std::sin(7.0 * u[i])) + 0.2 * unif(rng);
  const double threshold = 0.8;
  const auto intervals = exceedance_intervals(kappa, u, threshold);
  const double base = c_value(kappa, threshold, intervals);
  for (const auto& iv : intervals) {
    for (int i = iv.first; i <= iv.last; ++i) {
      Eigen::VectorXd reduced = kappa;
      const double exc = reduced[i] - threshold;
      if (exc * exc >= iv.peak) continue;  // keep the peak itself
      reduced[i] = threshold;  // flatten a non-peak grid point
      CHECK(c_value(reduced, threshold, intervals) <= base + 1e-15);
    }
  }
}

TEST_CASE("planted sigmoid step is flagged near the step") {
  const SplineBasis basis = unit_basis(10);
  const double step_at = 0.55;
  // Step width resolvable by the knot spacing, so the spline does not ring.
  const FittedCurve f1 = curve_for(basis, [&](double x) {
    return 1.0 / (1.0 + std::exp(-(x - step_at) / 0.05));
  });
  const FittedCurve f2 = curve_for(basis, [](double) { return 0.2; });
  ProfileConfig pc;
  Eigen::VectorXd samples = Eigen::VectorXd::LinSpaced(41, 0.0, 1.0);
  const CurvatureProfile profile =
      profile_pair(f1, f2, "step", "flat", pc, 0.0, 1.0, samples);
  REQUIRE(!profile.intervals.empty());
  CHECK(profile.c > 0.0);
  // Every exceedance interval lies in the step neighbourhood.
  for (const auto& iv : profile.intervals) {
    CHECK(iv.u_lo > step_at - 0.3);
    CHECK(iv.u_hi < step_at + 0.3);
  }
  for (int s : profile.flagged_samples)
    CHECK(std::abs(samples[s] - step_at) < 0.3);
}

TEST_CASE("mismatched domains are rejected") {
  Eigen::VectorXd xa = Eigen::VectorXd::LinSpaced(20, 0.0, 1.0);
  Eigen::VectorXd xb = Eigen::VectorXd::LinSpaced(20, 0.0, 2.0);
  const FittedCurve f1 = curve_for(build_basis(xa, 6, 3), [](double x) { return x; });
  const FittedCurve f2 = curve_for(build_basis(xb, 6, 3), [](double x) { return x; });
  CHECK_THROWS_AS(logratio_curve(f1, f2, 64), input_error);
  CHECK_THROWS_AS(logratio_curve(f1, f2, 8), input_error);  // m too small
}

TEST_CASE("pair grid path equals the direct path") {
  const SplineBasis basis = unit_basis();
  const FittedCurve f1 = curve_for(basis, [](double x) { return std::sin(4.0 * x); });
  const FittedCurve f2 = curve_for(basis, [](double x) { return x; });
  const PairGrid grid = make_pair_grid(basis, 128);
  const LogRatioCurve direct = logratio_curve(f1, f2, 128);
  const LogRatioCurve cached = logratio_curve(f1, f2, grid);
  CHECK((direct.g - cached.g).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((direct.g1 - cached.g1).cwiseAbs().maxCoeff() < 1e-10);
  CHECK((direct.g2 - cached.g2).cwiseAbs().maxCoeff() < 1e-9);
  CHECK(direct.k == doctest::Approx(cached.k).epsilon(1e-14));
}

TEST_CASE("constant-within-epsilon g yields the degenerate rule") {
  const SplineBasis basis = unit_basis();
  FittedCurve f1 = curve_for(basis, [](double) { return 2.0; });
  FittedCurve f2 = curve_for(basis, [](double) { return 1.0; });
  const LogRatioCurve curve = logratio_curve(f1, f2, 64);
  CHECK(curve.degenerate());
  CHECK(curvature_of(curve).cwiseAbs().maxCoeff() == 0.0);
}
