#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "mot/scene.hpp"
#include "mot/stats.hpp"

using namespace mot;

namespace {

Trajectory brownian(std::uint64_t seed, int half) {
  Rng rng = make_rng(seed, Stream::kSynthetic, 0);
  std::normal_distribution<double> nd;
  Trajectory z;
  z.n_minus = -half;
  z.L.assign(2 * half + 1, 0.0);
  z.R.assign(2 * half + 1, 0.0);
  for (int k = half + 1; k <= 2 * half; ++k) {
    z.L[k] = z.L[k - 1] + nd(rng);
    z.R[k] = z.R[k - 1] + nd(rng);
  }
  for (int k = half; k-- > 0;) {
    z.L[k] = z.L[k + 1] + nd(rng);
    z.R[k] = z.R[k + 1] + nd(rng);
  }
  return z;
}

Trajectory from_function(int half, double (*f)(double)) {
  Trajectory z;
  z.n_minus = -half;
  for (int n = -half; n <= half; ++n) {
    if (n == -half) {
      z.L.clear();
      z.R.clear();
    }
    z.L.push_back(f(n));
    z.R.push_back(f(n));
  }
  return z;
}

const std::vector<int> kGrid{16, 32, 64, 128, 256, 512, 1024, 2048};

}  // namespace

TEST(Regression, LineFit) {
  const LinearFit f = fit_line({0, 1, 2, 3}, {1, 3, 5, 7});
  EXPECT_DOUBLE_EQ(f.slope, 2);
  EXPECT_DOUBLE_EQ(f.intercept, 1);
  EXPECT_THROW(fit_line({1, 1}, {0, 1}), domain_error);
  EXPECT_THROW(fit_line({1}, {0}), domain_error);
}

TEST(Regression, GridRequirements) {
  EXPECT_THROW(check_grid({1, 10, 100}, {1, 4, 1.0}), domain_error);
  EXPECT_THROW(check_grid({1, 2, 3, 4}, {1, 4, 1.0}), domain_error);
  EXPECT_THROW(check_grid({1, 10, 5, 100}, {1, 4, 1.0}), domain_error);
  EXPECT_NO_THROW(check_grid({1, 3, 10, 32}, {1, 4, 1.5}));
}

TEST(Scaling, BrownianSlopeIsOneHalf) {
  std::vector<Trajectory> zs;
  for (std::uint64_t s = 0; s < 200; ++s) zs.push_back(brownian(s, 2048));
  const ScalingReport r = estimate_scaling_exponent(zs, kGrid, 1);
  EXPECT_NEAR(r.L.slope, 0.5, 0.03);
  EXPECT_NEAR(r.R.slope, 0.5, 0.03);
  EXPECT_NEAR(r.joint.slope, 0.5, 0.03);
  EXPECT_GT(r.joint.std_error, 0);
  EXPECT_LT(r.joint.std_error, 0.03);
  EXPECT_TRUE(r.symmetric());
  EXPECT_EQ(r.joint.n_samples, 200u);
}

TEST(Scaling, LinearSlopeIsOne) {
  std::vector<Trajectory> zs(60, from_function(2048, [](double t) { return t; }));
  const ScalingReport r = estimate_scaling_exponent(zs, kGrid, 1);
  EXPECT_NEAR(r.joint.slope, 1.0, 0.01);
  EXPECT_NEAR(r.joint.std_error, 0.0, 1e-12);
}

TEST(Scaling, Preconditions) {
  std::vector<Trajectory> few(49, from_function(2048, [](double t) { return t; }));
  EXPECT_THROW(estimate_scaling_exponent(few, kGrid, 1), domain_error);
  std::vector<Trajectory> zs(60, from_function(2048, [](double t) { return t; }));
  EXPECT_THROW(estimate_scaling_exponent(zs, {16, 32, 64, 128}, 1), domain_error);  // under 1.5 decades
  EXPECT_THROW(estimate_scaling_exponent(zs, {16, 512, 2048}, 1), domain_error);    // three scales
}

TEST(Scaling, ContoursInvariantUnderNormalisation) {
  std::vector<ContourPair> a, b;
  for (std::uint64_t s = 0; s < 50; ++s) {
    const Scene sc = make_scene(Box{64, 16}, 3000 + s, 1.0 / 16, 1.0);
    a.push_back(sc.contour);
    b.push_back(sc.contour);
    b.back().c_check = 2.0;
  }
  const std::vector<int> grid{4, 8, 16, 32, 64, 128};
  const ScalingReport ra = estimate_scaling_exponent(to_trajectories(a), grid, 5);
  const ScalingReport rb = estimate_scaling_exponent(to_trajectories(b), grid, 5);
  EXPECT_NEAR(ra.joint.slope, rb.joint.slope, 1e-9);
  EXPECT_NEAR(ra.L.std_error, rb.L.std_error, 1e-9);
  EXPECT_NEAR(ra.joint.intercept + std::log(2.0), rb.joint.intercept, 1e-9);
}

TEST(Trajectory, FromContourScales) {
  const Scene sc = make_scene(Box{16, 4}, 1, 0.25, 3.0);
  const Trajectory z = to_trajectory(sc.contour);
  EXPECT_DOUBLE_EQ(z.dt, 0.0625);
  for (int n = z.n_minus; n <= z.n_plus(); ++n) {
    EXPECT_DOUBLE_EQ(z.L_at(n), 3.0 * std::pow(0.25, 1.25) * sc.contour.L_at(n));
  }
}

TEST(Holder, Examples) {
  const PiecewiseLinear zero(0, 0.01, std::vector<double>(101, 2.5));
  for (double a : {0.3, 0.55, 0.7, 1.0}) EXPECT_DOUBLE_EQ(holder_constant(zero, zero, 0, 1, a, 0.01), 0.0);
  std::vector<double> t;
  for (int k = 0; k <= 100; ++k) t.push_back(0.01 * k);
  const PiecewiseLinear lin(0, 0.01, t);
  const PiecewiseLinear flat(0, 0.01, std::vector<double>(101, 0.0));
  EXPECT_NEAR(holder_constant(lin, flat, 0, 1, 1.0, 0.01), 1.0, 1e-12);
  // Below 1 the full interval dominates a linear path.
  EXPECT_NEAR(holder_constant(lin, flat, 0, 1, 0.5, 0.01), 1.0, 1e-12);
  EXPECT_NEAR(holder_constant(lin, flat, 0, 0.5, 0.5, 0.01), std::sqrt(0.5), 1e-12);
  EXPECT_THROW(holder_constant(lin, flat, 0, 1, 0.0, 0.01), domain_error);
  EXPECT_THROW(holder_constant(lin, flat, 0, 1, 1.2, 0.01), domain_error);
  EXPECT_THROW(holder_constant(lin, flat, 0, 2, 0.5, 0.01), domain_error);
}

TEST(Holder, DyadicLevelsStopAtTheMesh) {
  // A single unit jump between breakpoints 0 and 1 on a mesh of 1/8: the
  // finest dyadic pair has length 1/8.
  std::vector<double> v(9, 1.0);
  v[0] = 0;
  const PiecewiseLinear z(0, 0.125, v);
  const PiecewiseLinear flat(0, 0.125, std::vector<double>(9, 0.0));
  EXPECT_NEAR(holder_constant(z, flat, 0, 1, 0.5, 0.125), 1.0 / std::pow(0.125, 0.5), 1e-12);
}

TEST(Holder, ReportTrendDirections) {
  // Constants that grow with the group index are flagged; flat ones are not.
  std::vector<std::vector<RescaledContour>> groups(3);
  const std::vector<double> deltas{0.5, 0.25, 0.125};
  for (std::size_t g = 0; g < 3; ++g) {
    for (int s = 0; s < 20; ++s) {
      const double dt = deltas[g] * deltas[g];
      const int n = static_cast<int>(std::lround(1.0 / dt));
      std::vector<double> v(n + 1, 0.0);
      for (int k = 1; k <= n; ++k) v[k] = v[k - 1] + ((k + s) % 2 ? 1 : -1) * std::sqrt(dt);
      groups[g].push_back({PiecewiseLinear(0, dt, v), PiecewiseLinear(0, dt, std::vector<double>(n + 1, 0.0))});
    }
  }
  const HolderReport hi = holder_report(groups, deltas, 0.9, 0, 1);
  EXPECT_TRUE(hi.increasing());
  const HolderReport lo = holder_report(groups, deltas, 0.5, 0, 1);
  EXPECT_FALSE(lo.increasing());
  for (const auto& g : hi.constants) {
    for (double c : g) EXPECT_GE(c, 0);
  }
  EXPECT_THROW(holder_report(groups, {0.5, 0.25}, 0.5, 0, 1), domain_error);
}

TEST(Stationarity, IndependentIncrementsPass) {
  std::vector<Trajectory> zs;
  for (std::uint64_t s = 0; s < 150; ++s) zs.push_back(brownian(100 + s, 4096));
  const StationarityReport r = stationarity_report(zs, {16, 256}, {-3072, -1024, 1024, 3072}, 0, 64);
  EXPECT_TRUE(r.passed(0.01)) << r.adjusted_p;
  EXPECT_EQ(r.rows.size(), 16u);
}

TEST(Stationarity, DriftingIncrementsFail) {
  std::vector<Trajectory> zs(120, from_function(4096, [](double t) { return t * t; }));
  const StationarityReport r = stationarity_report(zs, {16, 256}, {-3072, -1024, 1024, 3072}, 0, 64);
  EXPECT_FALSE(r.passed(0.01));
  EXPECT_LT(r.min_p, 1e-10);
}

TEST(Stationarity, Preconditions) {
  std::vector<Trajectory> zs(99, from_function(64, [](double t) { return t; }));
  EXPECT_THROW(stationarity_report(zs, {4}, {8}), domain_error);
  zs.resize(100, zs.front());
  EXPECT_THROW(stationarity_report(zs, {0}, {8}), domain_error);
  EXPECT_THROW(stationarity_report(zs, {4}, {1000}), domain_error);
}

TEST(DiameterBound, LimitsAndMonotonicity) {
  const Scene sc = make_scene(Box{64, 16}, 12, 1.0 / 16);
  const PrimalDepthIndex idx(sc.tree);
  const std::vector<double> lambdas{0.05, 0.1, 0.2, 0.5, 1, 2, 4, 1e9};
  const DiameterBoundReport full = content_diam_bound_check(sc.tree, idx, 1.0 / 16, 8.0, lambdas, 400, 3);
  EXPECT_GT(full.considered, 200u);
  for (double r : full.rates) {
    EXPECT_GE(r, 0);
    EXPECT_LE(r, 1);
  }
  EXPECT_EQ(full.rates.back(), 0.0);
  for (std::size_t k = 1; k < full.rates.size(); ++k) EXPECT_LE(full.rates[k], full.rates[k - 1]);
  EXPECT_GT(full.rates.front(), 0.0);
}

TEST(DiameterBound, ViolationRateDecaysInLambda) {
  std::vector<double> lambdas;
  for (double l = 0.25; l <= 4.01; l += 0.25) lambdas.push_back(l);
  std::vector<double> total(lambdas.size(), 0.0);
  std::size_t considered = 0;
  for (std::uint64_t s = 0; s < 10; ++s) {
    const Scene sc = make_scene(Box{128, 32}, 40 + s, 1.0 / 32);
    const PrimalDepthIndex idx(sc.tree);
    const auto rep = content_diam_bound_check(sc.tree, idx, 1.0 / 32, 0.25, lambdas, 2000, s);
    for (std::size_t k = 0; k < lambdas.size(); ++k) total[k] += rep.rates[k] * rep.considered;
    considered += rep.considered;
  }
  ASSERT_GT(considered, 5000u);
  for (std::size_t k = 1; k < lambdas.size(); ++k) EXPECT_LE(total[k], total[k - 1]);
  EXPECT_GT(total.front(), total.back());
}

TEST(RunningMax, NondecreasingAndGrowing) {
  std::vector<Trajectory> zs;
  for (std::uint64_t s = 0; s < 40; ++s) zs.push_back(to_trajectory(make_scene(Box{128, 32}, 70 + s).contour));
  const RunningMaxReport r = running_max_diagnostic(zs, 2, 10);
  EXPECT_TRUE(r.nondecreasing);
  EXPECT_GE(r.grew_fraction, 0.95);
  for (const auto& m : r.maxima) EXPECT_EQ(m.size(), 9u);
  EXPECT_THROW(running_max_diagnostic(zs, 3, 3), domain_error);
}
