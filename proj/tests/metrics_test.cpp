#include <algorithm>
#include <cmath>
#include <numbers>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "quantfp/errors.hpp"
#include "quantfp/metrics.hpp"

using namespace quantfp;

namespace {

DensityEstimate random_density(const Grid1D& g, Rng& rng, bool with_zeros) {
  std::uniform_real_distribution<double> u(0.0, 1.0);
  std::vector<double> w(g.size());
  for (double& x : w) x = (with_zeros && u(rng) < 0.3) ? 0.0 : u(rng) + 1e-6;
  w[0] += 1e-3;
  return DensityEstimate::from_weights(g, w);
}

}  // namespace

TEST(Smooth, examples) {
  const std::vector<double> c(30, 4.2);
  for (double v : smooth(c, 25)) EXPECT_DOUBLE_EQ(v, 4.2);
  const std::vector<double> s{1, 5, -2, 7};
  EXPECT_EQ(smooth(s, 1), s);
  EXPECT_EQ(smooth(std::vector<double>{0, 10}, 2), (std::vector<double>{0, 5}));
  EXPECT_TRUE(smooth(std::vector<double>{}, 3).empty());
  EXPECT_THROW(smooth(s, 0), Error);
}

TEST(Smooth, trailing_window_and_running_max) {
  Rng rng = make_rng(1);
  std::normal_distribution<double> n(0.0, 5.0);
  std::vector<double> s(200);
  for (double& x : s) x = n(rng);
  const auto out = smooth(s, 25);
  double running_max = -1e300;
  for (std::size_t i = 0; i < s.size(); ++i) {
    running_max = std::max(running_max, s[i]);
    const std::size_t lo = i + 1 >= 25 ? i + 1 - 25 : 0;
    double mean = 0.0;
    for (std::size_t k = lo; k <= i; ++k) mean += s[k];
    mean /= static_cast<double>(i + 1 - lo);
    EXPECT_NEAR(out[i], mean, 1e-12);
    EXPECT_LE(out[i], running_max + 1e-12);
  }
}

TEST(PolicyEntropy, examples) {
  EXPECT_NEAR(policy_entropy(0.0, 1), 1.4189, 1e-4);
  EXPECT_NEAR(policy_entropy(0.0, 2), 2.8379, 1e-4);
  EXPECT_NEAR(policy_entropy(0.0, 1), 0.5 * std::log(2 * std::numbers::pi * std::numbers::e), 1e-15);
  double prev = -1e300;
  for (double ls = -5.0; ls < 5.0; ls += 0.25) {
    const double h = policy_entropy(ls, 2);
    EXPECT_GT(h, prev);
    prev = h;
  }
}

TEST(KlDivergence, examples) {
  const Grid1D g(0.0, 1.0, 3);
  const DensityEstimate p(g, {0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125, 0.125});
  const DensityEstimate q(g, {0.25, 0.25, 0.25, 0.25, 0.0, 0.0, 0.0, 0.0});
  // Half the mass on half the cells against uniform: ln 2.
  EXPECT_DOUBLE_EQ(kl_divergence(p, p), 0.0);
  EXPECT_NEAR(kl_divergence(q, p), std::log(2.0), 1e-15);
  EXPECT_NEAR(kl_divergence(q, p), 0.6931, 1e-4);
  // Zero cells of the second argument are floored at 1e-12.
  EXPECT_NEAR(kl_divergence(p, q), 0.5 * std::log(0.5) + 0.5 * std::log(0.125 / 1e-12), 1e-9);
  EXPECT_THROW(kl_divergence(p, DensityEstimate(Grid1D(0.0, 2.0, 3), std::vector<double>(8, 0.125))),
               InputError);
}

TEST(KlDivergence, gibbs_inequality) {
  Rng rng = make_rng(2);
  const Grid1D g(-1.0, 1.0, 5);
  for (int t = 0; t < 500; ++t) {
    const auto p = random_density(g, rng, t % 2 == 0);
    const auto q = random_density(g, rng, t % 3 == 0);
    EXPECT_GE(kl_divergence(p, q), -1e-12);
    EXPECT_NEAR(kl_divergence(p, p), 0.0, 1e-12);
  }
}

TEST(Mse, examples) {
  const Grid1D g(0.0, 1.0, 3);
  const DensityEstimate u(g, std::vector<double>(8, 0.125));
  EXPECT_DOUBLE_EQ(mse(u, u), 0.0);
  // N = 2 cells with h = 1: a delta against uniform.
  const Grid1D two(0.0, 1.0, 3);
  std::vector<double> delta(8, 0.0);
  delta[0] = 1.0;
  const DensityEstimate d(two, delta);
  double expected = 0.0;
  for (std::size_t i = 0; i < 8; ++i) {
    const double diff = (delta[i] - 0.125) / two.spacing();
    expected += diff * diff / 8.0;
  }
  EXPECT_NEAR(mse(d, u), expected, 1e-12);
  EXPECT_THROW(mse(d, DensityEstimate(Grid1D(0.0, 1.0, 4), std::vector<double>(16, 1.0 / 16))),
               InputError);
}

TEST(Mse, unit_spacing_example) {
  // Points {0, 1, ..., 7}: h = 1, so mass and density coincide.
  const Grid1D g(0.0, 7.0, 3);
  std::vector<double> a(8, 0.0), b(8, 0.0);
  a[0] = 1.0;
  b[0] = 0.5;
  b[1] = 0.5;
  EXPECT_NEAR(mse(DensityEstimate(g, a), DensityEstimate(g, b)), (0.25 + 0.25) / 8.0, 1e-15);
}

TEST(Coverage, examples_and_monotonicity) {
  const Grid1D g(0.0, 7.0, 3);
  const DensityEstimate u(g, std::vector<double>(8, 0.125));
  EXPECT_DOUBLE_EQ(coverage(u, 0.0), 1.0);
  EXPECT_DOUBLE_EQ(coverage(u, 0.5), 0.0);
  EXPECT_DOUBLE_EQ(coverage(u, 0.0625), 1.0);
  Rng rng = make_rng(3);
  for (int t = 0; t < 100; ++t) {
    const auto p = random_density(Grid1D(-3.0, 3.0, 6), rng, true);
    EXPECT_NEAR(coverage(p, 0.0), 1.0, 1e-12);
    double prev = 2.0;
    for (double tau = 0.0; tau < 2.0; tau += 0.05) {
      const double c = coverage(p, tau);
      EXPECT_LE(c, prev + 1e-15);
      prev = c;
    }
  }
}

TEST(Histogram, counts_nearest_cells) {
  const Grid1D g(0.0, 7.0, 3);
  const std::vector<double> xs{0.1, 0.4, 6.8, 100.0, -5.0};
  const auto h = histogram_density(g, xs);
  EXPECT_DOUBLE_EQ(h[0], 3.0 / 5.0);
  EXPECT_DOUBLE_EQ(h[7], 2.0 / 5.0);
}

TEST(Table1, examples) {
  RunArtifacts run;
  run.horizon = 200;
  for (int e = 0; e < 100; ++e) {
    run.total_env_reward.push_back(-3.0);
    run.discovery_fraction.push_back(0.0);
  }
  auto s = table1_summary(run);
  EXPECT_DOUBLE_EQ(s.mean_reward, -3.0);
  EXPECT_DOUBLE_EQ(s.std_reward, 0.0);
  EXPECT_DOUBLE_EQ(s.peak_reward, -3.0);
  EXPECT_DOUBLE_EQ(s.global_rate, 0.0);
  EXPECT_DOUBLE_EQ(s.sample_efficiency, -3.0 / 200.0);

  RunArtifacts ramp;
  ramp.horizon = 10;
  for (int e = 0; e < 400; ++e) {
    ramp.total_env_reward.push_back(e);
    ramp.discovery_fraction.push_back(e >= 320 ? 1.0 : 0.0);
  }
  s = table1_summary(ramp);
  EXPECT_DOUBLE_EQ(s.peak_reward, 399.0);
  EXPECT_DOUBLE_EQ(s.mean_reward, (320.0 + 399.0) / 2.0);
  EXPECT_DOUBLE_EQ(s.global_rate, 1.0);
  EXPECT_NEAR(s.sample_efficiency, (399.0 * 400.0 / 2.0) / 4000.0, 1e-12);

  RunArtifacts short_run;
  short_run.horizon = 1;
  short_run.total_env_reward.assign(79, 1.0);
  short_run.discovery_fraction.assign(79, 1.0);
  EXPECT_THROW(table1_summary(short_run), InputError);
}

TEST(FitPowerLaw, examples) {
  std::vector<double> xs, sq, root;
  for (double x : {1.0, 2.0, 4.0, 8.0, 16.0}) {
    xs.push_back(x);
    sq.push_back(x * x);
    root.push_back(3 * std::pow(x, 0.35));
  }
  EXPECT_NEAR(fit_power_law(xs, sq), 2.0, 1e-9);
  EXPECT_NEAR(fit_power_law(xs, root), 0.35, 1e-9);

  Rng rng = make_rng(4);
  std::normal_distribution<double> n(0.0, 0.01);
  std::vector<double> x20, y20;
  for (int i = 1; i <= 20; ++i) {
    x20.push_back(i);
    y20.push_back(i * (1.0 + n(rng)));
  }
  EXPECT_NEAR(fit_power_law(x20, y20), 1.0, 0.05);
}

TEST(FitPowerLaw, scale_invariance_and_errors) {
  Rng rng = make_rng(5);
  std::uniform_real_distribution<double> u(0.1, 10.0);
  for (int t = 0; t < 100; ++t) {
    std::vector<double> xs(8), ys(8);
    for (int i = 0; i < 8; ++i) xs[i] = u(rng), ys[i] = u(rng);
    const double base = fit_power_law(xs, ys);
    auto xs2 = xs, ys2 = ys;
    for (double& x : xs2) x *= 17.0;
    for (double& y : ys2) y *= 0.003;
    EXPECT_NEAR(fit_power_law(xs2, ys2), base, 1e-9);
  }
  const std::vector<double> two{1.0, 2.0};
  EXPECT_THROW(fit_power_law(two, two), InputError);
  const std::vector<double> xs{1.0, 2.0, 3.0}, bad{1.0, 0.0, 2.0};
  EXPECT_THROW(fit_power_law(xs, bad), InputError);
}
