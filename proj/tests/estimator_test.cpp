#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <sstream>

#include <gtest/gtest.h>

#include "quantfp/errors.hpp"
#include "quantfp/estimator.hpp"

using namespace quantfp;

namespace {

std::vector<std::size_t> local_maxima(std::span<const double> m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < m.size(); ++i) {
    if (m[i] > m[i - 1] && m[i] >= m[i + 1]) out.push_back(i);
  }
  return out;
}

// Independent Boltzmann argmax per half-line, straight from the formula.
std::size_t boltzmann_argmax(const Grid1D& g, bool right, double a) {
  std::size_t best = 0;
  double best_w = -1.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double x = g[i];
    if ((x > 0) != right) continue;
    const double w = std::exp(-(0.5 * (x * x - 2) * (x * x - 2) + a * std::sin(3 * x)) / 0.3);
    if (w > best_w) best_w = w, best = i;
  }
  return best;
}

}  // namespace

TEST(AmplitudeVector, validates) {
  EXPECT_NO_THROW(AmplitudeVector({0.6, 0.8}));
  EXPECT_THROW(AmplitudeVector({0.6, 0.6}), NumericError);
  EXPECT_THROW(AmplitudeVector({-0.6, 0.8}), NumericError);
}

TEST(DensityEstimate, validates_and_normalizes) {
  const Grid1D g(0.0, 1.0, 3);
  EXPECT_THROW(DensityEstimate(g, std::vector<double>(8, 0.2)), NumericError);
  EXPECT_THROW(DensityEstimate(g, std::vector<double>(4, 0.25)), InputError);
  const auto d = DensityEstimate::from_weights(g, std::vector<double>(8, 3.0));
  EXPECT_DOUBLE_EQ(d[3], 0.125);
  EXPECT_DOUBLE_EQ(d.density(3), 0.125 / g.spacing());
  EXPECT_THROW(DensityEstimate::from_weights(g, std::vector<double>(8, 0.0)), NumericError);
}

TEST(PrepareAmplitudes, examples) {
  const std::vector<double> flat(4, 0.0);
  const auto u = prepare_amplitudes(flat, 3.7);
  for (double v : u.values()) EXPECT_DOUBLE_EQ(v, 0.5);

  const std::vector<double> two{0.0, std::log(4.0)};
  const auto a = prepare_amplitudes(two, 2.0);
  EXPECT_NEAR(a[0], 1.0 / std::sqrt(1.0 + 1.0 / 16.0), 1e-12);
  EXPECT_NEAR(a[0], 0.9701, 1e-4);
  EXPECT_NEAR(a[1], 0.2425, 1e-4);

  const std::vector<double> one{5.0};
  EXPECT_DOUBLE_EQ(prepare_amplitudes(one, 1.0)[0], 1.0);
}

TEST(PrepareAmplitudes, survives_large_beta_v) {
  const std::vector<double> v{1000.0, 1001.0, 1050.0};
  const auto a = prepare_amplitudes(v, 50.0);
  EXPECT_NEAR(a[0], 1.0, 1e-9);
}

TEST(GroverStep, examples) {
  const AmplitudeVector uniform(std::vector<double>(16, 0.25));
  const auto u = grover_step(uniform);
  for (std::size_t i = 0; i < u.size(); ++i) EXPECT_DOUBLE_EQ(u[i], 0.25);

  const auto flip = grover_step(AmplitudeVector({1.0, 0.0}));
  EXPECT_NEAR(flip[0], 0.0, 1e-15);
  EXPECT_NEAR(flip[1], 1.0, 1e-15);

  const auto swap = grover_step(AmplitudeVector({0.8, 0.6}));
  EXPECT_NEAR(swap[0], 0.6, 1e-12);
  EXPECT_NEAR(swap[1], 0.8, 1e-12);
}

TEST(GroverStep, all_clamped_falls_back_to_uniform) {
  // Mean 1/3 of (1, 0, 0): reflection gives (-1/3, 2/3, 2/3), clamp keeps the tail.
  // A single spike on a long grid reflects to (negative, small positives).
  const auto a = grover_step(AmplitudeVector({1.0, 0.0, 0.0}));
  EXPECT_NEAR(a[0], 0.0, 1e-15);
  EXPECT_NEAR(a[1], std::sqrt(0.5), 1e-12);
  // Two equal spikes out of two: unchanged (uniform).
  const auto b = grover_step(AmplitudeVector({std::sqrt(0.5), std::sqrt(0.5)}));
  EXPECT_NEAR(b[0], std::sqrt(0.5), 1e-15);
}

TEST(GroverStep, norm_and_sign_property) {
  Rng rng = make_rng(11, 0);
  std::uniform_real_distribution<double> u(0.0, 1.0);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<double> v(1 + trial % 40);
    for (double& x : v) x = u(rng) * u(rng);
    double n = 0.0;
    for (double x : v) n += x * x;
    if (n == 0.0) continue;
    for (double& x : v) x /= std::sqrt(n);
    const auto out = grover_step(AmplitudeVector(v));
    double norm = 0.0;
    for (double x : out.values()) {
      ASSERT_GE(x, 0.0);
      norm += x * x;
    }
    ASSERT_NEAR(norm, 1.0, 1e-9);
  }
}

TEST(AnnealedQae, constant_potential_is_uniform) {
  const Grid1D g(-3.0, 3.0, 7);
  const auto est = annealed_qae(Potential::tabulated({-5.0, 5.0}, {1.0, 1.0}), g, QaeConfig{});
  for (double m : est.mass()) EXPECT_NEAR(m, 1.0 / 128.0, 1e-12);
}

TEST(AnnealedQae, double_well_bimodal_at_boltzmann_modes) {
  const Grid1D g(-3.0, 3.0, 9);
  QaeConfig cfg;
  cfg.n_qubits = 9;
  const auto est = annealed_qae(Potential::double_well_sine(), g, cfg);
  const auto peaks = local_maxima(est.mass());
  ASSERT_EQ(peaks.size(), 2u);
  const auto left = static_cast<long>(boltzmann_argmax(g, false, 0.3));
  const auto right = static_cast<long>(boltzmann_argmax(g, true, 0.3));
  EXPECT_LE(std::abs(static_cast<long>(peaks[0]) - left), 3);
  EXPECT_LE(std::abs(static_cast<long>(peaks[1]) - right), 3);
}

TEST(AnnealedQae, harmonic_mode_at_origin) {
  const Grid1D g(-3.0, 3.0, 7);
  const auto est = annealed_qae(Potential::harmonic(), g, QaeConfig{});
  const auto peaks = local_maxima(est.mass());
  ASSERT_GE(peaks.size(), 1u);
  const auto arg = std::max_element(est.mass().begin(), est.mass().end()) - est.mass().begin();
  EXPECT_LE(std::abs(g[static_cast<std::size_t>(arg)]), g.spacing() + 1e-12);
}

TEST(AnnealedQae, symmetric_potential_gives_symmetric_mass) {
  for (int n : {5, 7, 9}) {
    const Grid1D g(-3.0, 3.0, n);
    QaeConfig cfg;
    cfg.n_qubits = n;
    const auto est = annealed_qae(Potential::double_well_sine(0.0), g, cfg);
    double total = 0.0;
    for (std::size_t i = 0; i < est.size(); ++i) {
      EXPECT_NEAR(est[i], est[est.size() - 1 - i], 1e-6);
      total += est[i];
    }
    EXPECT_NEAR(total, 1.0, 1e-9);
  }
}

TEST(AnnealedQae, normalized_for_random_potentials) {
  Rng rng = make_rng(5, 0);
  std::uniform_real_distribution<double> u(-20.0, 20.0);
  for (int trial = 0; trial < 50; ++trial) {
    std::vector<double> v(64);
    for (double& x : v) x = u(rng);
    QaeConfig cfg;
    cfg.n_qubits = 6;
    cfg.beta = 0.1 + trial * 0.2;
    const auto est = annealed_qae(v, Grid1D(-1.0, 1.0, 6), cfg);
    EXPECT_NEAR(std::accumulate(est.mass().begin(), est.mass().end(), 0.0), 1.0, 1e-9);
  }
}

TEST(QaeConfig, schedule_and_validation) {
  QaeConfig cfg;
  const auto s = cfg.schedule();
  ASSERT_EQ(s.size(), 6u);
  EXPECT_DOUBLE_EQ(s.front(), 0.45);
  EXPECT_DOUBLE_EQ(s.back(), 1.5);
  cfg.anneal_start_fraction = 0.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
  cfg = QaeConfig{};
  cfg.beta = -1.0;
  EXPECT_THROW(cfg.validate(), ConfigError);
}

TEST(ClassicalMc, zero_potential_is_exact) {
  const Grid1D g(0.0, 1.0, 5);
  const auto zero = Potential::tabulated({0.0, 1.0}, {0.0, 0.0});
  for (std::uint64_t k : {1u, 7u, 100u}) {
    EXPECT_NEAR(classical_mc_partition(zero, 0.3, g, k, 3), g.spacing() * 32.0, 1e-12);
  }
}

TEST(ClassicalMc, gaussian_integral_oracle) {
  const double d = 0.3;
  const Grid1D g(-6.0, 6.0, 10);
  // Per-sample variance of N h exp(-V/D) under uniform index sampling.
  double s1 = 0.0, s2 = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) {
    const double y = static_cast<double>(g.size()) * g.spacing() * std::exp(-0.5 * g[i] * g[i] / d);
    s1 += y;
    s2 += y * y;
  }
  const double n = static_cast<double>(g.size());
  const double se = std::sqrt((s2 / n - (s1 / n) * (s1 / n)) / 1e5);
  const double z = classical_mc_partition(Potential::harmonic(), d, g, 100000, 17);
  EXPECT_NEAR(z, std::sqrt(2.0 * std::numbers::pi * d), 3.0 * se);
}

TEST(ClassicalMc, unbiased_over_seeds) {
  const Grid1D g(-3.0, 3.0, 7);
  const auto p = Potential::double_well_sine();
  double exact = 0.0;
  for (std::size_t i = 0; i < g.size(); ++i) exact += g.spacing() * std::exp(-p(g[i]) / 0.3);
  std::vector<double> z;
  for (std::uint64_t seed = 0; seed < 200; ++seed) {
    z.push_back(classical_mc_partition(p, 0.3, g, 10000, seed));
  }
  const double mean = std::accumulate(z.begin(), z.end(), 0.0) / z.size();
  double var = 0.0;
  for (double x : z) var += (x - mean) * (x - mean);
  var /= (z.size() - 1);
  EXPECT_NEAR(mean, exact, 3.0 * std::sqrt(var / z.size()));
  EXPECT_NEAR(PartitionProblem(p, 0.3, g).exact(), exact, 1e-12 * exact);
}

TEST(ClassicalMc, seeded_reproducibility) {
  const Grid1D g(-3.0, 3.0, 7);
  const auto p = Potential::double_well_sine();
  EXPECT_EQ(classical_mc_partition(p, 0.3, g, 500, 9), classical_mc_partition(p, 0.3, g, 500, 9));
}

TEST(SimulatedQae, many_ancillas_are_exact) {
  const Grid1D g(-3.0, 3.0, 7);
  for (const auto& p : {Potential::double_well_sine(), Potential::harmonic()}) {
    const PartitionProblem prob(p, 0.3, g);
    for (std::uint64_t seed = 0; seed < 20; ++seed) {
      Rng rng = make_rng(seed, 0);
      const auto s = prob.simulated_qae(30, rng);
      if (s.phase_success) EXPECT_LT(std::abs(s.estimate - prob.exact()), 1e-6);
    }
  }
}

TEST(SimulatedQae, success_branch_respects_bound) {
  const Grid1D g(-3.0, 3.0, 7);
  const PartitionProblem prob(Potential::double_well_sine(), 0.3, g);
  // Good-state identity: N M h sin^2(theta) = Z_N.
  EXPECT_NEAR(prob.amplitude_scale() * std::pow(std::sin(prob.theta()), 2), prob.exact(), 1e-12);
  for (int m : {2, 5, 8, 12}) {
    const double bound = 2.0 * prob.amplitude_scale() * std::numbers::pi * std::ldexp(1.0, -m);
    EXPECT_DOUBLE_EQ(prob.qae_error_bound(m), bound);
    Rng rng = make_rng(77, static_cast<std::uint64_t>(m));
    int success = 0;
    for (int t = 0; t < 500; ++t) {
      const auto s = prob.simulated_qae(m, rng);
      EXPECT_EQ(s.queries, std::uint64_t{1} << m);
      if (s.phase_success) {
        ++success;
        ASSERT_LE(std::abs(s.estimate - prob.exact()), bound);
      }
    }
    EXPECT_NEAR(success / 500.0, 8.0 / (std::numbers::pi * std::numbers::pi), 0.06);
  }
}

TEST(QueriesToPrecision, zero_variance_needs_one_sample) {
  const Grid1D g(0.0, 1.0, 6);
  const auto zero = Potential::tabulated({0.0, 1.0}, {0.0, 0.0});
  for (double eps : {1e-1, 1e-3, 1e-6}) {
    const auto pt = queries_to_precision(EstimatorMethod::ClassicalMC, zero, 1.0, g, eps, 30);
    EXPECT_EQ(pt.queries, 1u);
    EXPECT_DOUBLE_EQ(pt.success_rate, 1.0);
  }
}

TEST(QueriesToPrecision, halving_epsilon_costs_one_ancilla) {
  const Grid1D g(-3.0, 3.0, 7);
  const PartitionProblem prob(Potential::double_well_sine(), 0.3, g);
  for (double eps : {1e-1, 1e-2, 1e-3}) {
    const auto a = queries_to_precision(EstimatorMethod::SimulatedQae, prob, eps, 60, 4);
    const auto b = queries_to_precision(EstimatorMethod::SimulatedQae, prob, eps / 2, 60, 4);
    const double ratio = static_cast<double>(b.queries) / static_cast<double>(a.queries);
    EXPECT_GE(ratio, 1.5) << eps;
    EXPECT_LE(ratio, 3.0) << eps;
    EXPECT_GE(b.success_rate * 3.0, 2.0);
  }
}

TEST(QueriesToPrecision, errors) {
  const Grid1D g(-3.0, 3.0, 7);
  const PartitionProblem prob(Potential::double_well_sine(), 0.3, g);
  EXPECT_THROW(queries_to_precision(EstimatorMethod::ClassicalMC, prob, 0.1, 29, 0), DomainError);
  EXPECT_THROW(queries_to_precision(EstimatorMethod::ClassicalMC, prob, 0.0, 30, 0), DomainError);
  EXPECT_THROW(queries_to_precision(EstimatorMethod::SimulatedQae, prob, 1e-12, 30, 0),
               ResourceError);
  EXPECT_THROW(queries_to_precision(EstimatorMethod::ClassicalMC, prob, 1e-7, 30, 0),
               ResourceError);
}

TEST(QueriesToPrecision, csv_schema) {
  const Grid1D g(-3.0, 3.0, 7);
  const PartitionProblem prob(Potential::double_well_sine(), 0.3, g);
  std::vector<ComplexityPoint> pts{
      queries_to_precision(EstimatorMethod::ClassicalMC, prob, 0.1, 30, 1),
      queries_to_precision(EstimatorMethod::SimulatedQae, prob, 0.1, 30, 1)};
  std::ostringstream out;
  write_complexity_csv(out, pts);
  std::istringstream in(out.str());
  std::string line;
  std::getline(in, line);
  EXPECT_EQ(line, "method,epsilon,queries,achieved_error,success_rate");
  std::getline(in, line);
  EXPECT_EQ(line.rfind("classical_mc,0.1,", 0), 0u) << line;
  std::getline(in, line);
  EXPECT_EQ(line.rfind("simulated_qae,0.1,", 0), 0u) << line;
}
