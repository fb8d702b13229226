#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "quantfp/estimator.hpp"

namespace quantfp {

/// Trailing moving average; the first window-1 entries average the available prefix.
std::vector<double> smooth(std::span<const double> series, int window = 25);

/// Differential entropy of N(0, sigma^2 I_m): m (1/2 ln(2 pi e) + log_sigma).
double policy_entropy(double log_sigma, int m);

/// sum_i p_i ln(p_i / max(q_i, 1e-12)); cells with p_i = 0 contribute 0.
double kl_divergence(const DensityEstimate& p, const DensityEstimate& q);

/// Mean squared difference of densities (mass / h).
double mse(const DensityEstimate& p, const DensityEstimate& q);

/// Total mass of cells whose density (mass / h) exceeds tau.
double coverage(const DensityEstimate& p, double tau);

/// Histogram of samples on the grid (nearest cell, clipped to the domain).
DensityEstimate histogram_density(const Grid1D& grid, std::span<const double> samples);

struct RunArtifacts {
  std::string agent;
  std::uint64_t seed = 0;
  int horizon = 0;
  std::vector<double> total_env_reward;
  std::vector<double> total_bonus;
  std::vector<double> mean_entropy;
  std::vector<double> discovery_fraction;
  std::vector<double> final_sigma;

  std::size_t episodes() const noexcept { return total_env_reward.size(); }
};

struct Table1Summary {
  double mean_reward = 0.0;
  double std_reward = 0.0;
  double peak_reward = 0.0;
  double global_rate = 0.0;
  double sample_efficiency = 0.0;  // total env reward per env step
};

inline constexpr std::size_t kSummaryWindow = 80;

/// Final-80-episode statistics; throws InputError for fewer than 80 episodes.
Table1Summary table1_summary(const RunArtifacts& run);

/// Least-squares slope of ln y on ln x. Needs >= 3 strictly positive points.
double fit_power_law(std::span<const double> xs, std::span<const double> ys);

}  // namespace quantfp
