#include "quantfp/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <string>

#include "quantfp/errors.hpp"

namespace quantfp {

std::vector<double> smooth(std::span<const double> series, int window) {
  if (window < 1) throw DomainError("smoothing window must be >= 1");
  std::vector<double> out(series.size());
  const auto w = static_cast<std::size_t>(window);
  for (std::size_t i = 0; i < series.size(); ++i) {
    const std::size_t lo = i + 1 >= w ? i + 1 - w : 0;
    double s = 0.0;
    for (std::size_t j = lo; j <= i; ++j) s += series[j];
    out[i] = s / static_cast<double>(i + 1 - lo);
  }
  return out;
}

double policy_entropy(double log_sigma, int m) {
  if (m < 1) throw DomainError("action dimension must be >= 1");
  return m * (0.5 * std::log(2.0 * std::numbers::pi * std::numbers::e) + log_sigma);
}

namespace {

void require_same_grid(const DensityEstimate& p, const DensityEstimate& q) {
  if (!p.grid().same_as(q.grid())) throw InputError("densities live on different grids");
}

}  // namespace

double kl_divergence(const DensityEstimate& p, const DensityEstimate& q) {
  require_same_grid(p, q);
  double kl = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p[i] > 0.0) kl += p[i] * std::log(p[i] / std::max(q[i], 1e-12));
  }
  return std::max(kl, 0.0);
}

double mse(const DensityEstimate& p, const DensityEstimate& q) {
  require_same_grid(p, q);
  double s = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    const double d = p.density(i) - q.density(i);
    s += d * d;
  }
  return s / static_cast<double>(p.size());
}

double coverage(const DensityEstimate& p, double tau) {
  if (tau < 0.0) throw DomainError("coverage threshold must be >= 0");
  double covered = 0.0;
  for (std::size_t i = 0; i < p.size(); ++i) {
    if (p.density(i) > tau) covered += p[i];
  }
  return covered;
}

DensityEstimate histogram_density(const Grid1D& grid, std::span<const double> samples) {
  if (samples.empty()) throw InputError("histogram needs at least one sample");
  std::vector<double> counts(grid.size(), 0.0);
  for (double x : samples) counts[grid.nearest_index(x)] += 1.0;
  return DensityEstimate::from_weights(grid, std::move(counts));
}

Table1Summary table1_summary(const RunArtifacts& run) {
  const std::size_t n = run.episodes();
  if (n < kSummaryWindow) {
    throw InputError("table summary needs >= 80 episodes, run has " + std::to_string(n));
  }
  if (run.discovery_fraction.size() != n) throw InputError("run artifact lengths differ");
  Table1Summary out;
  const std::size_t first = n - kSummaryWindow;
  double sum = 0.0, rate = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    sum += run.total_env_reward[i];
    rate += run.discovery_fraction[i];
  }
  out.mean_reward = sum / static_cast<double>(kSummaryWindow);
  double var = 0.0;
  for (std::size_t i = first; i < n; ++i) {
    const double d = run.total_env_reward[i] - out.mean_reward;
    var += d * d;
  }
  out.std_reward = std::sqrt(var / static_cast<double>(kSummaryWindow));
  out.peak_reward = *std::max_element(run.total_env_reward.begin(), run.total_env_reward.end());
  out.global_rate = rate / static_cast<double>(kSummaryWindow);
  double all = 0.0;
  for (double r : run.total_env_reward) all += r;
  const double steps = static_cast<double>(n) * std::max(run.horizon, 1);
  out.sample_efficiency = all / steps;
  return out;
}

double fit_power_law(std::span<const double> xs, std::span<const double> ys) {
  if (xs.size() != ys.size()) throw InputError("power-law fit: length mismatch");
  if (xs.size() < 3) throw InputError("power-law fit needs >= 3 points");
  const auto n = static_cast<double>(xs.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!(xs[i] > 0.0) || !(ys[i] > 0.0)) {
      throw InputError("power-law fit needs strictly positive data (index " +
                       std::to_string(i) + ")");
    }
    sx += std::log(xs[i]);
    sy += std::log(ys[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxx = 0.0, sxy = 0.0;
  for (std::size_t i = 0; i < xs.size(); ++i) {
    const double dx = std::log(xs[i]) - mx;
    sxx += dx * dx;
    sxy += dx * (std::log(ys[i]) - my);
  }
  if (!(sxx > 0.0)) throw InputError("power-law fit needs at least two distinct x values");
  return sxy / sxx;
}

}  // namespace quantfp
