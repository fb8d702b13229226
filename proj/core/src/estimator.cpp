#include "quantfp/estimator.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <numeric>
#include <ostream>
#include <string>

#include "quantfp/csv.hpp"
#include "quantfp/errors.hpp"

namespace quantfp {

namespace {

constexpr double kNormTolerance = 1e-9;

double l2_norm(std::span<const double> v) {
  double s = 0.0;
  for (double x : v) s += x * x;
  return std::sqrt(s);
}

// Value at quantile q of |errors| (nearest-rank).
double error_quantile(std::vector<double> errors, double q) {
  std::sort(errors.begin(), errors.end());
  const auto rank = static_cast<std::size_t>(std::ceil(q * static_cast<double>(errors.size())));
  return errors[std::clamp<std::size_t>(rank, 1, errors.size()) - 1];
}

bool meets_success_threshold(int successes, int trials) {
  // >= 2/3 without floating-point rounding.
  return 3 * successes >= 2 * trials;
}

}  // namespace

AmplitudeVector::AmplitudeVector(std::vector<double> values) : values_(std::move(values)) {
  if (values_.empty()) throw InputError("amplitude vector must be nonempty");
  for (std::size_t i = 0; i < values_.size(); ++i) {
    if (!(values_[i] >= 0.0) || !std::isfinite(values_[i])) {
      throw NumericError("amplitude " + std::to_string(i) + " is negative or non-finite");
    }
  }
  if (std::abs(l2_norm(values_) - 1.0) > kNormTolerance) {
    throw NumericError("amplitude vector is not unit-norm");
  }
}

DensityEstimate::DensityEstimate(Grid1D grid, std::vector<double> mass)
    : grid_(std::move(grid)), mass_(std::move(mass)) {
  if (mass_.size() != grid_.size()) {
    throw InputError("density has " + std::to_string(mass_.size()) + " cells for a grid of " +
                     std::to_string(grid_.size()));
  }
  double total = 0.0;
  for (std::size_t i = 0; i < mass_.size(); ++i) {
    if (!(mass_[i] >= 0.0) || !std::isfinite(mass_[i])) {
      throw NumericError("density mass at index " + std::to_string(i) +
                         " is negative or non-finite");
    }
    total += mass_[i];
  }
  if (std::abs(total - 1.0) > kNormTolerance) {
    throw NumericError("density mass sums to " + format_number(total) + ", expected 1");
  }
}

DensityEstimate DensityEstimate::from_weights(Grid1D grid, std::vector<double> weights) {
  double total = 0.0;
  for (double w : weights) {
    if (!(w >= 0.0) || !std::isfinite(w)) throw NumericError("negative or non-finite weight");
    total += w;
  }
  if (!(total > 0.0)) throw NumericError("weights sum to zero");
  for (double& w : weights) w /= total;
  return DensityEstimate(std::move(grid), std::move(weights));
}

void QaeConfig::validate() const {
  if (!(beta > 0.0) || !std::isfinite(beta)) throw ConfigError("qae beta must be positive");
  if (grover_iters < 0) throw ConfigError("grover_iters must be >= 0");
  if (anneal_steps < 1) throw ConfigError("anneal_steps must be >= 1");
  if (!(anneal_start_fraction > 0.0 && anneal_start_fraction <= 1.0)) {
    throw ConfigError("anneal_start_fraction must lie in (0, 1]");
  }
  if (reflections_per_iteration < 1) throw ConfigError("reflections_per_iteration must be >= 1");
  if (n_qubits < kMinQubits || n_qubits > kMaxQubits) {
    throw ConfigError("qae n_qubits out of range");
  }
}

std::vector<double> QaeConfig::schedule() const {
  std::vector<double> betas(static_cast<std::size_t>(anneal_steps));
  const double start = anneal_start_fraction * beta;
  if (anneal_steps == 1) {
    betas[0] = beta;
    return betas;
  }
  for (int i = 0; i < anneal_steps; ++i) {
    betas[static_cast<std::size_t>(i)] =
        start + (beta - start) * static_cast<double>(i) / static_cast<double>(anneal_steps - 1);
  }
  return betas;
}

AmplitudeVector prepare_amplitudes(std::span<const double> v_values, double beta) {
  if (v_values.empty()) throw InputError("prepare_amplitudes needs at least one value");
  if (!(beta > 0.0)) throw DomainError("beta must be positive");
  for (std::size_t i = 0; i < v_values.size(); ++i) {
    if (!std::isfinite(v_values[i])) {
      throw NumericError("potential value at index " + std::to_string(i) + " is not finite");
    }
  }
  const double lowest = *std::min_element(v_values.begin(), v_values.end());
  std::vector<double> a(v_values.size());
  for (std::size_t i = 0; i < a.size(); ++i) a[i] = std::exp(-beta * (v_values[i] - lowest) / 2.0);
  const double norm = l2_norm(a);
  if (!(norm > 0.0) || !std::isfinite(norm)) {
    throw NumericError("amplitude weights vanished after exponentiation");
  }
  for (double& x : a) x /= norm;
  return AmplitudeVector(std::move(a));
}

AmplitudeVector grover_step(const AmplitudeVector& a) {
  const auto in = a.values();
  const double mean = std::accumulate(in.begin(), in.end(), 0.0) / static_cast<double>(in.size());
  std::vector<double> out(in.size());
  for (std::size_t i = 0; i < in.size(); ++i) out[i] = std::max(2.0 * mean - in[i], 0.0);
  const double norm = l2_norm(out);
  if (!(norm > 0.0)) {
    std::fill(out.begin(), out.end(), 1.0 / std::sqrt(static_cast<double>(out.size())));
    return AmplitudeVector(std::move(out));
  }
  for (double& x : out) x /= norm;
  return AmplitudeVector(std::move(out));
}

DensityEstimate annealed_qae(std::span<const double> v_values, const Grid1D& g,
                             const QaeConfig& cfg) {
  cfg.validate();
  if (v_values.size() != g.size()) throw InputError("potential values do not match the grid");
  std::vector<double> acc(g.size(), 0.0);
  for (double beta_i : cfg.schedule()) {
    AmplitudeVector a = prepare_amplitudes(v_values, beta_i);
    for (int k = 0; k < cfg.grover_iters; ++k) {
      for (int r = 0; r < cfg.reflections_per_iteration; ++r) a = grover_step(a);
    }
    for (std::size_t i = 0; i < acc.size(); ++i) acc[i] += a[i] * a[i];
  }
  return DensityEstimate::from_weights(g, std::move(acc));
}

DensityEstimate annealed_qae(const Potential& p, const Grid1D& g, const QaeConfig& cfg) {
  const auto v = eval_potential(p, g);
  return annealed_qae(v, g, cfg);
}

PartitionProblem::PartitionProblem(const Potential& p, double d_coeff, const Grid1D& g)
    : spacing_(g.spacing()) {
  const auto v = eval_potential(p, g);
  finish_setup(v, d_coeff);
}

PartitionProblem::PartitionProblem(std::span<const double> v_values, double d_coeff,
                                   double spacing)
    : spacing_(spacing) {
  if (!(spacing > 0.0)) throw DomainError("grid spacing must be positive");
  finish_setup(v_values, d_coeff);
}

void PartitionProblem::finish_setup(std::span<const double> v_values, double d_coeff) {
  if (!(d_coeff > 0.0)) throw DomainError("diffusion coefficient must be positive");
  if (v_values.empty()) throw InputError("partition problem needs a nonempty grid");
  const double lowest = *std::min_element(v_values.begin(), v_values.end());
  scale_ = std::exp(-lowest / d_coeff);
  if (!std::isfinite(scale_) || !(scale_ > 0.0)) {
    throw NumericError("exp(-min V / D) is not representable");
  }
  weights_.resize(v_values.size());
  double sum = 0.0;
  for (std::size_t i = 0; i < weights_.size(); ++i) {
    weights_[i] = std::exp(-(v_values[i] - lowest) / d_coeff);
    sum += weights_[i];
  }
  exact_ = scale_ * spacing_ * sum;
  const double sin2 = std::clamp(sum / static_cast<double>(weights_.size()), 0.0, 1.0);
  theta_ = std::asin(std::sqrt(sin2));
}

double PartitionProblem::qae_error_bound(int m_ancilla) const {
  return 2.0 * amplitude_scale() * std::numbers::pi * std::ldexp(1.0, -m_ancilla);
}

double PartitionProblem::classical_estimate(std::uint64_t k, Rng& rng) const {
  if (k < 1) throw DomainError("classical estimator needs k >= 1");
  std::uniform_int_distribution<std::size_t> pick(0, weights_.size() - 1);
  double sum = 0.0;
  for (std::uint64_t j = 0; j < k; ++j) sum += weights_[pick(rng)];
  return static_cast<double>(weights_.size()) * spacing_ * scale_ * sum / static_cast<double>(k);
}

QaeSample PartitionProblem::simulated_qae(int m_ancilla, Rng& rng) const {
  if (m_ancilla < 1) throw DomainError("phase estimation needs m_ancilla >= 1");
  constexpr double kSuccess = 8.0 / (std::numbers::pi * std::numbers::pi);
  std::uniform_real_distribution<double> unit(0.0, 1.0);
  const double resolution = std::numbers::pi * std::ldexp(1.0, -m_ancilla);
  QaeSample out;
  out.phase_success = unit(rng) < kSuccess;
  const double halfwidth = out.phase_success ? resolution : std::numbers::pi / 2.0;
  out.theta_hat = theta_ + halfwidth * (2.0 * unit(rng) - 1.0);
  const double s = std::sin(out.theta_hat);
  out.estimate = amplitude_scale() * s * s;
  out.queries = std::uint64_t{1} << m_ancilla;
  return out;
}

double classical_mc_partition(const Potential& p, double d_coeff, const Grid1D& g,
                              std::uint64_t k, std::uint64_t seed) {
  const PartitionProblem problem(p, d_coeff, g);
  Rng rng = make_rng(seed, 0xc1a55u);
  return problem.classical_estimate(k, rng);
}

double simulated_qae_partition(const Potential& p, double d_coeff, const Grid1D& g,
                               int m_ancilla, std::uint64_t seed) {
  const PartitionProblem problem(p, d_coeff, g);
  Rng rng = make_rng(seed, 0x9ae0u);
  return problem.simulated_qae(m_ancilla, rng).estimate;
}

std::string_view to_string(EstimatorMethod method) {
  return method == EstimatorMethod::ClassicalMC ? "classical_mc" : "simulated_qae";
}

namespace {

ComplexityPoint classical_queries(const PartitionProblem& problem, double epsilon, int trials,
                                  std::uint64_t seed) {
  const std::size_t n = problem.size();
  const double box = static_cast<double>(n) * problem.spacing() * problem.max_weight();
  const double exact = problem.exact();
  std::vector<Rng> streams;
  streams.reserve(static_cast<std::size_t>(trials));
  for (int t = 0; t < trials; ++t) {
    streams.push_back(make_rng(seed, 0x10000u + static_cast<std::uint64_t>(t)));
  }
  std::vector<double> sums(static_cast<std::size_t>(trials), 0.0);
  std::vector<double> errors(sums.size());
  std::uniform_int_distribution<std::size_t> pick(0, n - 1);
  const auto prob = problem.probabilities();

  std::uint64_t drawn = 0;
  for (std::uint64_t k = 1; k <= kMaxClassicalQueries; k *= 2) {
    int successes = 0;
    for (std::size_t t = 0; t < sums.size(); ++t) {
      double s = sums[t];
      for (std::uint64_t j = drawn; j < k; ++j) s += prob[pick(streams[t])];
      sums[t] = s;
      errors[t] = std::abs(box * s / static_cast<double>(k) - exact);
      if (errors[t] <= epsilon) ++successes;
    }
    drawn = k;
    if (meets_success_threshold(successes, trials)) {
      return {epsilon, EstimatorMethod::ClassicalMC, k, error_quantile(errors, 2.0 / 3.0),
              static_cast<double>(successes) / trials, trials};
    }
  }
  throw ResourceError("classical estimator exceeded " + std::to_string(kMaxClassicalQueries) +
                      " samples at epsilon " + format_number(epsilon));
}

ComplexityPoint qae_queries(const PartitionProblem& problem, double epsilon, int trials,
                            std::uint64_t seed) {
  const double exact = problem.exact();
  std::vector<double> errors(static_cast<std::size_t>(trials));
  for (int m = 1; m <= kMaxAncilla; ++m) {
    int successes = 0;
    for (int t = 0; t < trials; ++t) {
      Rng rng = make_rng(seed, (static_cast<std::uint64_t>(m) << 32) + static_cast<std::uint64_t>(t));
      const double err = std::abs(problem.simulated_qae(m, rng).estimate - exact);
      errors[static_cast<std::size_t>(t)] = err;
      if (err <= epsilon) ++successes;
    }
    if (meets_success_threshold(successes, trials)) {
      return {epsilon, EstimatorMethod::SimulatedQae, std::uint64_t{1} << m,
              error_quantile(errors, 2.0 / 3.0), static_cast<double>(successes) / trials, trials};
    }
  }
  throw ResourceError("phase estimation exceeded " + std::to_string(kMaxAncilla) +
                      " ancilla bits at epsilon " + format_number(epsilon));
}

}  // namespace

ComplexityPoint queries_to_precision(EstimatorMethod method, const PartitionProblem& problem,
                                     double epsilon, int trials, std::uint64_t seed) {
  if (!(epsilon > 0.0)) throw DomainError("epsilon must be positive");
  if (trials < 30) throw DomainError("queries_to_precision needs >= 30 trials");
  return method == EstimatorMethod::ClassicalMC ? classical_queries(problem, epsilon, trials, seed)
                                                : qae_queries(problem, epsilon, trials, seed);
}

ComplexityPoint queries_to_precision(EstimatorMethod method, const Potential& p,
                                     double d_coeff, const Grid1D& g, double epsilon,
                                     int trials, std::uint64_t seed) {
  return queries_to_precision(method, PartitionProblem(p, d_coeff, g), epsilon, trials, seed);
}

void write_complexity_csv(std::ostream& out, std::span<const ComplexityPoint> points) {
  CsvWriter csv(out);
  csv.header({"method", "epsilon", "queries", "achieved_error", "success_rate"});
  for (const auto& pt : points) {
    csv.cell(to_string(pt.method))
        .cell(pt.epsilon)
        .cell(static_cast<std::size_t>(pt.queries))
        .cell(pt.achieved_error)
        .cell(pt.success_rate);
    csv.end_row();
  }
}

}  // namespace quantfp
