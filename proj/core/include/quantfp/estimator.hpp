#pragma once

#include <cstdint>
#include <iosfwd>
#include <span>
#include <string_view>
#include <vector>

#include "quantfp/grid.hpp"
#include "quantfp/potential.hpp"
#include "quantfp/rng.hpp"

namespace quantfp {

/// Nonnegative vector with unit L2 norm (checked to 1e-9 on construction).
class AmplitudeVector {
 public:
  explicit AmplitudeVector(std::vector<double> values);

  std::span<const double> values() const noexcept { return values_; }
  std::size_t size() const noexcept { return values_.size(); }
  double operator[](std::size_t i) const { return values_[i]; }

 private:
  std::vector<double> values_;
};

/// Probability mass over a grid: nonnegative, sums to 1 (checked to 1e-9).
class DensityEstimate {
 public:
  DensityEstimate(Grid1D grid, std::vector<double> mass);
  /// Normalizes nonnegative weights; throws NumericError if they sum to zero.
  static DensityEstimate from_weights(Grid1D grid, std::vector<double> weights);

  const Grid1D& grid() const noexcept { return grid_; }
  std::span<const double> mass() const noexcept { return mass_; }
  std::size_t size() const noexcept { return mass_.size(); }
  double operator[](std::size_t i) const { return mass_[i]; }
  /// Mass rescaled to density units, mass / h.
  double density(std::size_t i) const { return mass_[i] / grid_.spacing(); }
  /// Mass of the cell nearest to x (x clipped to the domain).
  double mass_at(double x) const { return mass_[grid_.nearest_index(x)]; }

 private:
  Grid1D grid_;
  std::vector<double> mass_;
};

struct QaeConfig {
  double beta = 1.5;
  int n_qubits = 7;
  int grover_iters = 5;
  int anneal_steps = 6;
  double anneal_start_fraction = 0.3;
  // A Grover iterate is the product of two reflections. Setting this to 1 applies a
  // single inversion about the mean per iteration, which with an odd iteration
  // count moves the mass away from the wells.
  int reflections_per_iteration = 2;

  void validate() const;
  /// Inverse temperatures linspace(anneal_start_fraction * beta, beta, anneal_steps).
  std::vector<double> schedule() const;
};

/// a_i proportional to exp(-beta (V_i - min V) / 2), unit L2 norm.
AmplitudeVector prepare_amplitudes(std::span<const double> v_values, double beta);

/// Inversion about the mean, clamp at zero, renormalize. An all-zero result
/// falls back to the uniform vector.
AmplitudeVector grover_step(const AmplitudeVector& a);

/// Temperature-annealed estimator of the stationary density: squared amplitudes
/// are accumulated with equal weight over the annealing schedule.
DensityEstimate annealed_qae(const Potential& p, const Grid1D& g, const QaeConfig& cfg);
DensityEstimate annealed_qae(std::span<const double> v_values, const Grid1D& g,
                             const QaeConfig& cfg);

// ---------------------------------------------------------------------------
// Partition function Z_N = h * sum_i exp(-V(x_i) / D) and its estimators.

struct QaeSample {
  double estimate = 0.0;
  double theta_hat = 0.0;
  bool phase_success = false;  // drew the |theta_hat - theta| <= pi 2^-m branch
  std::uint64_t queries = 0;   // 2^m
};

/// Precomputed Boltzmann weights for one (potential, D, grid) triple.
class PartitionProblem {
 public:
  PartitionProblem(const Potential& p, double d_coeff, const Grid1D& g);
  PartitionProblem(std::span<const double> v_values, double d_coeff, double spacing);

  std::size_t size() const noexcept { return weights_.size(); }
  double spacing() const noexcept { return spacing_; }
  /// exp(-V_i / D).
  double weight(std::size_t i) const { return scale_ * weights_[i]; }
  /// Oracle probabilities p_i = exp(-V_i / D) / M, each in (0, 1].
  std::span<const double> probabilities() const noexcept { return weights_; }
  /// M = max_i exp(-V_i / D).
  double max_weight() const noexcept { return scale_; }
  /// Exact Z_N by full grid summation.
  double exact() const noexcept { return exact_; }
  /// Good-state angle: sin^2(theta) = Z_N / (N M h).
  double theta() const noexcept { return theta_; }
  /// N M h, the factor multiplying sin^2(theta).
  double amplitude_scale() const noexcept {
    return static_cast<double>(size()) * scale_ * spacing_;
  }
  /// Success-branch error bound 2 N M h pi 2^-m.
  double qae_error_bound(int m_ancilla) const;

  /// (N h / k) sum_j exp(-V(X_j)/D), X_j uniform on the grid.
  double classical_estimate(std::uint64_t k, Rng& rng) const;
  /// Phase-estimation error model: with probability 8/pi^2 theta_hat lies uniformly
  /// within pi 2^-m of theta, otherwise the phase error is uniform on [-pi/2, pi/2].
  QaeSample simulated_qae(int m_ancilla, Rng& rng) const;

 private:
  void finish_setup(std::span<const double> v_values, double d_coeff);

  std::vector<double> weights_;  // exp(-(V_i - min V)/D), max entry 1
  double spacing_ = 0.0;
  double scale_ = 1.0;  // exp(-min V / D)
  double exact_ = 0.0;
  double theta_ = 0.0;
};

double classical_mc_partition(const Potential& p, double d_coeff, const Grid1D& g,
                              std::uint64_t k, std::uint64_t seed);
double simulated_qae_partition(const Potential& p, double d_coeff, const Grid1D& g,
                               int m_ancilla, std::uint64_t seed);

enum class EstimatorMethod { ClassicalMC, SimulatedQae };
std::string_view to_string(EstimatorMethod method);

struct ComplexityPoint {
  double epsilon = 0.0;
  EstimatorMethod method = EstimatorMethod::ClassicalMC;
  std::uint64_t queries = 0;
  double achieved_error = 0.0;  // |Z_hat - Z_N| level met by 2/3 of the trials
  double success_rate = 0.0;    // fraction of trials with |Z_hat - Z_N| <= epsilon
  int trials = 0;
};

inline constexpr std::uint64_t kMaxClassicalQueries = 100'000'000;
inline constexpr int kMaxAncilla = 30;

/// Smallest query budget at which >= 2/3 of the trials reach |Z_hat - Z_N| <= epsilon.
/// ClassicalMC doubles k = 1, 2, 4, ...; each trial extends one sample stream, so the
/// estimate at k reuses the first k samples. SimulatedQae scans m = 1, 2, ... with
/// queries = 2^m. Exceeding the budget throws ResourceError.
ComplexityPoint queries_to_precision(EstimatorMethod method, const PartitionProblem& problem,
                                     double epsilon, int trials, std::uint64_t seed);
ComplexityPoint queries_to_precision(EstimatorMethod method, const Potential& p,
                                     double d_coeff, const Grid1D& g, double epsilon,
                                     int trials, std::uint64_t seed = 0);

/// CSV with header method,epsilon,queries,achieved_error,success_rate.
void write_complexity_csv(std::ostream& out, std::span<const ComplexityPoint> points);

}  // namespace quantfp
