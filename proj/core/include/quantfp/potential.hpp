#pragma once

#include <filesystem>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quantfp/grid.hpp"

namespace quantfp {

enum class PotentialKind { DoubleWellSine, Harmonic, RewardSlice, Tabulated };

std::string_view to_string(PotentialKind kind);
PotentialKind parse_potential_kind(std::string_view name);

// A one-dimensional potential V(x).
//
//   DoubleWellSine  V(x) = 1/2 (x^2 - 2)^2 + a sin(3x)      params = {a}, default a = 0.3
//   Harmonic        V(x) = 1/2 k x^2                         params = {k}, default k = 1
//   RewardSlice     V(x) = -r(x, 0, ..., 0) of the multimodal reward; eval_potential
//                   shifts it so the grid minimum is exactly 0
//   Tabulated       piecewise-linear through (x_i, V_i), constant beyond the ends
class Potential {
 public:
  static Potential double_well_sine(double sine_amplitude = 0.3);
  static Potential harmonic(double stiffness = 1.0);
  static Potential reward_slice();
  static Potential tabulated(std::vector<double> xs, std::vector<double> values);
  /// Two-column CSV (x, V); a non-numeric first row is treated as a header.
  static Potential tabulated_from_csv(const std::filesystem::path& path);
  /// Build from a config-style kind name and parameter list.
  static Potential from_spec(std::string_view kind, std::span<const double> params);

  PotentialKind kind() const noexcept { return kind_; }
  std::span<const double> parameters() const noexcept { return params_; }

  /// Raw V(x) without any grid-dependent shift.
  double operator()(double x) const;

 private:
  Potential(PotentialKind kind, std::vector<double> params)
      : kind_(kind), params_(std::move(params)) {}

  PotentialKind kind_;
  std::vector<double> params_;
  std::vector<double> table_x_;
  std::vector<double> table_v_;
};

/// V at every grid point. RewardSlice is shifted to have minimum 0 over the grid.
/// Throws NumericError naming the first non-finite index.
std::vector<double> eval_potential(const Potential& p, const Grid1D& g);

/// Central difference (V(x + h) - V(x - h)) / (2h).
double gradient_fd(const Potential& p, double x, double h_fd = 1e-3);

}  // namespace quantfp
