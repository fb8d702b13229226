#pragma once

#include <cstddef>
#include <span>
#include <vector>

namespace quantfp {

inline constexpr int kMinQubits = 3;
inline constexpr int kMaxQubits = 12;

/// Endpoint-inclusive uniform grid with 2^n_qubits points on [lower, upper].
class Grid1D {
 public:
  Grid1D(double lower, double upper, int n_qubits);

  double lower() const noexcept { return lower_; }
  double upper() const noexcept { return upper_; }
  int n_qubits() const noexcept { return n_qubits_; }
  double spacing() const noexcept { return spacing_; }
  std::size_t size() const noexcept { return points_.size(); }
  std::span<const double> points() const noexcept { return points_; }
  double operator[](std::size_t i) const { return points_[i]; }

  /// Index of the nearest grid point; x outside the domain is clipped first.
  std::size_t nearest_index(double x) const noexcept;

  bool same_as(const Grid1D& other) const noexcept;

 private:
  double lower_;
  double upper_;
  int n_qubits_;
  double spacing_;
  std::vector<double> points_;
};

Grid1D make_grid(double lower, double upper, int n_qubits);

/// Two axes enumerated row-major: index(i, j) = i * axis2.size() + j.
struct Grid2D {
  Grid1D axis1;
  Grid1D axis2;

  std::size_t size() const noexcept { return axis1.size() * axis2.size(); }
  std::size_t index(std::size_t i, std::size_t j) const noexcept {
    return i * axis2.size() + j;
  }
};

}  // namespace quantfp
