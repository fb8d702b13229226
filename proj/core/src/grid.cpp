#include "quantfp/grid.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quantfp/errors.hpp"

namespace quantfp {

Grid1D::Grid1D(double lower, double upper, int n_qubits)
    : lower_(lower), upper_(upper), n_qubits_(n_qubits), spacing_(0.0) {
  if (!std::isfinite(lower) || !std::isfinite(upper) || !(lower < upper)) {
    throw DomainError("grid bounds must satisfy lower < upper (got " +
                      std::to_string(lower) + ", " + std::to_string(upper) + ")");
  }
  if (n_qubits < kMinQubits || n_qubits > kMaxQubits) {
    throw ConfigError("n_qubits must lie in [" + std::to_string(kMinQubits) + ", " +
                      std::to_string(kMaxQubits) + "], got " +
                      std::to_string(n_qubits));
  }
  const std::size_t n = std::size_t{1} << n_qubits;
  spacing_ = (upper - lower) / static_cast<double>(n - 1);
  points_.resize(n);
  for (std::size_t i = 0; i < n; ++i) {
    points_[i] = lower + spacing_ * static_cast<double>(i);
  }
  points_.back() = upper;
}

std::size_t Grid1D::nearest_index(double x) const noexcept {
  const double clipped = std::clamp(x, lower_, upper_);
  const auto i = static_cast<std::size_t>(std::lround((clipped - lower_) / spacing_));
  return std::min(i, points_.size() - 1);
}

bool Grid1D::same_as(const Grid1D& other) const noexcept {
  return n_qubits_ == other.n_qubits_ && lower_ == other.lower_ && upper_ == other.upper_;
}

Grid1D make_grid(double lower, double upper, int n_qubits) {
  return Grid1D(lower, upper, n_qubits);
}

}  // namespace quantfp
