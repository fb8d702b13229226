#include "quantfp/potential.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "quantfp/environment.hpp"
#include "quantfp/errors.hpp"

namespace quantfp {

std::string_view to_string(PotentialKind kind) {
  switch (kind) {
    case PotentialKind::DoubleWellSine: return "double_well_sine";
    case PotentialKind::Harmonic: return "harmonic";
    case PotentialKind::RewardSlice: return "reward_slice";
    case PotentialKind::Tabulated: return "tabulated";
  }
  return "unknown";
}

PotentialKind parse_potential_kind(std::string_view name) {
  if (name == "double_well_sine") return PotentialKind::DoubleWellSine;
  if (name == "harmonic") return PotentialKind::Harmonic;
  if (name == "reward_slice") return PotentialKind::RewardSlice;
  if (name == "tabulated") return PotentialKind::Tabulated;
  throw ConfigError("unknown potential kind '" + std::string(name) + "'");
}

Potential Potential::double_well_sine(double sine_amplitude) {
  return Potential(PotentialKind::DoubleWellSine, {sine_amplitude});
}

Potential Potential::harmonic(double stiffness) {
  if (!(stiffness > 0.0) || !std::isfinite(stiffness)) {
    throw ConfigError("harmonic stiffness must be positive and finite");
  }
  return Potential(PotentialKind::Harmonic, {stiffness});
}

Potential Potential::reward_slice() { return Potential(PotentialKind::RewardSlice, {}); }

Potential Potential::tabulated(std::vector<double> xs, std::vector<double> values) {
  if (xs.size() != values.size() || xs.size() < 2) {
    throw InputError("tabulated potential needs >= 2 (x, V) pairs of equal length");
  }
  for (std::size_t i = 0; i < xs.size(); ++i) {
    if (!std::isfinite(xs[i]) || !std::isfinite(values[i])) {
      throw NumericError("tabulated potential has a non-finite entry at row " +
                         std::to_string(i));
    }
    if (i > 0 && !(xs[i] > xs[i - 1])) {
      throw InputError("tabulated potential x column must be strictly increasing");
    }
  }
  Potential p(PotentialKind::Tabulated, {});
  p.table_x_ = std::move(xs);
  p.table_v_ = std::move(values);
  return p;
}

Potential Potential::tabulated_from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw InputError("cannot open potential table " + path.string());
  std::vector<double> xs, vs;
  std::string line;
  bool first = true;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::replace(line.begin(), line.end(), ',', ' ');
    std::istringstream row(line);
    double x = 0.0, v = 0.0;
    if (!(row >> x >> v)) {
      if (first) {
        first = false;
        continue;
      }
      throw InputError("malformed row in potential table " + path.string() + ": " + line);
    }
    first = false;
    xs.push_back(x);
    vs.push_back(v);
  }
  return tabulated(std::move(xs), std::move(vs));
}

Potential Potential::from_spec(std::string_view kind, std::span<const double> params) {
  switch (parse_potential_kind(kind)) {
    case PotentialKind::DoubleWellSine:
      return double_well_sine(params.empty() ? 0.3 : params[0]);
    case PotentialKind::Harmonic:
      return harmonic(params.empty() ? 1.0 : params[0]);
    case PotentialKind::RewardSlice:
      return reward_slice();
    case PotentialKind::Tabulated: {
      // Inline form: x0, V0, x1, V1, ...
      if (params.size() % 2 != 0) {
        throw ConfigError("inline tabulated potential needs an even parameter count");
      }
      std::vector<double> xs, vs;
      for (std::size_t i = 0; i < params.size(); i += 2) {
        xs.push_back(params[i]);
        vs.push_back(params[i + 1]);
      }
      return tabulated(std::move(xs), std::move(vs));
    }
  }
  throw ConfigError("unreachable potential kind");
}

double Potential::operator()(double x) const {
  switch (kind_) {
    case PotentialKind::DoubleWellSine: {
      const double w = x * x - 2.0;
      return 0.5 * w * w + params_[0] * std::sin(3.0 * x);
    }
    case PotentialKind::Harmonic:
      return 0.5 * params_[0] * x * x;
    case PotentialKind::RewardSlice:
      return -reward_landscape_x1(x);
    case PotentialKind::Tabulated: {
      if (x <= table_x_.front()) return table_v_.front();
      if (x >= table_x_.back()) return table_v_.back();
      const auto it = std::upper_bound(table_x_.begin(), table_x_.end(), x);
      const auto hi = static_cast<std::size_t>(it - table_x_.begin());
      const std::size_t lo = hi - 1;
      const double t = (x - table_x_[lo]) / (table_x_[hi] - table_x_[lo]);
      return table_v_[lo] + t * (table_v_[hi] - table_v_[lo]);
    }
  }
  return 0.0;
}

std::vector<double> eval_potential(const Potential& p, const Grid1D& g) {
  std::vector<double> values(g.size());
  for (std::size_t i = 0; i < g.size(); ++i) {
    values[i] = p(g[i]);
    if (!std::isfinite(values[i])) {
      throw NumericError("potential " + std::string(to_string(p.kind())) +
                         " is not finite at grid index " + std::to_string(i) +
                         " (x = " + std::to_string(g[i]) + ")");
    }
  }
  if (p.kind() == PotentialKind::RewardSlice) {
    const double lowest = *std::min_element(values.begin(), values.end());
    for (double& v : values) v -= lowest;
  }
  return values;
}

double gradient_fd(const Potential& p, double x, double h_fd) {
  if (!(h_fd > 0.0)) throw DomainError("finite-difference step must be positive");
  return (p(x + h_fd) - p(x - h_fd)) / (2.0 * h_fd);
}

}  // namespace quantfp
