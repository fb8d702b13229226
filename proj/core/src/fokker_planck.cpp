#include "quantfp/fokker_planck.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <string>

#include "quantfp/csv.hpp"
#include "quantfp/errors.hpp"

namespace quantfp {

namespace {

// Bernoulli function z / (e^z - 1), B(0) = 1.
double bernoulli(double z) {
  if (std::abs(z) < 1e-12) return 1.0 - 0.5 * z;
  const double den = std::expm1(z);
  if (std::isinf(den)) return 0.0;
  return z / den;
}

DensityEstimate snapshot(const Grid1D& g, std::span<const double> mass, double t,
                         double& max_drift) {
  double sum = 0.0;
  for (std::size_t i = 0; i < mass.size(); ++i) {
    if (mass[i] < -1e-8) {
      throw SolverError("negative density " + format_number(mass[i]) + " at index " +
                        std::to_string(i) + ", t = " + format_number(t));
    }
    sum += mass[i];
  }
  const double drift = std::abs(sum - 1.0);
  max_drift = std::max(max_drift, drift);
  if (drift > 1e-4) {
    throw SolverError("mass drifted to " + format_number(sum) + " at t = " + format_number(t));
  }
  std::vector<double> clean(mass.begin(), mass.end());
  for (double& m : clean) m = std::max(m, 0.0);
  return DensityEstimate::from_weights(g, std::move(clean));
}

}  // namespace

DensityEstimate stationary_analytic(std::span<const double> v_values, double d_coeff,
                                    const Grid1D& g) {
  if (!(d_coeff > 0.0)) throw DomainError("diffusion coefficient must be positive");
  if (v_values.size() != g.size()) throw InputError("potential values do not match the grid");
  const double lowest = *std::min_element(v_values.begin(), v_values.end());
  std::vector<double> w(v_values.size());
  for (std::size_t i = 0; i < w.size(); ++i) w[i] = std::exp(-(v_values[i] - lowest) / d_coeff);
  return DensityEstimate::from_weights(g, std::move(w));
}

DensityEstimate stationary_analytic(const Potential& p, double d_coeff, const Grid1D& g) {
  return stationary_analytic(eval_potential(p, g), d_coeff, g);
}

double stable_time_step(const Potential& p, double d_coeff, const Grid1D& g) {
  if (!(d_coeff > 0.0)) throw DomainError("diffusion coefficient must be positive");
  double max_drift = 0.0;
  for (double x : g.points()) max_drift = std::max(max_drift, std::abs(gradient_fd(p, x)));
  const double h = g.spacing();
  return 0.4 * h * h / (2.0 * d_coeff + max_drift * h);
}

EvolutionTrace evolve_fp(const Potential& p, double d_coeff, const Grid1D& g,
                         const DensityEstimate& rho0, double t_end,
                         const EvolveOptions& options) {
  if (!(t_end > 0.0)) throw DomainError("t_end must be positive");
  if (!rho0.grid().same_as(g)) throw InputError("initial density lives on a different grid");
  if (options.snapshots < 1) throw ConfigError("need at least one snapshot");

  const auto v = eval_potential(p, g);
  const std::size_t n = g.size();
  const double h = g.spacing();

  double dt = stable_time_step(p, d_coeff, g);
  const auto total_steps = static_cast<std::size_t>(std::ceil(t_end / dt));
  dt = t_end / static_cast<double>(total_steps);

  // Transfer rates across interface k (between cells k and k+1), premultiplied by dt.
  std::vector<double> fwd(n - 1), bwd(n - 1);
  const double rate = d_coeff / (h * h);
  for (std::size_t k = 0; k + 1 < n; ++k) {
    const double peclet = -(v[k + 1] - v[k]) / d_coeff;
    fwd[k] = dt * rate * bernoulli(-peclet);
    bwd[k] = dt * rate * bernoulli(peclet);
  }
  for (std::size_t i = 0; i < n; ++i) {
    const double out = (i + 1 < n ? fwd[i] : 0.0) + (i > 0 ? bwd[i - 1] : 0.0);
    if (out > 1.0) {
      throw SolverError("time step violates positivity at cell " + std::to_string(i));
    }
  }

  EvolutionTrace trace{g, {}, {}, dt, 0, false, 0.0};
  std::vector<double> mass(rho0.mass().begin(), rho0.mass().end());
  std::vector<double> flow(n - 1);
  std::vector<double> checkpoint = mass;

  trace.snapshots.push_back(snapshot(g, mass, 0.0, trace.max_mass_drift));
  trace.times.push_back(0.0);

  const auto snaps = static_cast<std::size_t>(options.snapshots);
  std::size_t next_snapshot = 1;
  auto snapshot_step = [&](std::size_t j) {
    return std::max<std::size_t>(1, (j * total_steps + snaps / 2) / snaps);
  };
  const auto window = static_cast<std::size_t>(std::max(1, options.convergence_window));

  for (std::size_t s = 1; s <= total_steps; ++s) {
    for (std::size_t k = 0; k + 1 < n; ++k) flow[k] = fwd[k] * mass[k] - bwd[k] * mass[k + 1];
    mass[0] -= flow[0];
    for (std::size_t i = 1; i + 1 < n; ++i) mass[i] += flow[i - 1] - flow[i];
    mass[n - 1] += flow[n - 2];
    trace.steps = s;

    bool stop = false;
    if (s % window == 0) {
      const double change = l1_distance(mass, checkpoint) / static_cast<double>(window);
      if (change < options.convergence_tol) stop = true;
      checkpoint = mass;
    }
    const double t = static_cast<double>(s) * dt;
    if (stop || s == total_steps || (next_snapshot <= snaps && s >= snapshot_step(next_snapshot))) {
      if (trace.times.back() < t) {
        trace.snapshots.push_back(snapshot(g, mass, t, trace.max_mass_drift));
        trace.times.push_back(t);
      }
      while (next_snapshot <= snaps && s >= snapshot_step(next_snapshot)) ++next_snapshot;
    }
    if (stop) {
      trace.converged = true;
      break;
    }
  }
  return trace;
}

std::vector<double> Field2D::marginal_axis1() const {
  std::vector<double> m(grid.axis1.size(), 0.0);
  for (std::size_t i = 0; i < grid.axis1.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis2.size(); ++j) m[i] += at(i, j);
  }
  return m;
}

std::vector<double> Field2D::marginal_axis2() const {
  std::vector<double> m(grid.axis2.size(), 0.0);
  for (std::size_t i = 0; i < grid.axis1.size(); ++i) {
    for (std::size_t j = 0; j < grid.axis2.size(); ++j) m[j] += at(i, j);
  }
  return m;
}

Field2D stationary_2d(const Potential& p1, const Potential& p2, double d_coeff, const Grid2D& g) {
  const auto rho1 = stationary_analytic(p1, d_coeff, g.axis1);
  const auto rho2 = stationary_analytic(p2, d_coeff, g.axis2);
  Field2D field{g, std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.axis1.size(); ++i) {
    for (std::size_t j = 0; j < g.axis2.size(); ++j) field.values[g.index(i, j)] = rho1[i] * rho2[j];
  }
  return field;
}

VectorField2D drift_field_2d(const Potential& p1, const Potential& p2, const Grid2D& g,
                             double h_fd) {
  VectorField2D field{g, std::vector<double>(g.size()), std::vector<double>(g.size())};
  for (std::size_t i = 0; i < g.axis1.size(); ++i) {
    const double u = -gradient_fd(p1, g.axis1[i], h_fd);
    for (std::size_t j = 0; j < g.axis2.size(); ++j) {
      field.u[g.index(i, j)] = u;
      field.v[g.index(i, j)] = -gradient_fd(p2, g.axis2[j], h_fd);
    }
  }
  return field;
}

double l1_distance(std::span<const double> a, std::span<const double> b) {
  if (a.size() != b.size()) throw InputError("l1_distance: length mismatch");
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += std::abs(a[i] - b[i]);
  return s;
}

void write_evolution_csv(std::ostream& out, const EvolutionTrace& trace) {
  CsvWriter csv(out);
  csv.header({"t", "x", "mass"});
  for (std::size_t k = 0; k < trace.snapshots.size(); ++k) {
    for (std::size_t i = 0; i < trace.grid.size(); ++i) {
      csv.cell(trace.times[k]).cell(trace.grid[i]).cell(trace.snapshots[k][i]);
      csv.end_row();
    }
  }
}

void write_field_csv(std::ostream& out, const Field2D& field) {
  CsvWriter csv(out);
  csv.header({"x1", "x2", "value"});
  for (std::size_t i = 0; i < field.grid.axis1.size(); ++i) {
    for (std::size_t j = 0; j < field.grid.axis2.size(); ++j) {
      csv.cell(field.grid.axis1[i]).cell(field.grid.axis2[j]).cell(field.at(i, j));
      csv.end_row();
    }
  }
}

void write_vector_field_csv(std::ostream& out, const VectorField2D& field) {
  CsvWriter csv(out);
  csv.header({"x1", "x2", "u", "v", "magnitude"});
  for (std::size_t i = 0; i < field.grid.axis1.size(); ++i) {
    for (std::size_t j = 0; j < field.grid.axis2.size(); ++j) {
      const auto k = field.grid.index(i, j);
      csv.cell(field.grid.axis1[i])
          .cell(field.grid.axis2[j])
          .cell(field.u[k])
          .cell(field.v[k])
          .cell(std::hypot(field.u[k], field.v[k]));
      csv.end_row();
    }
  }
}

}  // namespace quantfp
