#pragma once

#include <iosfwd>
#include <span>
#include <vector>

#include "quantfp/estimator.hpp"
#include "quantfp/grid.hpp"
#include "quantfp/potential.hpp"

namespace quantfp {

/// Boltzmann mass exp(-V(x_i)/D) normalized over the grid.
DensityEstimate stationary_analytic(const Potential& p, double d_coeff, const Grid1D& g);
DensityEstimate stationary_analytic(std::span<const double> v_values, double d_coeff,
                                    const Grid1D& g);

struct EvolutionTrace {
  Grid1D grid;
  std::vector<DensityEstimate> snapshots;
  std::vector<double> times;
  double dt = 0.0;
  std::size_t steps = 0;
  bool converged = false;  // stopped early on the per-step L1 criterion
  double max_mass_drift = 0.0;
};

struct EvolveOptions {
  int snapshots = 50;            // evenly spaced in time, plus t = 0
  double convergence_tol = 1e-10;  // stop once the L1 change per step drops below this
  int convergence_window = 200;  // steps between convergence checks
};

/// Time step 0.4 h^2 / (2D + max|f| h) with f = -V' from central differences.
double stable_time_step(const Potential& p, double d_coeff, const Grid1D& g);

/// Explicit conservative integration of d rho/dt = -d/dx (f rho) + D d^2 rho/dx^2 with
/// f = -V' and zero-flux boundaries. Interface fluxes use exponential (Scharfetter-Gummel)
/// fitting, so exp(-V/D) at the nodes is an exact discrete equilibrium.
///
/// Throws SolverError when a cell goes below -1e-8 or total mass drifts by more than 1e-4.
EvolutionTrace evolve_fp(const Potential& p, double d_coeff, const Grid1D& g,
                         const DensityEstimate& rho0, double t_end,
                         const EvolveOptions& options = {});

/// Row-major scalar field over a Grid2D.
struct Field2D {
  Grid2D grid;
  std::vector<double> values;

  double at(std::size_t i, std::size_t j) const { return values[grid.index(i, j)]; }
  std::vector<double> marginal_axis1() const;
  std::vector<double> marginal_axis2() const;
};

struct VectorField2D {
  Grid2D grid;
  std::vector<double> u;
  std::vector<double> v;
};

/// Stationary density of the separable potential V(x1, x2) = p1(x1) + p2(x2).
Field2D stationary_2d(const Potential& p1, const Potential& p2, double d_coeff, const Grid2D& g);

/// Drift (-dp1/dx1, -dp2/dx2) at every grid point.
VectorField2D drift_field_2d(const Potential& p1, const Potential& p2, const Grid2D& g,
                             double h_fd = 1e-3);

double l1_distance(std::span<const double> a, std::span<const double> b);

/// Long format: t,x,mass.
void write_evolution_csv(std::ostream& out, const EvolutionTrace& trace);
/// x1,x2,value.
void write_field_csv(std::ostream& out, const Field2D& field);
/// x1,x2,u,v,magnitude.
void write_vector_field_csv(std::ostream& out, const VectorField2D& field);

}  // namespace quantfp
