#pragma once

#include <cstdint>
#include <iosfwd>
#include <string>
#include <vector>

#include "quantfp/config.hpp"
#include "quantfp/estimator.hpp"
#include "quantfp/fokker_planck.hpp"
#include "quantfp/metrics.hpp"

namespace quantfp {

// Every run_* function is a pure function of the configuration. When
// cfg.output_dir is nonempty the payload files are written under it.

// --- train -----------------------------------------------------------------

struct AgentSummary {
  AgentKind agent = AgentKind::Random;
  std::vector<std::uint64_t> seeds;
  std::vector<Table1Summary> per_seed;
  std::vector<double> final_entropy;  // mean entropy of the last episode, per seed
  std::vector<double> final_sigma;
  Table1Summary pooled;  // field-wise mean over seeds
};

struct TrainingResult {
  std::vector<RunArtifacts> runs;        // sorted by (agent, seed)
  std::vector<AgentSummary> summaries;   // empty when episodes < kSummaryWindow
};

/// One (agent, seed) run of the training loop. `trace` receives step rows for the
/// listed episodes when non-null.
RunArtifacts train_agent(AgentKind kind, const ExperimentConfig& cfg, std::uint64_t seed,
                         std::ostream* trace = nullptr,
                         const std::vector<int>& trace_episodes = {});
TrainingResult run_training(const ExperimentConfig& cfg);

// --- complexity ------------------------------------------------------------

struct ComplexityResult {
  std::vector<ComplexityPoint> points;
  double classical_slope = 0.0;  // exponent of queries in 1 / epsilon
  double quantum_slope = 0.0;
  std::vector<double> query_ratio;  // classical / quantum, per epsilon
};

ComplexityResult run_complexity(const ExperimentConfig& cfg);

// --- scaling ---------------------------------------------------------------

struct ScalingPoint {
  int dim = 0;
  std::uint64_t samples_per_estimate = 0;
  double classical_relative_error = 0.0;  // 2/3 quantile over the timed estimates
  double classical_work = 0.0;            // potential evaluations
  double quantum_work = 0.0;              // oracle evaluations plus density lookups
  double classical_seconds = 0.0;         // median wall clock
  double quantum_seconds = 0.0;
};

struct ScalingResult {
  std::vector<ScalingPoint> points;
  double classical_work_exponent = 0.0;
  double quantum_work_exponent = 0.0;
  double classical_time_exponent = 0.0;
  double quantum_time_exponent = 0.0;
};

ScalingResult run_scaling(const ExperimentConfig& cfg);

// --- qubit ablation ----------------------------------------------------------

struct AblationRow {
  int n_qubits = 0;
  double mse = 0.0;               // against the reference at reference_d
  double mse_at_d_coeff = 0.0;    // against the reference at the QuantFPFlow D
};

struct AblationResult {
  double reference_d = 0.0;
  std::vector<AblationRow> rows;
};

AblationResult run_qubit_ablation(const ExperimentConfig& cfg);

// --- mode collapse -----------------------------------------------------------

struct ModeCollapseRun {
  AgentKind agent = AgentKind::Random;
  std::uint64_t seed = 0;
  std::vector<int> logged_episodes;  // 1-based episode count at each log point
  std::vector<double> kl;
  std::vector<double> coverage;      // one entry per tau, final window
  std::vector<double> final_mass;    // visited-state histogram, final window
};

struct ModeCollapseResult {
  std::vector<double> taus;
  std::vector<double> target_mass;
  std::vector<ModeCollapseRun> runs;

  /// Mean over seeds of the final KL for one agent.
  double mean_final_kl(AgentKind agent) const;
  /// Mean over seeds of the final coverage at taus[i] for one agent.
  double mean_coverage(AgentKind agent, std::size_t i) const;
};

ModeCollapseResult run_mode_collapse(const ExperimentConfig& cfg);

// --- fp solve ----------------------------------------------------------------

struct FpSolveResult {
  EvolutionTrace trace;
  DensityEstimate analytic;
  DensityEstimate qae;
  double final_l1 = 0.0;
  Field2D field;
  VectorField2D drift;
  double marginal_l1 = 0.0;  // axis-1 marginal of the 2D field vs the 1D stationary mass
};

FpSolveResult run_fp_solve(const ExperimentConfig& cfg);

/// Runs cfg.experiment and returns a one-line JSON summary.
std::string run_experiment(const ExperimentConfig& cfg);

}  // namespace quantfp
