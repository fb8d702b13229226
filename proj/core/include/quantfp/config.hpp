#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "quantfp/agents.hpp"
#include "quantfp/environment.hpp"
#include "quantfp/estimator.hpp"

namespace quantfp {

enum class ExperimentKind { Train, Complexity, Scaling, QubitAblation, ModeCollapse, FpSolve };

std::string_view to_string(ExperimentKind kind);
/// Accepts the CLI subcommand names (train, complexity, scaling, ablate-qubits,
/// mode-collapse, fp-solve).
ExperimentKind parse_experiment_kind(std::string_view name);

/// Named 1D potential, e.g. {"kind": "double_well_sine", "params": [0.3]}.
struct PotentialSpec {
  std::string kind = "double_well_sine";
  std::vector<double> params;

  Potential build() const;
};

struct DomainSpec {
  double lower = -3.0;
  double upper = 3.0;
  int n_qubits = 7;

  Grid1D grid() const { return make_grid(lower, upper, n_qubits); }
};

struct TrainSettings {
  // Episodes of the first seed whose step-level traces are exported.
  std::vector<int> trace_episodes;
  int smoothing_window = 25;
};

struct ComplexitySettings {
  PotentialSpec potential;
  DomainSpec domain{-3.0, 3.0, 7};
  double d_coeff = 0.3;
  std::vector<double> epsilons{1e-1, 3e-2, 1e-2, 3e-3, 1e-3};
  int trials = 50;
};

struct ScalingSettings {
  std::vector<int> dims{1, 2, 4, 8, 16, 32};
  // Product potential sum_j V(x_j) over [lower, upper]^d for the Monte Carlo baseline.
  PotentialSpec potential{"harmonic", {1.0}};
  DomainSpec domain{-1.0, 1.0, 7};
  double d_coeff = 1.0;
  double relative_epsilon = 3e-2;
  int pilot_samples = 4096;
  int estimates_per_point = 20;  // independent classical estimates timed per d
  int step_budget = 2000;        // environment steps of the quantum-inspired pipeline
  int repetitions = 5;           // wall-clock median over this many repetitions
};

struct AblationSettings {
  PotentialSpec potential;
  std::vector<int> qubits{3, 4, 5, 6, 7, 8, 9};
  double lower = -3.0;
  double upper = 3.0;
  // Diffusion of the reference density; <= 0 means 1 / qae.beta.
  double reference_d = 0.0;
};

struct ModeCollapseSettings {
  PotentialSpec potential;
  std::vector<std::string> agents{"quantfpflow", "sac"};
  int episodes = 300;
  int horizon = 200;
  int log_every = 10;
  int window = 50;  // trailing episodes histogrammed for KL and coverage
  std::vector<double> taus{0.005, 0.01, 0.02, 0.05, 0.1, 0.2, 0.5};
};

struct FpSolveSettings {
  PotentialSpec potential;
  PotentialSpec potential_axis2;
  DomainSpec domain{-3.0, 3.0, 9};
  DomainSpec domain_2d{-3.0, 3.0, 6};
  double d_coeff = 0.3;
  double t_end = 2500.0;
  double initial_mean = 0.0;
  double initial_std = 0.5;
  int snapshots = 50;
};

struct ExperimentConfig {
  ExperimentKind experiment = ExperimentKind::Train;
  std::vector<std::uint64_t> seeds{0, 1, 2, 3, 4};
  int episodes = 400;
  std::vector<AgentKind> agents{AgentKind::QuantFPFlow, AgentKind::SacLite,
                                AgentKind::DdpgLite, AgentKind::Random};
  EnvConfig env;
  AgentSettings agent;  // qff, qae, sac, ddpg hyperparameters
  std::filesystem::path output_dir = "results";

  TrainSettings train;
  ComplexitySettings complexity;
  ScalingSettings scaling;
  AblationSettings ablation;
  ModeCollapseSettings mode_collapse;
  FpSolveSettings fp_solve;

  /// Throws ConfigError on the first violated constraint.
  void validate() const;
};

/// Parses a JSON document. Unknown keys are rejected; absent keys keep their defaults.
ExperimentConfig parse_config(std::string_view json_text);
ExperimentConfig load_config(const std::filesystem::path& path);
/// Full configuration as pretty-printed JSON (stable key order).
std::string config_to_json(const ExperimentConfig& cfg);

}  // namespace quantfp
