#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "quantfp/environment.hpp"
#include "quantfp/estimator.hpp"
#include "quantfp/potential.hpp"
#include "quantfp/rng.hpp"

namespace quantfp {

inline constexpr double kSigmaMin = 1e-3;
inline constexpr double kSigmaMax = 1e2;
inline constexpr double kRhoFloor = 1e-8;

struct Matrix {
  std::size_t rows = 0;
  std::size_t cols = 0;
  std::vector<double> data;  // row-major

  Matrix() = default;
  Matrix(std::size_t r, std::size_t c) : rows(r), cols(c), data(r * c, 0.0) {}
  double& operator()(std::size_t r, std::size_t c) { return data[r * cols + c]; }
  double operator()(std::size_t r, std::size_t c) const { return data[r * cols + c]; }
};

/// Linear Gaussian policy N(s^T mu / |s|, sigma^2 I) and linear critic V(s) = phi^T s.
struct AgentParams {
  Matrix mu;             // d x m
  double log_sigma = 0.0;
  std::vector<double> phi;  // d
  Matrix momentum_buf;   // d x m

  static AgentParams zeros(int state_dim, int action_dim, double log_sigma = 0.0);
  double sigma() const;
  bool finite() const;
};

double clamp_log_sigma(double log_sigma);

/// s^T mu / max(|s|, 1e-8).
std::vector<double> policy_mean(const AgentParams& p, std::span<const double> s);

enum class FpPotentialSource { RewardSlice, CriticSlice };

struct QffConfig {
  double alpha = 0.5;
  double beta = 1.5;
  double d_coeff = 0.3;
  double eta_a = 5e-3;
  double eta_c = 1e-2;
  double gamma = 0.99;
  double beta_m = 0.9;
  int qae_refresh = 10;
  FpPotentialSource fp_potential_source = FpPotentialSource::RewardSlice;
  // The printed consistency update log s += eta (s^2 - D)/s pushes sigma away from
  // sqrt(D); the default applies the contracting sign.
  bool printed_consistency_sign = false;
  double h_fd = 1e-3;
  double init_log_sigma = 0.0;

  void validate() const;
};

struct Transition {
  std::vector<double> s;
  std::vector<double> a;  // the unclipped policy sample
  double r_env = 0.0;
  std::vector<double> s_next;
  bool done = false;
  double rho_hat = 1.0;
};

/// Counts bonus evaluations whose density had to be floored.
struct BonusStats {
  std::uint64_t floored = 0;
};

/// alpha * ln(1 / rho_hat); rho_hat <= 0 is floored to 1e-8 and counted.
double exploration_bonus(double rho_hat, double alpha, BonusStats* stats = nullptr);

/// One policy draw: `raw` is the Gaussian sample, `action` its clip to [-1, 1]. The
/// environment receives `action`; score-function updates use `raw`.
struct PolicySample {
  std::vector<double> raw;
  std::vector<double> action;
};

PolicySample gaussian_sample(const AgentParams& p, std::span<const double> s, Rng& rng);

/// Gaussian sample around policy_mean with shared sigma, clipped to [-1, 1].
std::vector<double> qff_act(const AgentParams& p, std::span<const double> s, Rng& rng);

/// One critic/actor/consistency step with f_FP(s) = -dV/dx1 at s1.
AgentParams qff_update(const AgentParams& p, const Transition& t, const Potential& pot,
                       const QffConfig& cfg, BonusStats* stats = nullptr);
/// Same step with the drift value supplied directly.
AgentParams qff_update_with_drift(const AgentParams& p, const Transition& t, double f_fp,
                                  const QffConfig& cfg, BonusStats* stats = nullptr);

// --- SAC-lite: linear actor/critic, score-function gradient plus entropy, Adam steps.

struct SacConfig {
  double alpha_sac = 0.2;
  double eta = 5e-3;
  double eta_c = 1e-2;
  double gamma = 0.99;
  double adam_beta1 = 0.9;
  double adam_beta2 = 0.999;
  double adam_eps = 1e-8;
  double init_log_sigma = 0.0;

  void validate() const;
};

struct AdamMoments {
  std::vector<double> first;
  std::vector<double> second;
};

struct SacState {
  AgentParams params;
  AdamMoments mu_moments;
  AdamMoments log_sigma_moments;
  AdamMoments phi_moments;
  std::uint64_t step = 0;
};

SacState sac_init(int state_dim, int action_dim, const SacConfig& cfg);
std::vector<double> sac_act(const SacState& st, std::span<const double> s, Rng& rng);
SacState sac_update(const SacState& st, const Transition& t, const SacConfig& cfg);

// --- DDPG-lite: deterministic linear actor with Ornstein-Uhlenbeck exploration.

struct DdpgConfig {
  double sigma_ou = 0.2;
  double theta_ou = 0.15;
  double eta_a = 5e-3;
  double eta_c = 1e-2;
  double gamma = 0.99;

  void validate() const;
};

struct DdpgState {
  AgentParams params;
  std::vector<double> ou_noise;
};

DdpgState ddpg_init(int state_dim, int action_dim);
/// n <- n - theta n + sigma N(0, I).
void ou_advance(std::span<double> noise, double theta, double sigma, Rng& rng);
/// clip(policy_mean + n_t), then advances the OU noise.
std::vector<double> ddpg_act(DdpgState& st, std::span<const double> s, const DdpgConfig& cfg,
                             Rng& rng);
/// Same draw; `raw` is policy_mean + n_t before clipping.
PolicySample ddpg_sample(DdpgState& st, std::span<const double> s, const DdpgConfig& cfg,
                         Rng& rng);
/// Critic TD step and actor step delta * outer(s/|s|, a - mean).
DdpgState ddpg_update(const DdpgState& st, const Transition& t, const DdpgConfig& cfg);

/// I.i.d. uniform actions in [-1, 1]^m.
std::vector<double> random_act(const EnvConfig& cfg, Rng& rng);

// --- Uniform interface used by the training loops.

enum class AgentKind { QuantFPFlow, SacLite, DdpgLite, Random };
std::string_view to_string(AgentKind kind);
AgentKind parse_agent_kind(std::string_view name);

class Agent {
 public:
  virtual ~Agent() = default;

  virtual AgentKind kind() const = 0;
  virtual std::vector<double> act(std::span<const double> s, Rng& rng) = 0;
  /// Learns from one transition; returns the exploration bonus that was added to r_env.
  virtual double observe(std::span<const double> s, std::span<const double> a, double r_env,
                         std::span<const double> s_next, bool done) = 0;
  virtual void begin_episode() {}
  /// Differential entropy of the current action distribution, nats.
  virtual double entropy() const = 0;
  virtual double sigma() const = 0;
  virtual const AgentParams* params() const { return nullptr; }
};

struct AgentSettings {
  QffConfig qff;
  QaeConfig qae;
  SacConfig sac;
  DdpgConfig ddpg;
  double qae_lower = -3.0;
  double qae_upper = 3.0;
  /// Overrides the FP potential (used by the one-dimensional control surrogate).
  std::optional<Potential> fp_potential;
};

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentSettings& settings,
                                  const EnvConfig& env);

}  // namespace quantfp
