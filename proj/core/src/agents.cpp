#include "quantfp/agents.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quantfp/errors.hpp"
#include "quantfp/metrics.hpp"

namespace quantfp {

namespace {

double dot(std::span<const double> a, std::span<const double> b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += a[i] * b[i];
  return s;
}

double norm_guarded(std::span<const double> s) { return std::max(std::sqrt(dot(s, s)), 1e-8); }

void check_transition(const AgentParams& p, const Transition& t) {
  if (t.s.size() != p.mu.rows || t.s_next.size() != p.mu.rows || t.a.size() != p.mu.cols) {
    throw InputError("transition dimensions do not match the agent");
  }
}

double td_error(const AgentParams& p, const Transition& t, double reward, double gamma) {
  const double next = t.done ? 0.0 : dot(p.phi, t.s_next);
  return reward + gamma * next - dot(p.phi, t.s);
}

void require_finite(const AgentParams& p, const char* who, const Transition& t, double delta) {
  if (!p.finite()) {
    throw ParameterError(std::string(who) + " produced non-finite parameters (td error " +
                         std::to_string(delta) + ", r_env " + std::to_string(t.r_env) + ")");
  }
}

void adam_ascent(std::span<double> theta, std::span<const double> grad, AdamMoments& mom,
                 double lr, const SacConfig& cfg, std::uint64_t step) {
  if (mom.first.size() != theta.size()) {
    mom.first.assign(theta.size(), 0.0);
    mom.second.assign(theta.size(), 0.0);
  }
  const double c1 = 1.0 - std::pow(cfg.adam_beta1, static_cast<double>(step));
  const double c2 = 1.0 - std::pow(cfg.adam_beta2, static_cast<double>(step));
  for (std::size_t i = 0; i < theta.size(); ++i) {
    mom.first[i] = cfg.adam_beta1 * mom.first[i] + (1.0 - cfg.adam_beta1) * grad[i];
    mom.second[i] = cfg.adam_beta2 * mom.second[i] + (1.0 - cfg.adam_beta2) * grad[i] * grad[i];
    const double m_hat = mom.first[i] / c1;
    const double v_hat = mom.second[i] / c2;
    theta[i] += lr * m_hat / (std::sqrt(v_hat) + cfg.adam_eps);
  }
}

}  // namespace

AgentParams AgentParams::zeros(int state_dim, int action_dim, double log_sigma) {
  AgentParams p;
  const auto d = static_cast<std::size_t>(state_dim);
  const auto m = static_cast<std::size_t>(action_dim);
  p.mu = Matrix(d, m);
  p.momentum_buf = Matrix(d, m);
  p.phi.assign(d, 0.0);
  p.log_sigma = clamp_log_sigma(log_sigma);
  return p;
}

double AgentParams::sigma() const { return std::exp(log_sigma); }

bool AgentParams::finite() const {
  auto all_finite = [](const std::vector<double>& v) {
    return std::all_of(v.begin(), v.end(), [](double x) { return std::isfinite(x); });
  };
  return std::isfinite(log_sigma) && all_finite(mu.data) && all_finite(phi) &&
         all_finite(momentum_buf.data);
}

double clamp_log_sigma(double log_sigma) {
  static const double lo = std::log(kSigmaMin);
  static const double hi = std::log(kSigmaMax);
  return std::clamp(log_sigma, lo, hi);
}

std::vector<double> policy_mean(const AgentParams& p, std::span<const double> s) {
  if (s.size() != p.mu.rows) throw InputError("state dimension does not match the policy");
  const double inv = 1.0 / norm_guarded(s);
  std::vector<double> mean(p.mu.cols, 0.0);
  for (std::size_t r = 0; r < p.mu.rows; ++r) {
    const double sr = s[r] * inv;
    for (std::size_t c = 0; c < p.mu.cols; ++c) mean[c] += sr * p.mu(r, c);
  }
  return mean;
}

void QffConfig::validate() const {
  for (double v : {alpha, beta, d_coeff, eta_a, eta_c, gamma, beta_m, h_fd}) {
    if (!(v > 0.0) || !std::isfinite(v)) {
      throw ConfigError("QuantFPFlow hyperparameters must be positive and finite");
    }
  }
  if (!(gamma < 1.0) || !(beta_m < 1.0)) throw ConfigError("gamma and beta_m must be < 1");
  if (qae_refresh < 1) throw ConfigError("qae_refresh must be >= 1");
}

double exploration_bonus(double rho_hat, double alpha, BonusStats* stats) {
  if (!(rho_hat > 0.0)) {
    rho_hat = kRhoFloor;
    if (stats != nullptr) ++stats->floored;
  }
  return alpha * std::log(1.0 / std::min(rho_hat, 1.0));
}

PolicySample gaussian_sample(const AgentParams& p, std::span<const double> s, Rng& rng) {
  PolicySample out;
  out.raw = policy_mean(p, s);
  std::normal_distribution<double> normal(0.0, 1.0);
  const double sigma = p.sigma();
  for (double& x : out.raw) x += sigma * normal(rng);
  out.action = out.raw;
  for (double& x : out.action) x = std::clamp(x, -1.0, 1.0);
  return out;
}

std::vector<double> qff_act(const AgentParams& p, std::span<const double> s, Rng& rng) {
  return gaussian_sample(p, s, rng).action;
}

AgentParams qff_update_with_drift(const AgentParams& p, const Transition& t, double f_fp,
                                  const QffConfig& cfg, BonusStats* stats) {
  check_transition(p, t);
  const double r_aug = t.r_env + exploration_bonus(t.rho_hat, cfg.alpha, stats);
  const double delta = td_error(p, t, r_aug, cfg.gamma);

  AgentParams next = p;
  for (std::size_t i = 0; i < next.phi.size(); ++i) next.phi[i] += cfg.eta_c * delta * t.s[i];

  const auto mean = policy_mean(p, t.s);
  const double sigma = p.sigma();
  const double var = sigma * sigma;
  const double inv_norm = 1.0 / norm_guarded(t.s);
  for (std::size_t r = 0; r < p.mu.rows; ++r) {
    for (std::size_t c = 0; c < p.mu.cols; ++c) {
      const double g = delta * f_fp * (t.s[r] * inv_norm) * (t.a[c] - mean[c]) / var;
      double& m = next.momentum_buf(r, c);
      m = cfg.beta_m * m + (1.0 - cfg.beta_m) * g;
      next.mu(r, c) += cfg.eta_a * m;
    }
  }

  const double step = cfg.eta_a * (var - cfg.d_coeff) / sigma;
  next.log_sigma = clamp_log_sigma(p.log_sigma + (cfg.printed_consistency_sign ? step : -step));

  require_finite(next, "qff_update", t, delta);
  return next;
}

AgentParams qff_update(const AgentParams& p, const Transition& t, const Potential& pot,
                       const QffConfig& cfg, BonusStats* stats) {
  check_transition(p, t);
  const double f_fp = -gradient_fd(pot, t.s[0], cfg.h_fd);
  return qff_update_with_drift(p, t, f_fp, cfg, stats);
}

void SacConfig::validate() const {
  if (alpha_sac < 0.0 || !(eta > 0.0) || !(eta_c > 0.0) || !(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("invalid SAC-lite hyperparameters");
  }
}

SacState sac_init(int state_dim, int action_dim, const SacConfig& cfg) {
  SacState st;
  st.params = AgentParams::zeros(state_dim, action_dim, cfg.init_log_sigma);
  return st;
}

std::vector<double> sac_act(const SacState& st, std::span<const double> s, Rng& rng) {
  return gaussian_sample(st.params, s, rng).action;
}

SacState sac_update(const SacState& st, const Transition& t, const SacConfig& cfg) {
  const AgentParams& p = st.params;
  check_transition(p, t);
  const double delta = td_error(p, t, t.r_env, cfg.gamma);
  SacState next = st;
  next.step = st.step + 1;

  std::vector<double> grad_phi(p.phi.size());
  for (std::size_t i = 0; i < grad_phi.size(); ++i) grad_phi[i] = delta * t.s[i];

  const auto mean = policy_mean(p, t.s);
  const double sigma = p.sigma();
  const double inv_norm = 1.0 / norm_guarded(t.s);
  std::vector<double> grad_mu(p.mu.data.size());
  double grad_log_sigma = cfg.alpha_sac * static_cast<double>(p.mu.cols);
  for (std::size_t c = 0; c < p.mu.cols; ++c) {
    const double z = (t.a[c] - mean[c]) / sigma;
    grad_log_sigma += delta * (z * z - 1.0);
    for (std::size_t r = 0; r < p.mu.rows; ++r) {
      grad_mu[r * p.mu.cols + c] = delta * (t.s[r] * inv_norm) * z / sigma;
    }
  }

  adam_ascent(next.params.phi, grad_phi, next.phi_moments, cfg.eta_c, cfg, next.step);
  adam_ascent(next.params.mu.data, grad_mu, next.mu_moments, cfg.eta, cfg, next.step);
  std::vector<double> ls{next.params.log_sigma};
  adam_ascent(ls, std::span<const double>(&grad_log_sigma, 1), next.log_sigma_moments, cfg.eta,
              cfg, next.step);
  next.params.log_sigma = clamp_log_sigma(ls[0]);

  require_finite(next.params, "sac_update", t, delta);
  return next;
}

void DdpgConfig::validate() const {
  if (sigma_ou < 0.0 || !(theta_ou > 0.0 && theta_ou < 2.0) || !(eta_a > 0.0) ||
      !(eta_c > 0.0) || !(gamma > 0.0 && gamma < 1.0)) {
    throw ConfigError("invalid DDPG-lite hyperparameters");
  }
}

DdpgState ddpg_init(int state_dim, int action_dim) {
  DdpgState st;
  st.params = AgentParams::zeros(state_dim, action_dim, 0.0);
  st.ou_noise.assign(static_cast<std::size_t>(action_dim), 0.0);
  return st;
}

void ou_advance(std::span<double> noise, double theta, double sigma, Rng& rng) {
  std::normal_distribution<double> normal(0.0, 1.0);
  for (double& n : noise) n = n - theta * n + sigma * normal(rng);
}

PolicySample ddpg_sample(DdpgState& st, std::span<const double> s, const DdpgConfig& cfg,
                         Rng& rng) {
  PolicySample out;
  out.raw = policy_mean(st.params, s);
  for (std::size_t c = 0; c < out.raw.size(); ++c) out.raw[c] += st.ou_noise[c];
  out.action = out.raw;
  for (double& x : out.action) x = std::clamp(x, -1.0, 1.0);
  ou_advance(st.ou_noise, cfg.theta_ou, cfg.sigma_ou, rng);
  return out;
}

std::vector<double> ddpg_act(DdpgState& st, std::span<const double> s, const DdpgConfig& cfg,
                             Rng& rng) {
  return ddpg_sample(st, s, cfg, rng).action;
}

DdpgState ddpg_update(const DdpgState& st, const Transition& t, const DdpgConfig& cfg) {
  const AgentParams& p = st.params;
  check_transition(p, t);
  const double delta = td_error(p, t, t.r_env, cfg.gamma);
  DdpgState next = st;
  for (std::size_t i = 0; i < p.phi.size(); ++i) next.params.phi[i] += cfg.eta_c * delta * t.s[i];
  const auto mean = policy_mean(p, t.s);
  const double inv_norm = 1.0 / norm_guarded(t.s);
  for (std::size_t r = 0; r < p.mu.rows; ++r) {
    for (std::size_t c = 0; c < p.mu.cols; ++c) {
      next.params.mu(r, c) += cfg.eta_a * delta * (t.s[r] * inv_norm) * (t.a[c] - mean[c]);
    }
  }
  require_finite(next.params, "ddpg_update", t, delta);
  return next;
}

std::vector<double> random_act(const EnvConfig& cfg, Rng& rng) {
  std::uniform_real_distribution<double> unit(-1.0, 1.0);
  std::vector<double> a(static_cast<std::size_t>(cfg.action_dim));
  for (double& x : a) x = unit(rng);
  return a;
}

std::string_view to_string(AgentKind kind) {
  switch (kind) {
    case AgentKind::QuantFPFlow: return "quantfpflow";
    case AgentKind::SacLite: return "sac";
    case AgentKind::DdpgLite: return "ddpg";
    case AgentKind::Random: return "random";
  }
  return "unknown";
}

AgentKind parse_agent_kind(std::string_view name) {
  if (name == "quantfpflow" || name == "qff") return AgentKind::QuantFPFlow;
  if (name == "sac") return AgentKind::SacLite;
  if (name == "ddpg") return AgentKind::DdpgLite;
  if (name == "random") return AgentKind::Random;
  throw ConfigError("unknown agent '" + std::string(name) + "'");
}

namespace {

Transition make_transition(std::span<const double> s, std::span<const double> a, double r_env,
                           std::span<const double> s_next, bool done, double rho_hat = 1.0) {
  return Transition{{s.begin(), s.end()}, {a.begin(), a.end()}, r_env,
                    {s_next.begin(), s_next.end()}, done, rho_hat};
}

// Keeps the unclipped sample of the last act() so updates see the true score.
class SamplingAgent : public Agent {
 protected:
  std::span<const double> raw_or(std::span<const double> a) const {
    return raw_.size() == a.size() ? std::span<const double>(raw_) : a;
  }
  std::vector<double> raw_;
};

class QffAgent final : public SamplingAgent {
 public:
  QffAgent(const AgentSettings& settings, const EnvConfig& env)
      : cfg_(settings.qff),
        qae_(settings.qae),
        grid_(settings.qae_lower, settings.qae_upper, settings.qae.n_qubits),
        params_(AgentParams::zeros(env.state_dim, env.action_dim, settings.qff.init_log_sigma)),
        fp_potential_(settings.fp_potential.value_or(Potential::reward_slice())),
        drift_potential_(fp_potential_),
        use_critic_(!settings.fp_potential &&
                    settings.qff.fp_potential_source == FpPotentialSource::CriticSlice) {
    cfg_.validate();
    qae_.beta = cfg_.beta;
    qae_.validate();
  }

  AgentKind kind() const override { return AgentKind::QuantFPFlow; }

  std::vector<double> act(std::span<const double> s, Rng& rng) override {
    auto draw = gaussian_sample(params_, s, rng);
    raw_ = std::move(draw.raw);
    return draw.action;
  }

  double observe(std::span<const double> s, std::span<const double> a, double r_env,
                 std::span<const double> s_next, bool done) override {
    if (steps_ % static_cast<std::uint64_t>(cfg_.qae_refresh) == 0) refresh();
    ++steps_;
    const double rho_hat = cache_->mass_at(s_next[0]);
    const auto t = make_transition(s, raw_or(a), r_env, s_next, done, rho_hat);
    params_ = qff_update(params_, t, drift_potential_, cfg_, &stats_);
    return exploration_bonus(rho_hat, cfg_.alpha);
  }

  double entropy() const override {
    return policy_entropy(params_.log_sigma, static_cast<int>(params_.mu.cols));
  }
  double sigma() const override { return params_.sigma(); }
  const AgentParams* params() const override { return &params_; }

 private:
  void refresh() {
    // A fixed potential gives the same estimate at every refresh.
    if (!use_critic_ && cache_) return;
    std::vector<double> v;
    if (use_critic_) {
      v.resize(grid_.size());
      for (std::size_t i = 0; i < v.size(); ++i) v[i] = -params_.phi[0] * grid_[i];
      const double lowest = *std::min_element(v.begin(), v.end());
      for (double& x : v) x -= lowest;
      std::vector<double> xs(grid_.points().begin(), grid_.points().end());
      drift_potential_ = Potential::tabulated(std::move(xs), v);
    } else {
      v = eval_potential(fp_potential_, grid_);
    }
    cache_.emplace(annealed_qae(v, grid_, qae_));
  }

  QffConfig cfg_;
  QaeConfig qae_;
  Grid1D grid_;
  AgentParams params_;
  Potential fp_potential_;
  Potential drift_potential_;
  bool use_critic_;
  std::optional<DensityEstimate> cache_;
  std::uint64_t steps_ = 0;
  BonusStats stats_;
};

class SacAgent final : public SamplingAgent {
 public:
  SacAgent(const AgentSettings& settings, const EnvConfig& env)
      : cfg_(settings.sac), state_(sac_init(env.state_dim, env.action_dim, settings.sac)) {
    cfg_.validate();
  }

  AgentKind kind() const override { return AgentKind::SacLite; }
  std::vector<double> act(std::span<const double> s, Rng& rng) override {
    auto draw = gaussian_sample(state_.params, s, rng);
    raw_ = std::move(draw.raw);
    return draw.action;
  }
  double observe(std::span<const double> s, std::span<const double> a, double r_env,
                 std::span<const double> s_next, bool done) override {
    state_ = sac_update(state_, make_transition(s, raw_or(a), r_env, s_next, done), cfg_);
    return 0.0;
  }
  double entropy() const override {
    return policy_entropy(state_.params.log_sigma, static_cast<int>(state_.params.mu.cols));
  }
  double sigma() const override { return state_.params.sigma(); }
  const AgentParams* params() const override { return &state_.params; }

 private:
  SacConfig cfg_;
  SacState state_;
};

class DdpgAgent final : public SamplingAgent {
 public:
  DdpgAgent(const AgentSettings& settings, const EnvConfig& env)
      : cfg_(settings.ddpg), state_(ddpg_init(env.state_dim, env.action_dim)) {
    cfg_.validate();
  }

  AgentKind kind() const override { return AgentKind::DdpgLite; }
  void begin_episode() override { std::fill(state_.ou_noise.begin(), state_.ou_noise.end(), 0.0); }
  std::vector<double> act(std::span<const double> s, Rng& rng) override {
    auto draw = ddpg_sample(state_, s, cfg_, rng);
    raw_ = std::move(draw.raw);
    return draw.action;
  }
  double observe(std::span<const double> s, std::span<const double> a, double r_env,
                 std::span<const double> s_next, bool done) override {
    state_ = ddpg_update(state_, make_transition(s, raw_or(a), r_env, s_next, done), cfg_);
    return 0.0;
  }
  // Entropy and sigma of the stationary OU perturbation.
  double entropy() const override {
    return policy_entropy(std::log(sigma()), static_cast<int>(state_.ou_noise.size()));
  }
  double sigma() const override {
    const double th = cfg_.theta_ou;
    return std::max(cfg_.sigma_ou / std::sqrt(2.0 * th - th * th), kSigmaMin);
  }
  const AgentParams* params() const override { return &state_.params; }

 private:
  DdpgConfig cfg_;
  DdpgState state_;
};

class RandomAgent final : public Agent {
 public:
  explicit RandomAgent(const EnvConfig& env) : env_(env) {}

  AgentKind kind() const override { return AgentKind::Random; }
  std::vector<double> act(std::span<const double>, Rng& rng) override {
    return random_act(env_, rng);
  }
  double observe(std::span<const double>, std::span<const double>, double,
                 std::span<const double>, bool) override {
    return 0.0;
  }
  double entropy() const override { return env_.action_dim * std::log(2.0); }
  double sigma() const override { return 1.0 / std::sqrt(3.0); }

 private:
  EnvConfig env_;
};

}  // namespace

std::unique_ptr<Agent> make_agent(AgentKind kind, const AgentSettings& settings,
                                  const EnvConfig& env) {
  env.validate();
  switch (kind) {
    case AgentKind::QuantFPFlow: return std::make_unique<QffAgent>(settings, env);
    case AgentKind::SacLite: return std::make_unique<SacAgent>(settings, env);
    case AgentKind::DdpgLite: return std::make_unique<DdpgAgent>(settings, env);
    case AgentKind::Random: return std::make_unique<RandomAgent>(env);
  }
  throw ConfigError("unknown agent kind");
}

}  // namespace quantfp
