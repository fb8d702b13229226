#include "quantfp/environment.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "quantfp/errors.hpp"

namespace quantfp {

void EnvConfig::validate() const {
  if (state_dim < 1 || action_dim < 1 || horizon < 1) {
    throw ConfigError("environment dimensions and horizon must be >= 1");
  }
  if (action_dim > state_dim) {
    throw ConfigError("action_dim may not exceed state_dim (actions drive the leading coordinates)");
  }
  for (double v : {decay, action_gain, noise_scale, action_clip, reset_std}) {
    if (!std::isfinite(v)) throw ConfigError("environment gains must be finite");
  }
  if (!(action_clip > 0.0) || noise_scale < 0.0 || reset_std < 0.0) {
    throw ConfigError("action_clip must be positive; noise_scale and reset_std nonnegative");
  }
}

double reward_landscape_x1(double x1) {
  const double local = 8.0 * std::exp(-(x1 + 1.5) * (x1 + 1.5) / 0.32);
  const double global = 15.0 * std::exp(-(x1 - 1.5) * (x1 - 1.5) / 0.32);
  const double barrier = 5.0 * std::exp(-x1 * x1 / 0.18);
  return local + global - barrier;
}

double reward_landscape(std::span<const double> x) {
  if (x.empty()) throw InputError("reward_landscape needs a nonempty state");
  double tail = 0.0;
  for (std::size_t i = 1; i < x.size(); ++i) tail += x[i] * x[i];
  return reward_landscape_x1(x[0]) - 0.05 * tail;
}

EnvState reset(const EnvConfig& cfg, Rng& rng) {
  cfg.validate();
  std::normal_distribution<double> normal(0.0, 1.0);
  EnvState st;
  st.s.resize(static_cast<std::size_t>(cfg.state_dim));
  for (double& v : st.s) v = cfg.reset_std * normal(rng);
  st.step_index = 0;
  return st;
}

EnvState reset(const EnvConfig& cfg, std::uint64_t seed) {
  Rng rng = make_rng(seed, 0xe11u);
  return reset(cfg, rng);
}

StepOutcome step(const EnvState& state, std::span<const double> action, const EnvConfig& cfg,
                 Rng& rng, const RewardFn& reward) {
  if (action.size() != static_cast<std::size_t>(cfg.action_dim)) {
    throw InputError("action has length " + std::to_string(action.size()) + ", expected " +
                     std::to_string(cfg.action_dim));
  }
  if (state.s.size() != static_cast<std::size_t>(cfg.state_dim)) {
    throw InputError("state has the wrong dimension");
  }
  for (std::size_t j = 0; j < action.size(); ++j) {
    if (!std::isfinite(action[j])) {
      throw InputError("non-finite action component " + std::to_string(j));
    }
  }
  std::normal_distribution<double> normal(0.0, 1.0);
  StepOutcome out;
  out.next.s.resize(state.s.size());
  for (std::size_t i = 0; i < state.s.size(); ++i) {
    const double a = i < action.size()
                         ? std::clamp(action[i], -cfg.action_clip, cfg.action_clip)
                         : 0.0;
    // Noise is drawn even when noise_scale == 0 so stream positions stay aligned.
    const double xi = normal(rng);
    out.next.s[i] = cfg.decay * state.s[i] + cfg.action_gain * a + cfg.noise_scale * xi;
  }
  out.next.step_index = state.step_index + 1;
  out.reward = reward(out.next.s);
  out.done = state.step_index + 1 >= cfg.horizon;
  return out;
}

StepOutcome step(const EnvState& state, std::span<const double> action, const EnvConfig& cfg,
                 Rng& rng) {
  static const RewardFn kDefault = [](std::span<const double> x) { return reward_landscape(x); };
  return step(state, action, cfg, rng, kDefault);
}

bool is_global_optimum(double x1) { return std::abs(x1 - 1.5) < 0.5; }

bool is_global_optimum(const EnvState& state) {
  return !state.s.empty() && is_global_optimum(state.s[0]);
}

}  // namespace quantfp
