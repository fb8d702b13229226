#pragma once

#include <cstdint>
#include <functional>
#include <span>
#include <vector>

#include "quantfp/rng.hpp"

namespace quantfp {

/// Linear-Gaussian dynamics s' = decay s + action_gain pad(clip(a)) + noise_scale xi.
struct EnvConfig {
  int state_dim = 4;
  int action_dim = 2;
  int horizon = 200;
  double decay = 0.92;
  double action_gain = 0.15;
  double noise_scale = 0.08;
  double action_clip = 1.0;
  double reset_std = 0.5;  // reset draws s ~ N(0, reset_std^2 I)

  void validate() const;
};

struct EnvState {
  std::vector<double> s;
  int step_index = 0;
};

struct StepOutcome {
  EnvState next;
  double reward = 0.0;
  bool done = false;
};

using RewardFn = std::function<double(std::span<const double>)>;

/// Two-mode reward: local optimum 8 at x1 = -1.5, global optimum 15 at x1 = +1.5,
/// a barrier at 0, and a quadratic penalty on the remaining coordinates.
double reward_landscape(std::span<const double> x);
/// reward_landscape(x1, 0, ..., 0).
double reward_landscape_x1(double x1);

EnvState reset(const EnvConfig& cfg, std::uint64_t seed);
EnvState reset(const EnvConfig& cfg, Rng& rng);

/// Reward is evaluated on the post-transition state. Throws InputError on a
/// non-finite action or a wrong action length.
StepOutcome step(const EnvState& state, std::span<const double> action, const EnvConfig& cfg,
                 Rng& rng);
StepOutcome step(const EnvState& state, std::span<const double> action, const EnvConfig& cfg,
                 Rng& rng, const RewardFn& reward);

/// |s1 - 1.5| < 0.5, strict.
bool is_global_optimum(const EnvState& state);
bool is_global_optimum(double x1);

}  // namespace quantfp
