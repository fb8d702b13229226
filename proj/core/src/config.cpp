#include "quantfp/config.hpp"

#include <cmath>
#include <fstream>
#include <initializer_list>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quantfp/errors.hpp"

namespace quantfp {

using nlohmann::json;

std::string_view to_string(ExperimentKind kind) {
  switch (kind) {
    case ExperimentKind::Train: return "train";
    case ExperimentKind::Complexity: return "complexity";
    case ExperimentKind::Scaling: return "scaling";
    case ExperimentKind::QubitAblation: return "ablate-qubits";
    case ExperimentKind::ModeCollapse: return "mode-collapse";
    case ExperimentKind::FpSolve: return "fp-solve";
  }
  return "unknown";
}

ExperimentKind parse_experiment_kind(std::string_view name) {
  for (auto k : {ExperimentKind::Train, ExperimentKind::Complexity, ExperimentKind::Scaling,
                 ExperimentKind::QubitAblation, ExperimentKind::ModeCollapse,
                 ExperimentKind::FpSolve}) {
    if (name == to_string(k)) return k;
  }
  throw ConfigError("unknown experiment '" + std::string(name) + "'");
}

Potential PotentialSpec::build() const { return Potential::from_spec(kind, params); }

namespace {

std::string_view to_string(FpPotentialSource s) {
  return s == FpPotentialSource::CriticSlice ? "critic_slice" : "reward_slice";
}

FpPotentialSource parse_source(const std::string& name) {
  if (name == "reward_slice") return FpPotentialSource::RewardSlice;
  if (name == "critic_slice") return FpPotentialSource::CriticSlice;
  throw ConfigError("unknown fp_potential_source '" + name + "'");
}

// Reads one JSON object, remembering which keys were consumed so leftovers can be
// reported as typos.
class Section {
 public:
  Section(const json& j, std::string where) : j_(&j), where_(std::move(where)) {
    if (!j.is_object()) throw ConfigError(where_ + ": expected an object");
  }

  template <class T>
  void read(const char* key, T& out) {
    seen_.emplace_back(key);
    auto it = j_->find(key);
    if (it == j_->end()) return;
    try {
      out = it->template get<T>();
    } catch (const json::exception& e) {
      throw ConfigError(where_ + "." + key + ": " + e.what());
    }
  }

  const json* child(const char* key) {
    seen_.emplace_back(key);
    auto it = j_->find(key);
    return it == j_->end() ? nullptr : &*it;
  }

  std::string path(const char* key) const { return where_ + "." + key; }

  void finish() const {
    for (const auto& [key, value] : j_->items()) {
      bool known = false;
      for (const auto& s : seen_) known = known || s == key;
      if (!known) throw ConfigError(where_ + ": unknown key '" + key + "'");
    }
  }

 private:
  const json* j_;
  std::string where_;
  std::vector<std::string> seen_;
};

void read_potential(Section& parent, const char* key, PotentialSpec& spec) {
  const json* j = parent.child(key);
  if (j == nullptr) return;
  Section s(*j, parent.path(key));
  s.read("kind", spec.kind);
  s.read("params", spec.params);
  s.finish();
}

void read_domain(Section& parent, const char* key, DomainSpec& d) {
  const json* j = parent.child(key);
  if (j == nullptr) return;
  Section s(*j, parent.path(key));
  s.read("lower", d.lower);
  s.read("upper", d.upper);
  s.read("n_qubits", d.n_qubits);
  s.finish();
}

template <class Fn>
void with_section(Section& parent, const char* key, Fn&& fn) {
  const json* j = parent.child(key);
  if (j == nullptr) return;
  Section s(*j, parent.path(key));
  fn(s);
  s.finish();
}

json potential_json(const PotentialSpec& p) { return {{"kind", p.kind}, {"params", p.params}}; }
json domain_json(const DomainSpec& d) {
  return {{"lower", d.lower}, {"upper", d.upper}, {"n_qubits", d.n_qubits}};
}

void require(bool ok, const std::string& what) {
  if (!ok) throw ConfigError(what);
}

}  // namespace

void ExperimentConfig::validate() const {
  require(!seeds.empty(), "at least one seed is required");
  require(episodes >= 1, "episodes must be >= 1");
  require(!agents.empty(), "at least one agent is required");
  env.validate();
  agent.qff.validate();
  agent.qae.validate();
  agent.sac.validate();
  agent.ddpg.validate();
  (void)make_grid(agent.qae_lower, agent.qae_upper, agent.qae.n_qubits);
  require(train.smoothing_window >= 1, "train.smoothing_window must be >= 1");

  (void)complexity.potential.build();
  (void)complexity.domain.grid();
  require(complexity.d_coeff > 0.0, "complexity.d_coeff must be positive");
  require(complexity.trials >= 30, "complexity.trials must be >= 30");
  require(complexity.epsilons.size() >= 3, "complexity needs >= 3 epsilons");
  for (double e : complexity.epsilons) require(e > 0.0, "complexity.epsilons must be positive");

  require(scaling.dims.size() >= 3, "scaling needs >= 3 dimensions");
  for (int d : scaling.dims) require(d >= 1, "scaling.dims must be >= 1");
  (void)scaling.potential.build();
  (void)scaling.domain.grid();
  require(scaling.d_coeff > 0.0, "scaling.d_coeff must be positive");
  require(scaling.relative_epsilon > 0.0, "scaling.relative_epsilon must be positive");
  require(scaling.pilot_samples >= 2, "scaling.pilot_samples must be >= 2");
  require(scaling.estimates_per_point >= 1, "scaling.estimates_per_point must be >= 1");
  require(scaling.step_budget >= 1, "scaling.step_budget must be >= 1");
  require(scaling.repetitions >= 1, "scaling.repetitions must be >= 1");

  (void)ablation.potential.build();
  require(ablation.qubits.size() >= 2, "ablation needs >= 2 qubit counts");
  for (int n : ablation.qubits) (void)make_grid(ablation.lower, ablation.upper, n);

  (void)mode_collapse.potential.build();
  require(!mode_collapse.agents.empty(), "mode_collapse.agents must not be empty");
  for (const auto& a : mode_collapse.agents) (void)parse_agent_kind(a);
  require(mode_collapse.episodes >= 1 && mode_collapse.horizon >= 1,
          "mode_collapse.episodes and horizon must be >= 1");
  require(mode_collapse.log_every >= 1 && mode_collapse.window >= 1,
          "mode_collapse.log_every and window must be >= 1");
  for (double t : mode_collapse.taus) require(t >= 0.0, "mode_collapse.taus must be >= 0");

  (void)fp_solve.potential.build();
  (void)fp_solve.potential_axis2.build();
  (void)fp_solve.domain.grid();
  (void)fp_solve.domain_2d.grid();
  require(fp_solve.d_coeff > 0.0, "fp_solve.d_coeff must be positive");
  require(fp_solve.t_end > 0.0, "fp_solve.t_end must be positive");
  require(fp_solve.initial_std > 0.0, "fp_solve.initial_std must be positive");
  require(fp_solve.snapshots >= 1, "fp_solve.snapshots must be >= 1");
}

ExperimentConfig parse_config(std::string_view json_text) {
  json root;
  try {
    root = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw ConfigError(std::string("malformed config: ") + e.what());
  }

  ExperimentConfig cfg;
  Section top(root, "config");

  std::string experiment(to_string(cfg.experiment));
  top.read("experiment", experiment);
  cfg.experiment = parse_experiment_kind(experiment);
  top.read("seeds", cfg.seeds);
  top.read("episodes", cfg.episodes);
  std::vector<std::string> agent_names;
  top.read("agents", agent_names);
  if (!agent_names.empty()) {
    cfg.agents.clear();
    for (const auto& n : agent_names) cfg.agents.push_back(parse_agent_kind(n));
  }
  std::string out = cfg.output_dir.string();
  top.read("output_dir", out);
  cfg.output_dir = out;

  with_section(top, "env", [&](Section& s) {
    auto& e = cfg.env;
    s.read("state_dim", e.state_dim);
    s.read("action_dim", e.action_dim);
    s.read("horizon", e.horizon);
    s.read("decay", e.decay);
    s.read("action_gain", e.action_gain);
    s.read("noise_scale", e.noise_scale);
    s.read("action_clip", e.action_clip);
    s.read("reset_std", e.reset_std);
  });

  with_section(top, "qff", [&](Section& s) {
    auto& q = cfg.agent.qff;
    s.read("alpha", q.alpha);
    s.read("beta", q.beta);
    s.read("d_coeff", q.d_coeff);
    s.read("eta_a", q.eta_a);
    s.read("eta_c", q.eta_c);
    s.read("gamma", q.gamma);
    s.read("beta_m", q.beta_m);
    s.read("qae_refresh", q.qae_refresh);
    std::string source(to_string(q.fp_potential_source));
    s.read("fp_potential_source", source);
    q.fp_potential_source = parse_source(source);
    s.read("printed_consistency_sign", q.printed_consistency_sign);
    s.read("h_fd", q.h_fd);
    s.read("init_log_sigma", q.init_log_sigma);
  });

  with_section(top, "qae", [&](Section& s) {
    auto& q = cfg.agent.qae;
    s.read("n_qubits", q.n_qubits);
    s.read("grover_iters", q.grover_iters);
    s.read("anneal_steps", q.anneal_steps);
    s.read("anneal_start_fraction", q.anneal_start_fraction);
    s.read("reflections_per_iteration", q.reflections_per_iteration);
    s.read("lower", cfg.agent.qae_lower);
    s.read("upper", cfg.agent.qae_upper);
  });
  // The annealing target is QuantFPFlow's beta; one source of truth.
  cfg.agent.qae.beta = cfg.agent.qff.beta;

  with_section(top, "sac", [&](Section& s) {
    auto& c = cfg.agent.sac;
    s.read("alpha_sac", c.alpha_sac);
    s.read("eta", c.eta);
    s.read("eta_c", c.eta_c);
    s.read("gamma", c.gamma);
    s.read("adam_beta1", c.adam_beta1);
    s.read("adam_beta2", c.adam_beta2);
    s.read("adam_eps", c.adam_eps);
    s.read("init_log_sigma", c.init_log_sigma);
  });

  with_section(top, "ddpg", [&](Section& s) {
    auto& c = cfg.agent.ddpg;
    s.read("sigma_ou", c.sigma_ou);
    s.read("theta_ou", c.theta_ou);
    s.read("eta_a", c.eta_a);
    s.read("eta_c", c.eta_c);
    s.read("gamma", c.gamma);
  });

  with_section(top, "train", [&](Section& s) {
    s.read("trace_episodes", cfg.train.trace_episodes);
    s.read("smoothing_window", cfg.train.smoothing_window);
  });

  with_section(top, "complexity", [&](Section& s) {
    auto& c = cfg.complexity;
    read_potential(s, "potential", c.potential);
    read_domain(s, "domain", c.domain);
    s.read("d_coeff", c.d_coeff);
    s.read("epsilons", c.epsilons);
    s.read("trials", c.trials);
  });

  with_section(top, "scaling", [&](Section& s) {
    auto& c = cfg.scaling;
    s.read("dims", c.dims);
    read_potential(s, "potential", c.potential);
    read_domain(s, "domain", c.domain);
    s.read("d_coeff", c.d_coeff);
    s.read("relative_epsilon", c.relative_epsilon);
    s.read("pilot_samples", c.pilot_samples);
    s.read("estimates_per_point", c.estimates_per_point);
    s.read("step_budget", c.step_budget);
    s.read("repetitions", c.repetitions);
  });

  with_section(top, "ablation", [&](Section& s) {
    auto& c = cfg.ablation;
    read_potential(s, "potential", c.potential);
    s.read("qubits", c.qubits);
    s.read("lower", c.lower);
    s.read("upper", c.upper);
    s.read("reference_d", c.reference_d);
  });

  with_section(top, "mode_collapse", [&](Section& s) {
    auto& c = cfg.mode_collapse;
    read_potential(s, "potential", c.potential);
    s.read("agents", c.agents);
    s.read("episodes", c.episodes);
    s.read("horizon", c.horizon);
    s.read("log_every", c.log_every);
    s.read("window", c.window);
    s.read("taus", c.taus);
  });

  with_section(top, "fp_solve", [&](Section& s) {
    auto& c = cfg.fp_solve;
    read_potential(s, "potential", c.potential);
    read_potential(s, "potential_axis2", c.potential_axis2);
    read_domain(s, "domain", c.domain);
    read_domain(s, "domain_2d", c.domain_2d);
    s.read("d_coeff", c.d_coeff);
    s.read("t_end", c.t_end);
    s.read("initial_mean", c.initial_mean);
    s.read("initial_std", c.initial_std);
    s.read("snapshots", c.snapshots);
  });

  top.finish();
  cfg.validate();
  return cfg;
}

ExperimentConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file " + path.string());
  std::ostringstream text;
  text << in.rdbuf();
  return parse_config(text.str());
}

std::string config_to_json(const ExperimentConfig& cfg) {
  json agents = json::array();
  for (auto a : cfg.agents) agents.push_back(std::string(to_string(a)));
  const auto& q = cfg.agent.qff;
  const auto& qae = cfg.agent.qae;
  const auto& sac = cfg.agent.sac;
  const auto& ddpg = cfg.agent.ddpg;
  const auto& e = cfg.env;
  json j = {
      {"experiment", std::string(to_string(cfg.experiment))},
      {"seeds", cfg.seeds},
      {"episodes", cfg.episodes},
      {"agents", agents},
      {"output_dir", cfg.output_dir.string()},
      {"env",
       {{"state_dim", e.state_dim}, {"action_dim", e.action_dim}, {"horizon", e.horizon},
        {"decay", e.decay}, {"action_gain", e.action_gain}, {"noise_scale", e.noise_scale},
        {"action_clip", e.action_clip}, {"reset_std", e.reset_std}}},
      {"qff",
       {{"alpha", q.alpha}, {"beta", q.beta}, {"d_coeff", q.d_coeff}, {"eta_a", q.eta_a},
        {"eta_c", q.eta_c}, {"gamma", q.gamma}, {"beta_m", q.beta_m},
        {"qae_refresh", q.qae_refresh},
        {"fp_potential_source", std::string(to_string(q.fp_potential_source))},
        {"printed_consistency_sign", q.printed_consistency_sign}, {"h_fd", q.h_fd},
        {"init_log_sigma", q.init_log_sigma}}},
      {"qae",
       {{"n_qubits", qae.n_qubits}, {"grover_iters", qae.grover_iters},
        {"anneal_steps", qae.anneal_steps}, {"anneal_start_fraction", qae.anneal_start_fraction},
        {"reflections_per_iteration", qae.reflections_per_iteration},
        {"lower", cfg.agent.qae_lower}, {"upper", cfg.agent.qae_upper}}},
      {"sac",
       {{"alpha_sac", sac.alpha_sac}, {"eta", sac.eta}, {"eta_c", sac.eta_c},
        {"gamma", sac.gamma}, {"adam_beta1", sac.adam_beta1}, {"adam_beta2", sac.adam_beta2},
        {"adam_eps", sac.adam_eps}, {"init_log_sigma", sac.init_log_sigma}}},
      {"ddpg",
       {{"sigma_ou", ddpg.sigma_ou}, {"theta_ou", ddpg.theta_ou}, {"eta_a", ddpg.eta_a},
        {"eta_c", ddpg.eta_c}, {"gamma", ddpg.gamma}}},
      {"train",
       {{"trace_episodes", cfg.train.trace_episodes},
        {"smoothing_window", cfg.train.smoothing_window}}},
      {"complexity",
       {{"potential", potential_json(cfg.complexity.potential)},
        {"domain", domain_json(cfg.complexity.domain)},
        {"d_coeff", cfg.complexity.d_coeff},
        {"epsilons", cfg.complexity.epsilons},
        {"trials", cfg.complexity.trials}}},
      {"scaling",
       {{"dims", cfg.scaling.dims},
        {"potential", potential_json(cfg.scaling.potential)},
        {"domain", domain_json(cfg.scaling.domain)},
        {"d_coeff", cfg.scaling.d_coeff},
        {"relative_epsilon", cfg.scaling.relative_epsilon},
        {"pilot_samples", cfg.scaling.pilot_samples},
        {"estimates_per_point", cfg.scaling.estimates_per_point},
        {"step_budget", cfg.scaling.step_budget},
        {"repetitions", cfg.scaling.repetitions}}},
      {"ablation",
       {{"potential", potential_json(cfg.ablation.potential)},
        {"qubits", cfg.ablation.qubits},
        {"lower", cfg.ablation.lower},
        {"upper", cfg.ablation.upper},
        {"reference_d", cfg.ablation.reference_d}}},
      {"mode_collapse",
       {{"potential", potential_json(cfg.mode_collapse.potential)},
        {"agents", cfg.mode_collapse.agents},
        {"episodes", cfg.mode_collapse.episodes},
        {"horizon", cfg.mode_collapse.horizon},
        {"log_every", cfg.mode_collapse.log_every},
        {"window", cfg.mode_collapse.window},
        {"taus", cfg.mode_collapse.taus}}},
      {"fp_solve",
       {{"potential", potential_json(cfg.fp_solve.potential)},
        {"potential_axis2", potential_json(cfg.fp_solve.potential_axis2)},
        {"domain", domain_json(cfg.fp_solve.domain)},
        {"domain_2d", domain_json(cfg.fp_solve.domain_2d)},
        {"d_coeff", cfg.fp_solve.d_coeff},
        {"t_end", cfg.fp_solve.t_end},
        {"initial_mean", cfg.fp_solve.initial_mean},
        {"initial_std", cfg.fp_solve.initial_std},
        {"snapshots", cfg.fp_solve.snapshots}}},
  };
  return j.dump(2);
}

}  // namespace quantfp
