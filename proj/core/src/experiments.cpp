#include "quantfp/experiments.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <functional>
#include <numeric>
#include <ostream>
#include <sstream>

#include <nlohmann/json.hpp>

#include "quantfp/csv.hpp"
#include "quantfp/errors.hpp"

namespace quantfp {

using nlohmann::json;

namespace {

bool writes_output(const ExperimentConfig& cfg) { return !cfg.output_dir.empty(); }

void write_json(const ExperimentConfig& cfg, const std::string& name, const json& j) {
  auto out = open_output(cfg.output_dir / name);
  out << j.dump(2) << '\n';
}

void write_config_snapshot(const ExperimentConfig& cfg) {
  ExperimentConfig snapshot = cfg;
  snapshot.output_dir.clear();  // keeps payloads independent of where they are written
  auto out = open_output(cfg.output_dir / "config.json");
  out << config_to_json(snapshot) << '\n';
}

double mean_of(std::span<const double> v) {
  return v.empty() ? 0.0 : std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

double std_of(std::span<const double> v) {
  if (v.size() < 2) return 0.0;
  const double m = mean_of(v);
  double s = 0.0;
  for (double x : v) s += (x - m) * (x - m);
  return std::sqrt(s / static_cast<double>(v.size()));
}

double median_of(std::vector<double> v) {
  std::sort(v.begin(), v.end());
  const std::size_t n = v.size();
  return n % 2 == 1 ? v[n / 2] : 0.5 * (v[n / 2 - 1] + v[n / 2]);
}

template <class Fn>
double seconds(Fn&& fn) {
  const auto t0 = std::chrono::steady_clock::now();
  fn();
  const auto t1 = std::chrono::steady_clock::now();
  return std::chrono::duration<double>(t1 - t0).count();
}

// ---------------------------------------------------------------------------
// Episode loop shared by the training and mode-collapse experiments.

struct EpisodeTotals {
  double env_reward = 0.0;
  double bonus = 0.0;
  double entropy_sum = 0.0;
  int on_optimum = 0;
  int steps = 0;
};

using StepHook = std::function<void(int t, const EnvState& s, std::span<const double> a,
                                    const StepOutcome& out, double bonus)>;

EpisodeTotals run_episode(Agent& agent, const EnvConfig& env, const RewardFn* reward,
                          Rng& env_rng, Rng& agent_rng, const StepHook& hook) {
  EpisodeTotals tot;
  agent.begin_episode();
  EnvState state = reset(env, env_rng);
  for (int t = 0; t < env.horizon; ++t) {
    const auto a = agent.act(state.s, agent_rng);
    StepOutcome out = reward != nullptr ? step(state, a, env, env_rng, *reward)
                                        : step(state, a, env, env_rng);
    const double bonus = agent.observe(state.s, a, out.reward, out.next.s, out.done);
    tot.env_reward += out.reward;
    tot.bonus += bonus;
    tot.entropy_sum += agent.entropy();
    tot.on_optimum += is_global_optimum(out.next) ? 1 : 0;
    ++tot.steps;
    if (hook) hook(t, state, a, out, bonus);
    state = std::move(out.next);
    if (out.done) break;
  }
  return tot;
}

std::string run_name(AgentKind kind, std::uint64_t seed) {
  return std::string(to_string(kind)) + "_seed" + std::to_string(seed);
}

void write_run_csv(std::ostream& out, const RunArtifacts& run, int window) {
  const auto smoothed = smooth(run.total_env_reward, window);
  CsvWriter csv(out);
  csv.header({"episode", "total_env_reward", "smoothed_reward", "total_bonus", "mean_entropy",
              "discovery_fraction", "sigma"});
  for (std::size_t e = 0; e < run.episodes(); ++e) {
    csv.cell(e + 1)
        .cell(run.total_env_reward[e])
        .cell(smoothed[e])
        .cell(run.total_bonus[e])
        .cell(run.mean_entropy[e])
        .cell(run.discovery_fraction[e])
        .cell(run.final_sigma[e]);
    csv.end_row();
  }
}

json summary_json(const Table1Summary& s) {
  return {{"mean_reward", s.mean_reward},
          {"std_reward", s.std_reward},
          {"peak_reward", s.peak_reward},
          {"global_rate", s.global_rate},
          {"sample_efficiency", s.sample_efficiency}};
}

}  // namespace

// ---------------------------------------------------------------------------
// train

RunArtifacts train_agent(AgentKind kind, const ExperimentConfig& cfg, std::uint64_t seed,
                         std::ostream* trace, const std::vector<int>& trace_episodes) {
  auto agent = make_agent(kind, cfg.agent, cfg.env);
  // Environment and agent draw from separate streams, so every agent sees the same
  // resets and transition noise for a given seed.
  Rng env_rng = make_rng(seed, 0);
  Rng agent_rng = make_rng(seed, 1);

  std::optional<CsvWriter> trace_csv;
  if (trace != nullptr) {
    trace_csv.emplace(*trace);
    std::vector<std::string> cols{"episode", "t"};
    for (int i = 1; i <= cfg.env.state_dim; ++i) cols.push_back("s" + std::to_string(i));
    for (int i = 1; i <= cfg.env.action_dim; ++i) cols.push_back("a" + std::to_string(i));
    for (const char* c : {"reward", "bonus", "done"}) cols.emplace_back(c);
    trace_csv->header(cols);
  }

  RunArtifacts run;
  run.agent = std::string(to_string(kind));
  run.seed = seed;
  run.horizon = cfg.env.horizon;
  for (int ep = 0; ep < cfg.episodes; ++ep) {
    const bool traced = trace_csv && std::find(trace_episodes.begin(), trace_episodes.end(),
                                               ep + 1) != trace_episodes.end();
    StepHook hook;
    if (traced) {
      hook = [&](int t, const EnvState& s, std::span<const double> a, const StepOutcome& out,
                 double bonus) {
        trace_csv->cell(ep + 1).cell(t);
        for (double x : s.s) trace_csv->cell(x);
        for (double x : a) trace_csv->cell(x);
        trace_csv->cell(out.reward).cell(bonus).cell(out.done ? 1 : 0);
        trace_csv->end_row();
      };
    }
    EpisodeTotals tot;
    try {
      tot = run_episode(*agent, cfg.env, nullptr, env_rng, agent_rng, hook);
    } catch (const ParameterError& e) {
      throw ParameterError(run.agent + " seed " + std::to_string(seed) + " episode " +
                           std::to_string(ep + 1) + ": " + e.what());
    }
    run.total_env_reward.push_back(tot.env_reward);
    run.total_bonus.push_back(tot.bonus);
    run.mean_entropy.push_back(tot.entropy_sum / tot.steps);
    run.discovery_fraction.push_back(static_cast<double>(tot.on_optimum) / tot.steps);
    run.final_sigma.push_back(agent->sigma());
  }
  return run;
}

TrainingResult run_training(const ExperimentConfig& cfg) {
  cfg.validate();
  auto agents = cfg.agents;
  std::sort(agents.begin(), agents.end());
  agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
  auto seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  const bool out = writes_output(cfg);
  TrainingResult result;
  for (AgentKind kind : agents) {
    for (std::uint64_t seed : seeds) {
      std::optional<std::ofstream> trace;
      if (out && seed == seeds.front() && !cfg.train.trace_episodes.empty()) {
        trace.emplace(open_output(cfg.output_dir / "traces" / (run_name(kind, seed) + ".csv")));
      }
      result.runs.push_back(train_agent(kind, cfg, seed, trace ? &*trace : nullptr,
                                        cfg.train.trace_episodes));
      if (out) {
        auto f = open_output(cfg.output_dir / "runs" / (run_name(kind, seed) + ".csv"));
        write_run_csv(f, result.runs.back(), cfg.train.smoothing_window);
      }
    }
  }

  if (static_cast<std::size_t>(cfg.episodes) >= kSummaryWindow) {
    for (AgentKind kind : agents) {
      AgentSummary s;
      s.agent = kind;
      for (const auto& run : result.runs) {
        if (run.agent != to_string(kind)) continue;
        s.seeds.push_back(run.seed);
        s.per_seed.push_back(table1_summary(run));
        s.final_entropy.push_back(run.mean_entropy.back());
        s.final_sigma.push_back(run.final_sigma.back());
      }
      auto pool = [&](double Table1Summary::*field) {
        double acc = 0.0;
        for (const auto& t : s.per_seed) acc += t.*field;
        return acc / static_cast<double>(s.per_seed.size());
      };
      s.pooled.mean_reward = pool(&Table1Summary::mean_reward);
      s.pooled.std_reward = pool(&Table1Summary::std_reward);
      s.pooled.peak_reward = pool(&Table1Summary::peak_reward);
      s.pooled.global_rate = pool(&Table1Summary::global_rate);
      s.pooled.sample_efficiency = pool(&Table1Summary::sample_efficiency);
      result.summaries.push_back(std::move(s));
    }
  }

  if (!out) return result;
  write_config_snapshot(cfg);

  {
    auto f = open_output(cfg.output_dir / "learning_curves.csv");
    CsvWriter csv(f);
    csv.header({"agent", "episode", "mean_smoothed_reward", "std_smoothed_reward",
                "mean_entropy", "mean_discovery_fraction"});
    for (AgentKind kind : agents) {
      std::vector<std::vector<double>> smoothed;
      std::vector<const RunArtifacts*> runs;
      for (const auto& run : result.runs) {
        if (run.agent != to_string(kind)) continue;
        smoothed.push_back(smooth(run.total_env_reward, cfg.train.smoothing_window));
        runs.push_back(&run);
      }
      for (int e = 0; e < cfg.episodes; ++e) {
        std::vector<double> r, h, g;
        for (std::size_t k = 0; k < runs.size(); ++k) {
          r.push_back(smoothed[k][e]);
          h.push_back(runs[k]->mean_entropy[e]);
          g.push_back(runs[k]->discovery_fraction[e]);
        }
        csv.cell(to_string(kind)).cell(e + 1).cell(mean_of(r)).cell(std_of(r));
        csv.cell(mean_of(h)).cell(mean_of(g));
        csv.end_row();
      }
    }
  }

  json agents_json = json::object();
  if (!result.summaries.empty()) {
    auto f = open_output(cfg.output_dir / "table1.csv");
    CsvWriter csv(f);
    csv.header({"agent", "seed", "mean_reward", "std_reward", "peak_reward", "global_rate",
                "sample_efficiency", "final_entropy", "final_sigma"});
    for (const auto& s : result.summaries) {
      json per_seed = json::array();
      for (std::size_t k = 0; k < s.seeds.size(); ++k) {
        const auto& t = s.per_seed[k];
        csv.cell(to_string(s.agent)).cell(static_cast<std::size_t>(s.seeds[k]));
        csv.cell(t.mean_reward).cell(t.std_reward).cell(t.peak_reward).cell(t.global_rate);
        csv.cell(t.sample_efficiency).cell(s.final_entropy[k]).cell(s.final_sigma[k]);
        csv.end_row();
        json j = summary_json(t);
        j["seed"] = s.seeds[k];
        j["final_entropy"] = s.final_entropy[k];
        j["final_sigma"] = s.final_sigma[k];
        per_seed.push_back(j);
      }
      json pooled = summary_json(s.pooled);
      pooled["final_entropy"] = mean_of(s.final_entropy);
      pooled["final_sigma"] = mean_of(s.final_sigma);
      agents_json[std::string(to_string(s.agent))] = {{"pooled", pooled},
                                                      {"per_seed", per_seed}};
    }
  }
  for (const auto& run : result.runs) {
    json j = {{"agent", run.agent},
              {"seed", run.seed},
              {"episodes", run.episodes()},
              {"horizon", run.horizon},
              {"final_sigma", run.final_sigma.back()},
              {"final_entropy", run.mean_entropy.back()}};
    if (run.episodes() >= kSummaryWindow) j["summary"] = summary_json(table1_summary(run));
    write_json(cfg, "runs/" + run_name(parse_agent_kind(run.agent), run.seed) + ".json", j);
  }
  write_json(cfg, "train.json",
             {{"experiment", "train"}, {"episodes", cfg.episodes}, {"agents", agents_json}});
  return result;
}

// ---------------------------------------------------------------------------
// complexity

ComplexityResult run_complexity(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& c = cfg.complexity;
  const PartitionProblem problem(c.potential.build(), c.d_coeff, c.domain.grid());
  const std::uint64_t seed = cfg.seeds.front();

  ComplexityResult result;
  std::vector<double> inv_eps, classical, quantum;
  for (double eps : c.epsilons) {
    const auto pc = queries_to_precision(EstimatorMethod::ClassicalMC, problem, eps, c.trials, seed);
    const auto pq = queries_to_precision(EstimatorMethod::SimulatedQae, problem, eps, c.trials, seed);
    result.points.push_back(pc);
    result.points.push_back(pq);
    inv_eps.push_back(1.0 / eps);
    classical.push_back(static_cast<double>(pc.queries));
    quantum.push_back(static_cast<double>(pq.queries));
    result.query_ratio.push_back(classical.back() / quantum.back());
  }
  result.classical_slope = fit_power_law(inv_eps, classical);
  result.quantum_slope = fit_power_law(inv_eps, quantum);

  if (writes_output(cfg)) {
    write_config_snapshot(cfg);
    auto f = open_output(cfg.output_dir / "complexity.csv");
    write_complexity_csv(f, result.points);
    write_json(cfg, "complexity.json",
               {{"experiment", "complexity"},
                {"exact_partition_function", problem.exact()},
                {"epsilons", c.epsilons},
                {"classical_slope", result.classical_slope},
                {"quantum_slope", result.quantum_slope},
                {"query_ratio", result.query_ratio},
                {"trials", c.trials}});
  }
  return result;
}

// ---------------------------------------------------------------------------
// scaling

namespace {

// Simpson quadrature of exp(-V/D) over the domain, the exact one-dimensional factor
// of the product partition function.
double integrate_boltzmann(const Potential& pot, double d_coeff, double lo, double hi) {
  const int n = 4096;
  const double h = (hi - lo) / n;
  double s = 0.0;
  for (int i = 0; i <= n; ++i) {
    const double w = (i == 0 || i == n) ? 1.0 : (i % 2 == 1 ? 4.0 : 2.0);
    s += w * std::exp(-pot(lo + i * h) / d_coeff);
  }
  return s * h / 3.0;
}

// One d-dimensional draw of exp(-sum_j V(x_j)/D) with x uniform on the box.
double product_weight(const Potential& pot, double d_coeff, int dim,
                      std::uniform_real_distribution<double>& unit, Rng& rng) {
  double v = 0.0;
  for (int j = 0; j < dim; ++j) v += pot(unit(rng));
  return std::exp(-v / d_coeff);
}

}  // namespace

ScalingResult run_scaling(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& sc = cfg.scaling;
  const Potential pot = sc.potential.build();
  const double lo = sc.domain.lower;
  const double hi = sc.domain.upper;
  const double z1 = integrate_boltzmann(pot, sc.d_coeff, lo, hi);
  const Grid1D grid = sc.domain.grid();
  const auto v_grid = eval_potential(pot, grid);
  QaeConfig qae = cfg.agent.qae;
  qae.beta = 1.0 / sc.d_coeff;
  const std::uint64_t seed = cfg.seeds.front();
  const int refresh = cfg.agent.qff.qae_refresh;

  ScalingResult result;
  for (int dim : sc.dims) {
    ScalingPoint pt;
    pt.dim = dim;
    const double volume = std::pow(hi - lo, dim);
    const double exact = std::pow(z1, dim);
    std::uniform_real_distribution<double> unit(lo, hi);

    // Pilot relative variance, then Chebyshev at 2/3 confidence: k = 3 Var / (eps Z)^2.
    Rng pilot = make_rng(seed, 100 + static_cast<std::uint64_t>(dim));
    std::vector<double> w(static_cast<std::size_t>(sc.pilot_samples));
    for (double& x : w) x = product_weight(pot, sc.d_coeff, dim, unit, pilot);
    const double m = mean_of(w);
    double var = 0.0;
    for (double x : w) var += (x - m) * (x - m);
    var /= static_cast<double>(w.size() - 1);
    const double rel_var = var / (m * m);
    pt.samples_per_estimate = static_cast<std::uint64_t>(
        std::max(1.0, std::ceil(3.0 * rel_var / (sc.relative_epsilon * sc.relative_epsilon))));

    std::vector<double> errors;
    auto classical = [&] {
      errors.clear();
      Rng rng = make_rng(seed, 200 + static_cast<std::uint64_t>(dim));
      for (int e = 0; e < sc.estimates_per_point; ++e) {
        double acc = 0.0;
        for (std::uint64_t k = 0; k < pt.samples_per_estimate; ++k) {
          acc += product_weight(pot, sc.d_coeff, dim, unit, rng);
        }
        const double z_hat = volume * acc / static_cast<double>(pt.samples_per_estimate);
        errors.push_back(std::abs(z_hat - exact) / exact);
      }
    };

    double lookup_sink = 0.0;
    auto quantum = [&] {
      Rng rng = make_rng(seed, 300 + static_cast<std::uint64_t>(dim));
      std::normal_distribution<double> normal(0.0, 1.0);
      std::vector<double> x(static_cast<std::size_t>(dim), 0.0);
      std::optional<DensityEstimate> cache;
      double acc = 0.0;
      for (int t = 0; t < sc.step_budget; ++t) {
        if (t % refresh == 0) cache.emplace(annealed_qae(v_grid, grid, qae));
        for (double& xi : x) {
          xi = cfg.env.decay * xi + cfg.env.noise_scale * normal(rng);
          acc += exploration_bonus(cache->mass_at(xi), cfg.agent.qff.alpha);
        }
      }
      lookup_sink = acc;
    };

    std::vector<double> tc, tq;
    for (int r = 0; r < sc.repetitions; ++r) {
      tc.push_back(seconds(classical));
      tq.push_back(seconds(quantum));
    }
    if (!std::isfinite(lookup_sink)) throw NumericError("non-finite bonus in scaling pipeline");
    pt.classical_seconds = median_of(tc);
    pt.quantum_seconds = median_of(tq);

    std::sort(errors.begin(), errors.end());
    const auto q = static_cast<std::size_t>(
        std::ceil(2.0 * static_cast<double>(errors.size()) / 3.0)) - 1;
    pt.classical_relative_error = errors[q];
    pt.classical_work = static_cast<double>(sc.estimates_per_point) *
                        static_cast<double>(pt.samples_per_estimate) * dim;
    const double refreshes = std::ceil(static_cast<double>(sc.step_budget) / refresh);
    const double per_refresh = static_cast<double>(grid.size()) * qae.anneal_steps *
                               (1.0 + qae.grover_iters * qae.reflections_per_iteration);
    pt.quantum_work = refreshes * per_refresh + static_cast<double>(sc.step_budget) * dim;
    result.points.push_back(pt);
  }

  std::vector<double> d, cw, qw, ct, qt;
  for (const auto& p : result.points) {
    d.push_back(p.dim);
    cw.push_back(p.classical_work);
    qw.push_back(p.quantum_work);
    ct.push_back(p.classical_seconds);
    qt.push_back(p.quantum_seconds);
  }
  result.classical_work_exponent = fit_power_law(d, cw);
  result.quantum_work_exponent = fit_power_law(d, qw);
  result.classical_time_exponent = fit_power_law(d, ct);
  result.quantum_time_exponent = fit_power_law(d, qt);

  if (writes_output(cfg)) {
    write_config_snapshot(cfg);
    {
      auto f = open_output(cfg.output_dir / "scaling.csv");
      CsvWriter csv(f);
      csv.header({"dim", "samples_per_estimate", "classical_relative_error", "classical_work",
                  "quantum_work"});
      for (const auto& p : result.points) {
        csv.cell(p.dim).cell(static_cast<std::size_t>(p.samples_per_estimate));
        csv.cell(p.classical_relative_error).cell(p.classical_work).cell(p.quantum_work);
        csv.end_row();
      }
    }
    {
      // Wall-clock numbers differ between runs; kept apart from the payload files.
      auto f = open_output(cfg.output_dir / "scaling_timing.csv");
      CsvWriter csv(f);
      csv.header({"dim", "classical_seconds", "quantum_seconds"});
      for (const auto& p : result.points) {
        csv.cell(p.dim).cell(p.classical_seconds).cell(p.quantum_seconds);
        csv.end_row();
      }
    }
    write_json(cfg, "scaling.json",
               {{"experiment", "scaling"},
                {"dims", sc.dims},
                {"classical_work_exponent", result.classical_work_exponent},
                {"quantum_work_exponent", result.quantum_work_exponent}});
    write_json(cfg, "scaling_timing.json",
               {{"classical_time_exponent", result.classical_time_exponent},
                {"quantum_time_exponent", result.quantum_time_exponent},
                {"repetitions", sc.repetitions}});
  }
  return result;
}

// ---------------------------------------------------------------------------
// qubit ablation

AblationResult run_qubit_ablation(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& ab = cfg.ablation;
  const Potential pot = ab.potential.build();
  AblationResult result;
  result.reference_d = ab.reference_d > 0.0 ? ab.reference_d : 1.0 / cfg.agent.qae.beta;
  for (int n : ab.qubits) {
    const Grid1D g = make_grid(ab.lower, ab.upper, n);
    QaeConfig qae = cfg.agent.qae;
    qae.n_qubits = n;
    const auto v = eval_potential(pot, g);
    const auto est = annealed_qae(v, g, qae);
    result.rows.push_back({n, mse(est, stationary_analytic(v, result.reference_d, g)),
                           mse(est, stationary_analytic(v, cfg.agent.qff.d_coeff, g))});
  }

  if (writes_output(cfg)) {
    write_config_snapshot(cfg);
    auto f = open_output(cfg.output_dir / "qubit_ablation.csv");
    CsvWriter csv(f);
    csv.header({"n_qubits", "points", "mse", "mse_at_d_coeff"});
    json rows = json::array();
    for (const auto& r : result.rows) {
      csv.cell(r.n_qubits).cell(std::size_t{1} << r.n_qubits).cell(r.mse).cell(r.mse_at_d_coeff);
      csv.end_row();
      rows.push_back({{"n_qubits", r.n_qubits}, {"mse", r.mse}, {"mse_at_d_coeff", r.mse_at_d_coeff}});
    }
    write_json(cfg, "qubit_ablation.json",
               {{"experiment", "ablate-qubits"},
                {"reference_d", result.reference_d},
                {"d_coeff", cfg.agent.qff.d_coeff},
                {"rows", rows}});
  }
  return result;
}

// ---------------------------------------------------------------------------
// mode collapse

double ModeCollapseResult::mean_final_kl(AgentKind agent) const {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (r.agent == agent && !r.kl.empty()) v.push_back(r.kl.back());
  }
  if (v.empty()) throw InputError("no mode-collapse runs for " + std::string(to_string(agent)));
  return mean_of(v);
}

double ModeCollapseResult::mean_coverage(AgentKind agent, std::size_t i) const {
  std::vector<double> v;
  for (const auto& r : runs) {
    if (r.agent == agent) v.push_back(r.coverage.at(i));
  }
  if (v.empty()) throw InputError("no mode-collapse runs for " + std::string(to_string(agent)));
  return mean_of(v);
}

ModeCollapseResult run_mode_collapse(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& mc = cfg.mode_collapse;
  const Potential pot = mc.potential.build();
  const Grid1D grid = make_grid(cfg.agent.qae_lower, cfg.agent.qae_upper, cfg.agent.qae.n_qubits);
  const DensityEstimate target = stationary_analytic(pot, cfg.agent.qff.d_coeff, grid);

  // One-dimensional surrogate: state x, reward -V(x), same dynamics template.
  EnvConfig env = cfg.env;
  env.state_dim = 1;
  env.action_dim = 1;
  env.horizon = mc.horizon;
  const RewardFn reward = [&pot](std::span<const double> s) { return -pot(s[0]); };
  AgentSettings settings = cfg.agent;
  settings.fp_potential = pot;

  std::vector<AgentKind> agents;
  for (const auto& name : mc.agents) agents.push_back(parse_agent_kind(name));
  std::sort(agents.begin(), agents.end());
  agents.erase(std::unique(agents.begin(), agents.end()), agents.end());
  auto seeds = cfg.seeds;
  std::sort(seeds.begin(), seeds.end());
  seeds.erase(std::unique(seeds.begin(), seeds.end()), seeds.end());

  ModeCollapseResult result;
  result.taus = mc.taus;
  result.target_mass.assign(target.mass().begin(), target.mass().end());

  for (AgentKind kind : agents) {
    for (std::uint64_t seed : seeds) {
      auto agent = make_agent(kind, settings, env);
      Rng env_rng = make_rng(seed, 0);
      Rng agent_rng = make_rng(seed, 1);
      std::vector<std::vector<double>> visited;  // per episode
      ModeCollapseRun run;
      run.agent = kind;
      run.seed = seed;

      auto window_density = [&] {
        std::vector<double> xs;
        const std::size_t first =
            visited.size() > static_cast<std::size_t>(mc.window) ? visited.size() - mc.window : 0;
        for (std::size_t e = first; e < visited.size(); ++e) {
          xs.insert(xs.end(), visited[e].begin(), visited[e].end());
        }
        return histogram_density(grid, xs);
      };

      for (int ep = 0; ep < mc.episodes; ++ep) {
        std::vector<double> xs;
        xs.reserve(static_cast<std::size_t>(mc.horizon));
        run_episode(*agent, env, &reward, env_rng, agent_rng,
                    [&xs](int, const EnvState&, std::span<const double>, const StepOutcome& out,
                          double) { xs.push_back(out.next.s[0]); });
        visited.push_back(std::move(xs));
        if ((ep + 1) % mc.log_every == 0 || ep + 1 == mc.episodes) {
          run.logged_episodes.push_back(ep + 1);
          run.kl.push_back(kl_divergence(target, window_density()));
        }
      }
      const auto final_density = window_density();
      for (double tau : mc.taus) run.coverage.push_back(coverage(final_density, tau));
      run.final_mass.assign(final_density.mass().begin(), final_density.mass().end());
      result.runs.push_back(std::move(run));
    }
  }

  if (writes_output(cfg)) {
    write_config_snapshot(cfg);
    {
      auto f = open_output(cfg.output_dir / "mode_collapse_kl.csv");
      CsvWriter csv(f);
      csv.header({"agent", "seed", "episode", "kl"});
      for (const auto& r : result.runs) {
        for (std::size_t i = 0; i < r.kl.size(); ++i) {
          csv.cell(to_string(r.agent)).cell(static_cast<std::size_t>(r.seed));
          csv.cell(r.logged_episodes[i]).cell(r.kl[i]);
          csv.end_row();
        }
      }
    }
    {
      auto f = open_output(cfg.output_dir / "mode_collapse_coverage.csv");
      CsvWriter csv(f);
      csv.header({"agent", "seed", "tau", "coverage"});
      for (const auto& r : result.runs) {
        for (std::size_t i = 0; i < mc.taus.size(); ++i) {
          csv.cell(to_string(r.agent)).cell(static_cast<std::size_t>(r.seed));
          csv.cell(mc.taus[i]).cell(r.coverage[i]);
          csv.end_row();
        }
      }
    }
    {
      auto f = open_output(cfg.output_dir / "mode_collapse_density.csv");
      CsvWriter csv(f);
      csv.header({"source", "seed", "x", "mass"});
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.cell("target").cell("").cell(grid[i]).cell(result.target_mass[i]);
        csv.end_row();
      }
      for (const auto& r : result.runs) {
        for (std::size_t i = 0; i < grid.size(); ++i) {
          csv.cell(to_string(r.agent)).cell(static_cast<std::size_t>(r.seed));
          csv.cell(grid[i]).cell(r.final_mass[i]);
          csv.end_row();
        }
      }
    }
    json per_agent = json::object();
    for (AgentKind kind : agents) {
      std::vector<double> cov;
      for (std::size_t i = 0; i < mc.taus.size(); ++i) cov.push_back(result.mean_coverage(kind, i));
      per_agent[std::string(to_string(kind))] = {{"mean_final_kl", result.mean_final_kl(kind)},
                                                 {"mean_coverage", cov}};
    }
    write_json(cfg, "mode_collapse.json",
               {{"experiment", "mode-collapse"}, {"taus", mc.taus}, {"agents", per_agent}});
  }
  return result;
}

// ---------------------------------------------------------------------------
// fp solve

FpSolveResult run_fp_solve(const ExperimentConfig& cfg) {
  cfg.validate();
  const auto& fs = cfg.fp_solve;
  const Potential pot = fs.potential.build();
  const Grid1D grid = fs.domain.grid();

  std::vector<double> w(grid.size());
  for (std::size_t i = 0; i < w.size(); ++i) {
    const double z = (grid[i] - fs.initial_mean) / fs.initial_std;
    w[i] = std::exp(-0.5 * z * z);
  }
  const auto rho0 = DensityEstimate::from_weights(grid, std::move(w));
  EvolveOptions opts;
  opts.snapshots = fs.snapshots;
  auto trace = evolve_fp(pot, fs.d_coeff, grid, rho0, fs.t_end, opts);
  auto analytic = stationary_analytic(pot, fs.d_coeff, grid);
  QaeConfig qae = cfg.agent.qae;
  qae.n_qubits = grid.n_qubits();
  auto qae_est = annealed_qae(pot, grid, qae);
  const double final_l1 = l1_distance(trace.snapshots.back().mass(), analytic.mass());

  const Potential pot2 = fs.potential_axis2.build();
  const Grid2D g2{fs.domain_2d.grid(), fs.domain_2d.grid()};
  auto field = stationary_2d(pot, pot2, fs.d_coeff, g2);
  auto drift = drift_field_2d(pot, pot2, g2);
  const auto marginal = field.marginal_axis1();
  const auto reference = stationary_analytic(pot, fs.d_coeff, g2.axis1);
  const double marginal_l1 = l1_distance(marginal, reference.mass());

  FpSolveResult result{std::move(trace), std::move(analytic), std::move(qae_est), final_l1,
                       std::move(field), std::move(drift), marginal_l1};

  if (writes_output(cfg)) {
    write_config_snapshot(cfg);
    {
      auto f = open_output(cfg.output_dir / "fp_evolution.csv");
      write_evolution_csv(f, result.trace);
    }
    {
      auto f = open_output(cfg.output_dir / "fp_stationary_1d.csv");
      CsvWriter csv(f);
      csv.header({"x", "analytic", "solver_final", "annealed_qae"});
      const auto& last = result.trace.snapshots.back();
      for (std::size_t i = 0; i < grid.size(); ++i) {
        csv.cell(grid[i]).cell(result.analytic[i]).cell(last[i]).cell(result.qae[i]);
        csv.end_row();
      }
    }
    {
      auto f = open_output(cfg.output_dir / "fp_stationary_2d.csv");
      write_field_csv(f, result.field);
    }
    {
      auto f = open_output(cfg.output_dir / "fp_drift_2d.csv");
      write_vector_field_csv(f, result.drift);
    }
    write_json(cfg, "fp_solve.json",
               {{"experiment", "fp-solve"},
                {"dt", result.trace.dt},
                {"steps", result.trace.steps},
                {"converged", result.trace.converged},
                {"final_time", result.trace.times.back()},
                {"max_mass_drift", result.trace.max_mass_drift},
                {"final_l1_to_analytic", result.final_l1},
                {"marginal_l1", result.marginal_l1}});
  }
  return result;
}

// ---------------------------------------------------------------------------

std::string run_experiment(const ExperimentConfig& cfg) {
  json j = {{"status", "ok"}, {"experiment", std::string(to_string(cfg.experiment))}};
  if (writes_output(cfg)) j["output_dir"] = cfg.output_dir.string();
  switch (cfg.experiment) {
    case ExperimentKind::Train: {
      const auto r = run_training(cfg);
      j["runs"] = r.runs.size();
      for (const auto& s : r.summaries) {
        j["global_rate"][std::string(to_string(s.agent))] = s.pooled.global_rate;
      }
      break;
    }
    case ExperimentKind::Complexity: {
      const auto r = run_complexity(cfg);
      j["classical_slope"] = r.classical_slope;
      j["quantum_slope"] = r.quantum_slope;
      break;
    }
    case ExperimentKind::Scaling: {
      const auto r = run_scaling(cfg);
      j["classical_work_exponent"] = r.classical_work_exponent;
      j["quantum_work_exponent"] = r.quantum_work_exponent;
      j["classical_time_exponent"] = r.classical_time_exponent;
      j["quantum_time_exponent"] = r.quantum_time_exponent;
      break;
    }
    case ExperimentKind::QubitAblation: {
      const auto r = run_qubit_ablation(cfg);
      json mses = json::array();
      for (const auto& row : r.rows) mses.push_back(row.mse);
      j["mse"] = mses;
      break;
    }
    case ExperimentKind::ModeCollapse: {
      const auto r = run_mode_collapse(cfg);
      std::vector<AgentKind> seen;
      for (const auto& run : r.runs) {
        if (std::find(seen.begin(), seen.end(), run.agent) != seen.end()) continue;
        seen.push_back(run.agent);
        j["final_kl"][std::string(to_string(run.agent))] = r.mean_final_kl(run.agent);
      }
      break;
    }
    case ExperimentKind::FpSolve: {
      const auto r = run_fp_solve(cfg);
      j["final_l1"] = r.final_l1;
      j["steps"] = r.trace.steps;
      break;
    }
  }
  return j.dump();
}

}  // namespace quantfp
