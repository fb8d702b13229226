// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 if any fail.
//
//   quantfp_acceptance [--out dir]

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <functional>
#include <iostream>
#include <numbers>
#include <sstream>
#include <string>
#include <vector>

#include "quantfp/config.hpp"
#include "quantfp/estimator.hpp"
#include "quantfp/experiments.hpp"
#include "quantfp/fokker_planck.hpp"
#include "test_support.hpp"

using namespace quantfp;
namespace fs = std::filesystem;

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) {
  return std::chrono::duration<double>(Clock::now() - t0).count();
}

struct Verdict {
  bool pass = false;
  std::string detail;
};

int failures = 0;

void report(int id, const std::string& title, const Verdict& v) {
  if (!v.pass) ++failures;
  std::cout << "CRITERION " << id << " " << (v.pass ? "PASS" : "FAIL") << " [" << title << "] "
            << v.detail << std::endl;
}

void run_criterion(int id, const std::string& title, const std::function<Verdict()>& fn) {
  try {
    report(id, title, fn());
  } catch (const std::exception& e) {
    report(id, title, {false, std::string("exception: ") + e.what()});
  }
}

std::vector<std::size_t> local_maxima(std::span<const double> m) {
  std::vector<std::size_t> out;
  for (std::size_t i = 1; i + 1 < m.size(); ++i) {
    if (m[i] > m[i - 1] && m[i] >= m[i + 1]) out.push_back(i);
  }
  return out;
}

ExperimentConfig base_config(ExperimentKind kind, const fs::path& dir) {
  ExperimentConfig cfg;
  cfg.experiment = kind;
  cfg.output_dir = dir;
  return cfg;
}

}  // namespace

int main(int argc, char** argv) {
  fs::path root = fs::temp_directory_path() / "quantfp_acceptance";
  for (int i = 1; i + 1 < argc; ++i) {
    if (std::string(argv[i]) == "--out") root = argv[i + 1];
  }
  fs::remove_all(root);
  std::cout.setf(std::ios::fixed);
  std::cout.precision(4);

  // Configurations whose outputs are rerun for the determinism check.
  std::vector<ExperimentConfig> reruns;

  run_criterion(1, "complexity separation", [&] {
    auto cfg = base_config(ExperimentKind::Complexity, root / "complexity");
    const auto t0 = Clock::now();
    const auto r = run_complexity(cfg);
    const double secs = seconds_since(t0);
    reruns.push_back(cfg);
    std::ostringstream d;
    d << "classical slope " << r.classical_slope << " (want [1.8, 2.2]), quantum slope "
      << r.quantum_slope << " (want [0.9, 1.3]), ratios";
    for (double q : r.query_ratio) d << " " << q;
    d << ", " << secs << " s";
    const bool ok = r.classical_slope >= 1.8 && r.classical_slope <= 2.2 &&
                    r.quantum_slope >= 0.9 && r.quantum_slope <= 1.3 && secs < 300.0;
    return Verdict{ok, d.str()};
  });

  run_criterion(2, "QAE success probability", [&] {
    const Grid1D g(-3.0, 3.0, 7);
    const PartitionProblem prob(Potential::double_well_sine(), 0.3, g);
    std::ostringstream d;
    bool ok = true;
    for (int m : {4, 8, 12}) {
      int within = 0;
      const int trials = 500;
      for (int seed = 0; seed < trials; ++seed) {
        const double z = simulated_qae_partition(Potential::double_well_sine(), 0.3, g, m,
                                                 static_cast<std::uint64_t>(seed));
        if (std::abs(z - prob.exact()) <= prob.qae_error_bound(m)) ++within;
      }
      const double frac = static_cast<double>(within) / trials;
      ok = ok && frac >= 0.81 - 0.03;
      d << "m=" << m << ": " << frac << "  ";
    }
    d << "(want >= 0.81 within 0.03 sampling tolerance)";
    return Verdict{ok, d.str()};
  });

  run_criterion(3, "stationary-distribution fidelity", [&] {
    auto cfg = base_config(ExperimentKind::FpSolve, root / "fp_solve");
    const auto r = run_fp_solve(cfg);
    reruns.push_back(cfg);
    const auto& grid = r.qae.grid();
    const auto peaks = local_maxima(r.qae.mass());
    std::ostringstream d;
    d << "solver L1 " << r.final_l1 << " at t = " << r.trace.times.back()
      << " (want <= 0.05); QAE maxima at";
    bool modes_ok = peaks.size() == 2;
    for (std::size_t p : peaks) {
      const double target = grid[p] < 0 ? -std::numbers::sqrt2 : std::numbers::sqrt2;
      const double cells = std::abs(grid[p] - target) / grid.spacing();
      modes_ok = modes_ok && cells <= 3.0;
      d << " " << grid[p] << " (" << cells << " cells from " << target << ")";
    }
    // The Boltzmann density itself peaks at the minima of V, which the sine term
    // moves away from +-sqrt(2); report that reference as well.
    const auto ref = local_maxima(r.analytic.mass());
    d << "; exact density maxima at";
    for (std::size_t p : ref) d << " " << grid[p];
    const bool ok = r.final_l1 <= 5e-2 && modes_ok;
    return Verdict{ok, d.str()};
  });

  run_criterion(4, "qubit ablation", [&] {
    auto cfg = base_config(ExperimentKind::QubitAblation, root / "ablation");
    const auto r = run_qubit_ablation(cfg);
    reruns.push_back(cfg);
    auto mse_of = [&](int n) {
      for (const auto& row : r.rows)
        if (row.n_qubits == n) return row.mse;
      throw std::runtime_error("missing qubit count " + std::to_string(n));
    };
    const double m9 = mse_of(9);
    bool ok = mse_of(3) > mse_of(5);
    std::ostringstream d;
    d << "reference D " << r.reference_d << ", MSE";
    for (const auto& row : r.rows) {
      d << " n" << row.n_qubits << "=" << row.mse;
      if (row.n_qubits >= 5) ok = ok && row.mse <= 2.0 * m9 && m9 <= 2.0 * row.mse;
    }
    return Verdict{ok, d.str()};
  });

  run_criterion(5, "RL exploration ordering", [&] {
    auto cfg = base_config(ExperimentKind::Train, root / "train");
    const auto t0 = Clock::now();
    const auto r = run_training(cfg);
    const double secs = seconds_since(t0);
    reruns.push_back(cfg);
    auto find = [&](AgentKind k) -> const AgentSummary& {
      for (const auto& s : r.summaries)
        if (s.agent == k) return s;
      throw std::runtime_error("agent missing from summaries");
    };
    const auto& qff = find(AgentKind::QuantFPFlow);
    const auto& sac = find(AgentKind::SacLite);
    const auto& rnd = find(AgentKind::Random);

    int wins = 0;
    for (std::size_t i = 0; i < qff.per_seed.size(); ++i) {
      if (qff.per_seed[i].global_rate >= sac.per_seed[i].global_rate) ++wins;
    }
    const bool a = 2 * wins > static_cast<int>(qff.per_seed.size()) &&
                   qff.pooled.global_rate >= sac.pooled.global_rate;
    const bool b = rnd.pooled.mean_reward < 0.0;
    auto mean = [](const std::vector<double>& v) {
      double s = 0.0;
      for (double x : v) s += x;
      return s / static_cast<double>(v.size());
    };
    const bool c = mean(qff.final_entropy) > mean(sac.final_entropy);
    double worst = 0.0;
    for (double s : qff.final_sigma) worst = std::max(worst, std::abs(s * s - cfg.agent.qff.d_coeff));
    const bool dd = worst < 0.05;

    std::ostringstream d;
    d << "(a) " << (a ? "pass" : "fail") << ": rate QFF " << qff.pooled.global_rate << " vs SAC "
      << sac.pooled.global_rate << ", QFF >= SAC in " << wins << "/" << qff.per_seed.size()
      << " seeds; (b) " << (b ? "pass" : "fail") << ": Random final-80 mean "
      << rnd.pooled.mean_reward << "; (c) " << (c ? "pass" : "fail") << ": entropy QFF "
      << mean(qff.final_entropy) << " vs SAC " << mean(sac.final_entropy) << "; (d) "
      << (dd ? "pass" : "fail") << ": max |sigma^2 - D| " << worst << "; " << secs << " s";
    return Verdict{a && b && c && dd && secs < 900.0, d.str()};
  });

  run_criterion(6, "mode collapse", [&] {
    auto cfg = base_config(ExperimentKind::ModeCollapse, root / "mode_collapse");
    const auto r = run_mode_collapse(cfg);
    reruns.push_back(cfg);
    const double kq = r.mean_final_kl(AgentKind::QuantFPFlow);
    const double ks = r.mean_final_kl(AgentKind::SacLite);
    bool cover = true;
    std::ostringstream d;
    d << "final KL QFF " << kq << " vs SAC " << ks << "; coverage (tau: QFF/SAC)";
    for (std::size_t i = 0; i < r.taus.size(); ++i) {
      const double cq = r.mean_coverage(AgentKind::QuantFPFlow, i);
      const double cs = r.mean_coverage(AgentKind::SacLite, i);
      cover = cover && cq >= cs;
      d << " " << r.taus[i] << ":" << cq << "/" << cs;
    }
    return Verdict{kq < ks && cover, d.str()};
  });

  run_criterion(7, "dimension scaling", [&] {
    auto cfg = base_config(ExperimentKind::Scaling, root / "scaling");
    const auto r = run_scaling(cfg);
    reruns.push_back(cfg);
    std::ostringstream d;
    d << "time exponents classical " << r.classical_time_exponent << " vs quantum-inspired "
      << r.quantum_time_exponent << " (want gap >= 0.2); work exponents "
      << r.classical_work_exponent << " vs " << r.quantum_work_exponent;
    const bool ok = r.quantum_time_exponent <= r.classical_time_exponent - 0.2 &&
                    r.quantum_work_exponent <= r.classical_work_exponent - 0.2;
    return Verdict{ok, d.str()};
  });

  run_criterion(8, "determinism", [&] {
    bool ok = !reruns.empty();
    std::ostringstream d;
    for (auto cfg : reruns) {
      const auto first = testing::payload_files(cfg.output_dir);
      cfg.output_dir = cfg.output_dir.string() + "_rerun";
      run_experiment(cfg);
      const auto second = testing::payload_files(cfg.output_dir);
      std::size_t diff = first.size() == second.size() ? 0 : 1;
      for (const auto& [rel, text] : first) {
        const auto it = second.find(rel);
        if (it == second.end() || it->second != text) ++diff;
      }
      ok = ok && diff == 0 && !first.empty();
      d << to_string(cfg.experiment) << ": " << first.size() << " files, " << diff
        << " differ; ";
    }
    return Verdict{ok, d.str()};
  });

  run_criterion(9, "invariant suites", [&] {
    const std::string cmd = std::string(QUANTFP_UNIT_TESTS_PATH) + " --gtest_brief=1 > " +
                            (root / "unit_tests.log").string() + " 2>&1";
    const int status = std::system(cmd.c_str());
    std::ostringstream d;
    d << "unit and property tests exit status " << status << ", log "
      << (root / "unit_tests.log").string();
    return Verdict{status == 0, d.str()};
  });

  std::cout << (failures == 0 ? "ALL CRITERIA PASS" : std::to_string(failures) + " CRITERIA FAIL")
            << std::endl;
  return failures == 0 ? 0 : 1;
}
