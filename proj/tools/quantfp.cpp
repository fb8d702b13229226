// quantfp: run one experiment and print a one-line JSON result.
//
//   quantfp <train|complexity|scaling|ablate-qubits|mode-collapse|fp-solve>
//           [--config file.json] [--seed 0,1,2] [--out dir] [--agent quantfpflow,sac]
//
// Failures print {"status":"error","kind":...,"message":...} on stderr.

#include <cstdint>
#include <iostream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include "quantfp/config.hpp"
#include "quantfp/errors.hpp"
#include "quantfp/experiments.hpp"

namespace {

int report_error(std::string_view kind, std::string_view message, int code) {
  nlohmann::json j = {{"status", "error"}, {"kind", kind}, {"message", message}};
  std::cerr << j.dump() << '\n';
  return code;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"QuantFPFlow experiment harness"};
  app.require_subcommand(1);

  std::string config_path;
  std::vector<std::uint64_t> seeds;
  std::string out_dir;
  std::vector<std::string> agents;

  const std::vector<std::string> commands{"train",         "complexity",    "scaling",
                                          "ablate-qubits", "mode-collapse", "fp-solve"};
  for (const auto& name : commands) {
    auto* sub = app.add_subcommand(name);
    sub->add_option("--config", config_path, "JSON configuration file")->check(CLI::ExistingFile);
    sub->add_option("--seed", seeds, "Comma-separated seeds")->delimiter(',');
    sub->add_option("--out", out_dir, "Output directory");
    sub->add_option("--agent", agents, "Comma-separated agents")->delimiter(',');
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    return report_error("usage", e.what(), 2);
  }

  try {
    const auto* sub = app.get_subcommands().front();
    quantfp::ExperimentConfig cfg =
        config_path.empty() ? quantfp::ExperimentConfig{} : quantfp::load_config(config_path);
    cfg.experiment = quantfp::parse_experiment_kind(sub->get_name());
    if (!seeds.empty()) cfg.seeds = seeds;
    if (!out_dir.empty()) cfg.output_dir = out_dir;
    if (!agents.empty()) {
      cfg.agents.clear();
      for (const auto& a : agents) cfg.agents.push_back(quantfp::parse_agent_kind(a));
      cfg.mode_collapse.agents = agents;
    }
    cfg.validate();
    std::cout << quantfp::run_experiment(cfg) << '\n';
    return 0;
  } catch (const quantfp::Error& e) {
    return report_error(e.kind(), e.what(), 1);
  } catch (const std::exception& e) {
    return report_error("internal", e.what(), 1);
  }
}
