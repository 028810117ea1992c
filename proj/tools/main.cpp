// Scenario runner for the fog-domain orchestration simulator.
//
// Exit codes: 0 success, 1 config error, 2 invariant violation, 3 stuck
// episodes.

#include <filesystem>
#include <iostream>
#include <string>
#include <vector>

#include "CLI11.hpp"

#include "fogsim/analysis.hpp"
#include "fogsim/artifacts.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/simulation.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitConfig = 1;
constexpr int kExitInvariant = 2;
constexpr int kExitStuck = 3;

int cmd_run(const std::string& scenario_path, const std::string& out_dir,
            std::optional<std::uint64_t> seed_override) {
  fogsim::ScenarioConfig config = fogsim::load_scenario_file(scenario_path);
  if (seed_override) config.seed = *seed_override;

  fogsim::Simulation sim(config);
  sim.run();
  const fogsim::RunPaths paths = fogsim::write_artifacts(sim, out_dir);

  const auto checks = fogsim::run_property_checks(sim);
  bool violated = false;
  for (const auto& c : checks) {
    if (!c.pass) {
      violated = true;
      std::cerr << "invariant violated: " << c.name
                << (c.detail.empty() ? "" : " (" + c.detail + ")") << "\n";
    }
  }
  const auto stuck = sim.stuck_episodes();

  fogsim::SummaryStats s;
  if (!sim.samples().empty()) s = sim.summary();
  std::cout << "run complete: " << s.requests_total << " requests, " << s.errors << " errors, "
            << sim.migrations_solved() << " migrations, avg latency " << s.avg_latency_ms
            << " ms\n";
  std::cout << "artifacts: " << paths.dir << "\n";

  if (violated) return kExitInvariant;
  if (!stuck.empty()) {
    std::cerr << stuck.size() << " stuck episode(s); see run_meta.json\n";
    return kExitStuck;
  }
  return kExitOk;
}

int cmd_verify(const std::string& scenario_path) {
  fogsim::ScenarioConfig config = fogsim::load_scenario_file(scenario_path);
  // Property verification runs a shortened scenario; two minutes of
  // simulated time exercises every workflow phase.
  config.duration_s = std::min(config.duration_s, 120.0);

  fogsim::Simulation sim(config);
  sim.run();

  const auto checks = fogsim::run_property_checks(sim);
  bool ok = true;
  for (const auto& c : checks) {
    std::cout << (c.pass ? "PASS " : "FAIL ") << c.name
              << (c.detail.empty() ? "" : "  (" + c.detail + ")") << "\n";
    ok = ok && c.pass;
  }
  const auto stuck = sim.stuck_episodes();
  std::cout << (stuck.empty() ? "PASS " : "FAIL ") << "no-stuck-episodes\n";
  return ok && stuck.empty() ? kExitOk : kExitInvariant;
}

int cmd_figure_data(const std::vector<std::string>& dirs, const std::string& figure,
                    std::string out_dir) {
  if (out_dir.empty()) out_dir = dirs.front();
  for (const std::string& dir : dirs) {
    const fogsim::LoadedRun run = fogsim::load_artifacts(dir);
    const std::string suffix =
        dirs.size() > 1 ? "_" + std::filesystem::path(dir).filename().string() : "";
    const std::string path = fogsim::write_figure_data(run, figure, out_dir, suffix);
    std::cout << path << "\n";
  }
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Deterministic simulator of a blockchain-coordinated, SDN-enabled fog domain"};
  app.require_subcommand(1);

  std::string scenario_path;
  std::string out_dir = "out";
  std::uint64_t seed = 0;
  bool seed_set = false;

  CLI::App* run = app.add_subcommand("run", "run a scenario and write artifacts");
  run->add_option("scenario", scenario_path, "scenario file (JSON)")->required();
  run->add_option("--out", out_dir, "artifact output directory");
  run->add_option("--seed", seed, "override the scenario seed")->each([&](const std::string&) {
    seed_set = true;
  });

  CLI::App* verify = app.add_subcommand("verify", "run the property suite on a short run");
  verify->add_option("scenario", scenario_path, "scenario file (JSON)")->required();

  std::vector<std::string> artifact_dirs;
  std::string figure;
  std::string figure_out;
  CLI::App* fig = app.add_subcommand("figure-data", "extract plot-ready series from artifacts");
  fig->add_option("dirs", artifact_dirs, "artifact directories")->required();
  fig->add_option("--figure", figure, "f6|f7|f8a|f8b|f8c|f9|f10")->required();
  fig->add_option("--out", figure_out, "output directory (default: first artifacts dir)");

  CLI11_PARSE(app, argc, argv);

  try {
    if (run->parsed()) {
      return cmd_run(scenario_path, out_dir,
                     seed_set ? std::optional<std::uint64_t>(seed) : std::nullopt);
    }
    if (verify->parsed()) return cmd_verify(scenario_path);
    if (fig->parsed()) return cmd_figure_data(artifact_dirs, figure, figure_out);
  } catch (const fogsim::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const fogsim::IncompatibleScenario& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitConfig;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitInvariant;
  }
  return kExitOk;
}
