#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <fstream>
#include <sstream>

#include "fogsim/artifacts.hpp"

using namespace fogsim;
namespace fs = std::filesystem;

namespace {

std::string slurp(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  REQUIRE(in);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

ScenarioConfig deploy_config() {
  ScenarioConfig c;
  c.kind = "deploy";
  c.duration_s = 20.0;
  c.health_gating = true;
  c.request_interval_s = 2.0;
  c.workload_start_s = 8.0;
  return c;
}

ScenarioConfig migrate_config() {
  ScenarioConfig c = deploy_config();
  c.kind = "migrate";
  c.duration_s = 30.0;
  c.request_interval_s = 1.0;
  c.migration_start_s = 12.0;
  c.migration_period_s = 12.0;
  c.migration_count = 1;
  return c;
}

}  // namespace

TEST_CASE("artifact files are written and reload consistently") {
  const std::string dir = "artifacts_test/run1";
  fs::remove_all("artifacts_test");

  Simulation sim(deploy_config());
  sim.run();
  const RunPaths paths = write_artifacts(sim, dir);

  for (const std::string& p : {paths.meta, paths.samples, paths.summary, paths.ledger_trace,
                               paths.flow_trace, paths.episodes}) {
    CHECK(fs::exists(p));
  }

  const LoadedRun run = load_artifacts(dir);
  CHECK(run.samples.size() == sim.samples().size());
  CHECK(run.meta.at("kind") == "deploy");
  CHECK(run.meta.at("config_hash") == config_hash(sim.config()));
  CHECK(run.meta.at("config").at("ledger").at("block_interval_ms") == 1000.0);
  CHECK(run.summary.at("requests").at("total") == sim.samples().size());

  // Sample lines carry millisecond values quantized from integer microseconds.
  CHECK(run.samples.front().connect_ms == 10.0);
  CHECK(run.samples.front().latency_ms == 22.0);
}

TEST_CASE("same config and seed give byte-identical artifacts") {
  fs::remove_all("artifacts_det");
  Simulation a(migrate_config());
  a.run();
  Simulation b(migrate_config());
  b.run();
  const RunPaths pa = write_artifacts(a, "artifacts_det/a");
  const RunPaths pb = write_artifacts(b, "artifacts_det/b");

  CHECK(slurp(pa.samples) == slurp(pb.samples));
  CHECK(slurp(pa.summary) == slurp(pb.summary));
  CHECK(slurp(pa.ledger_trace) == slurp(pb.ledger_trace));
  CHECK(slurp(pa.flow_trace) == slurp(pb.flow_trace));
  CHECK(slurp(pa.episodes) == slurp(pb.episodes));
  CHECK(slurp(pa.meta) == slurp(pb.meta));
}

TEST_CASE("a different seed still runs identically when nothing draws randomness") {
  // Jitter is off by default, so the seed only enters the metadata.
  ScenarioConfig c = deploy_config();
  Simulation a(c);
  a.run();
  c.seed = 99;
  Simulation b(c);
  b.run();
  CHECK(a.samples().size() == b.samples().size());
  CHECK(config_hash(a.config()) != config_hash(b.config()));
}

TEST_CASE("figure data: deployment series and latency percentage curve") {
  fs::remove_all("artifacts_fig");
  Simulation sim(deploy_config());
  sim.run();
  write_artifacts(sim, "artifacts_fig/deploy");
  const LoadedRun run = load_artifacts("artifacts_fig/deploy");

  const std::string f6 = write_figure_data(run, "f6", "artifacts_fig/out");
  const std::string body = slurp(f6);
  CHECK(body.rfind("request,sent_at_s,connect_ms,latency_ms,outcome", 0) == 0);

  const std::string f7 = write_figure_data(run, "f7", "artifacts_fig/out");
  CHECK(slurp(f7).find("percent_of_requests_below") != std::string::npos);

  // Wrong scenario kind for a migration figure.
  CHECK_THROWS_AS(write_figure_data(run, "f8c", "artifacts_fig/out"), IncompatibleScenario);
  CHECK_THROWS_AS(write_figure_data(run, "f9", "artifacts_fig/out"), IncompatibleScenario);
  CHECK_THROWS_AS(write_figure_data(run, "f99", "artifacts_fig/out"), IncompatibleScenario);
}

TEST_CASE("figure data: migration and soak series") {
  fs::remove_all("artifacts_fig2");
  Simulation mig(migrate_config());
  mig.run();
  write_artifacts(mig, "artifacts_fig2/mig");
  const LoadedRun mrun = load_artifacts("artifacts_fig2/mig");
  CHECK_NOTHROW(write_figure_data(mrun, "f8c", "artifacts_fig2/out"));
  CHECK_NOTHROW(write_figure_data(mrun, "f10", "artifacts_fig2/out"));

  ScenarioConfig soak = migrate_config();
  soak.kind = "availability_soak";
  soak.duration_s = 120.0;
  soak.migration_start_s = 40.0;
  soak.migration_period_s = 40.0;
  soak.migration_count = 0;
  Simulation s(soak);
  s.run();
  write_artifacts(s, "artifacts_fig2/soak");
  const LoadedRun srun = load_artifacts("artifacts_fig2/soak");
  const std::string f9 = write_figure_data(srun, "f9", "artifacts_fig2/out");
  CHECK(slurp(f9).rfind("day,availability_percent", 0) == 0);
}

TEST_CASE("an empty run yields no figure data") {
  ScenarioConfig c = deploy_config();
  c.workload_start_s = 30.0;  // no request ever issued
  Simulation sim(c);
  sim.run();
  fs::remove_all("artifacts_empty");
  write_artifacts(sim, "artifacts_empty/run");
  const LoadedRun run = load_artifacts("artifacts_empty/run");
  CHECK(run.samples.empty());
  CHECK_THROWS_AS(write_figure_data(run, "f6", "artifacts_empty/out"), IncompatibleScenario);
}
