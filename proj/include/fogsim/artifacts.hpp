#pragma once

#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/analysis.hpp"
#include "fogsim/simulation.hpp"

#include "json.hpp"

namespace fogsim {

class IncompatibleScenario : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct RunPaths {
  std::string dir;
  std::string meta;          // run_meta.json
  std::string samples;       // samples.csv
  std::string summary;       // summary.json
  std::string ledger_trace;  // ledger_trace.jsonl
  std::string flow_trace;    // flow_trace.jsonl
  std::string episodes;      // episodes.jsonl
};

RunPaths artifact_paths(const std::string& out_dir);

/// Writes the complete artifact set for a finished run. All files are
/// self-describing: schema version plus the config hash and seed.
RunPaths write_artifacts(const Simulation& sim, const std::string& out_dir);

/// Artifacts reloaded from disk, as needed by figure extraction.
struct LoadedRun {
  nlohmann::json meta;
  nlohmann::json summary;
  struct Row {
    double sent_ms{0};
    double connect_ms{0};
    double latency_ms{0};
    bool success{false};
    std::string backend;
    std::string tuple;
  };
  std::vector<Row> samples;
};

LoadedRun load_artifacts(const std::string& dir);

/// Emits one plot-ready series for the requested figure into
/// `<out_dir>/<figure><suffix>.csv`. Throws IncompatibleScenario when the
/// run's kind does not produce that figure or the run is empty.
std::string write_figure_data(const LoadedRun& run, const std::string& figure,
                              const std::string& out_dir, const std::string& suffix = "");

}  // namespace fogsim
