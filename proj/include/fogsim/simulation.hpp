#pragma once

#include <map>
#include <memory>
#include <vector>

#include "fogsim/agent.hpp"
#include "fogsim/contracts.hpp"
#include "fogsim/ledger.hpp"
#include "fogsim/metrics.hpp"
#include "fogsim/net.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scenario.hpp"
#include "fogsim/scheduler.hpp"
#include "fogsim/sdn.hpp"
#include "fogsim/workload.hpp"

namespace fogsim {

/// One orchestration episode as observed from the log stream.
struct EpisodeRecord {
  EventId event_id{0};
  EventType type{EventType::Deploy};
  ContainerId container;
  NodeId creator;
  NodeId solver{kNoNode};
  SimTime opened_at{-1};
  SimTime replies_at{-1};
  SimTime elected_at{-1};
  SimTime solved_at{-1};
  std::map<NodeId, NodeId> votes;
  std::map<NodeId, StateReport> replies;
};

/// Builds a complete domain from a scenario config and runs it: cluster
/// registration, the deployment workflow, scripted migrations, the
/// measurement client, and trace capture.
class Simulation {
 public:
  explicit Simulation(ScenarioConfig config);

  /// Runs the scenario to duration + grace. Call once.
  void run();

  const ScenarioConfig& config() const { return config_; }
  const std::vector<RequestSample>& samples() const;
  std::uint64_t requests_issued() const;
  const Ledger& ledger() const { return ledger_; }
  const SdnController& sdn() const { return sdn_; }
  const ContainerRuntime& runtime() const { return runtime_; }
  const Network& network() const { return network_; }
  const std::map<EventId, EpisodeRecord>& episodes() const { return episodes_; }

  std::uint64_t migrations_solved() const;
  std::uint64_t deploys_solved() const;
  std::vector<EventId> stuck_episodes() const;
  SimTime liveness_bound() const;
  SummaryStats summary() const;

 private:
  void track_log(const ContractLog& log);
  void schedule_migration_trigger(std::uint64_t index);
  RegisterServiceCall service_spec() const;

  ScenarioConfig config_;
  Scheduler sched_;
  Rng rng_;
  Contracts contracts_;
  Ledger ledger_;
  SdnController sdn_;
  ControlLink control_;
  ContainerRuntime runtime_;
  Network network_;
  std::map<std::string, ImageProfile> profiles_;
  std::vector<std::unique_ptr<NodeAgent>> agents_;
  std::unique_ptr<RequestGenerator> generator_;
  std::map<EventId, EpisodeRecord> episodes_;
  std::uint64_t migrations_triggered_{0};
  bool ran_{false};
};

}  // namespace fogsim
