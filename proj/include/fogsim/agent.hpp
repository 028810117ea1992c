#pragma once

#include <map>
#include <optional>
#include <string>

#include "fogsim/contracts.hpp"
#include "fogsim/ledger.hpp"
#include "fogsim/net.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scheduler.hpp"
#include "fogsim/sdn.hpp"

namespace fogsim {

struct AgentConfig {
  NodeId node_id;
  std::string data_ip;
  bool health_gating{true};  // H: register the backend at Healthy rather than at Running
  SimTime stop_drain{from_ms(100)};  // removal -> stop gap, lets in-flight responses drain
  double base_free_cpu{1.0};
  double base_free_mem{1.0};
  double cpu_per_container{0.1};
  double mem_per_container{0.1};
  int problem_max_containers{0};  // >0 arms the threshold migration trigger
  SimTime problem_check_interval{from_ms(1000)};
  bool owner_may_solve{true};  // a Deploy owner may vote for itself
};

/// The software client running on every fog node: reacts to contract logs,
/// plays the owner/applicant/voter/solver roles of the orchestration
/// workflow, and drives the local container runtime and the virtual-services
/// interface. Agents never talk to each other directly; everything flows
/// through ledger logs, the control link, or the data network.
class NodeAgent {
 public:
  NodeAgent(Scheduler& sched, Ledger& ledger, ControlLink& control, ContainerRuntime& runtime,
            Network& network, const std::map<std::string, ImageProfile>& profiles,
            AgentConfig config);

  /// Submits the device-registry registration transaction.
  void register_node();

  /// Subscribes to ledger logs and arms the problem monitor, if configured.
  void start();

  /// Owner role: registers service metadata; the rest of the workflow runs
  /// off the resulting logs.
  void deploy_service(const RegisterServiceCall& spec);

  /// Applicant role: opens a Migrate event for a container hosted here.
  /// Returns false if suppressed (not the host, or an episode is already
  /// open for the container).
  bool trigger_migration(const ContainerId& container, bool resource_exhaustion);

  /// Health check notification for a container on this host.
  void on_container_healthy(const ContainerInstance& instance);

  /// Monitor snapshot of this node's state.
  StateReport snapshot() const;

  NodeId id() const { return config_.node_id; }
  const AgentConfig& config() const { return config_; }

 private:
  void on_log(const ContractLog& log);
  void handle_service_registered(const ServiceRegisteredLog& log);
  void handle_container_registered(const ContainerRegisteredLog& log);
  void handle_new_event(const NewEventLog& log);
  void handle_required_replies(const RequiredRepliesLog& log);
  void handle_elected(const RequiredVotesLog& log);
  void handle_event_solved(const EventSolvedLog& log);
  void solver_continue(EventId event_id, ContainerId container_id);
  void check_problems();
  NodeId choose_candidate(const ClusterEvent& ev) const;
  const ImageProfile& profile_or_default(const std::string& name) const;

  Scheduler& sched_;
  Ledger& ledger_;
  ControlLink& control_;
  ContainerRuntime& runtime_;
  Network& network_;
  const std::map<std::string, ImageProfile>& profiles_;
  AgentConfig config_;
  std::map<ContainerId, EventId> awaiting_healthy_;
  bool started_{false};
};

}  // namespace fogsim
