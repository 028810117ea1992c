#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

// ---------------------------------------------------------------------------
// Domain state kept by the five contract modules: device registry, event
// contract (the orchestration choreographer), container registry, reputation
// counters, and the passive inter-domain record sink. All state transitions
// happen inside block execution, sequentially, so none of this is locked.
// ---------------------------------------------------------------------------

enum class EventType : std::uint8_t { Deploy, Migrate };
enum class EventPhase : std::uint8_t { Open, RepliesCollected, SolverElected, Solved };
enum class ServiceStatus : std::uint8_t { Registered, Active, Inactive, Deleted };
enum class ContainerStatus : std::uint8_t { Registered, Deploying, Running, Migrating, Removed };

inline const char* to_string(EventType t) { return t == EventType::Deploy ? "Deploy" : "Migrate"; }
inline const char* to_string(EventPhase p) {
  switch (p) {
    case EventPhase::Open: return "Open";
    case EventPhase::RepliesCollected: return "RepliesCollected";
    case EventPhase::SolverElected: return "SolverElected";
    default: return "Solved";
  }
}

struct NodeRecord {
  NodeId node_id;
  std::string data_ip;
  SimTime registered_at{0};
};

struct VirtualEndpoint {
  std::string vip;
  std::uint16_t port{0};
  Proto proto{Proto::TCP};

  auto operator<=>(const VirtualEndpoint&) const = default;
};

struct ContainerSpec {
  ContainerId container_id;
  std::string image_profile;
  std::uint16_t exposed_port{0};
};

struct ServiceRecord {
  ServiceId service_id;
  NodeId owner;
  std::vector<ContainerId> containers;
  VirtualEndpoint endpoint;
  ServiceStatus status{ServiceStatus::Registered};
};

struct ContainerRecord {
  ContainerId container_id;
  ServiceId service_id;
  std::string image_profile_name;
  std::uint16_t exposed_port{0};
  std::optional<NodeId> desired_host;
  std::optional<NodeId> current_host;
  ContainerStatus status{ContainerStatus::Registered};
};

/// Snapshot of a node's local state, sent as an event reply.
struct StateReport {
  NodeId node_id;
  double free_cpu_fraction{1.0};
  double free_mem_fraction{1.0};
  int running_containers{0};
};

struct ClusterEvent {
  EventId event_id{0};
  EventType type{EventType::Deploy};
  ContainerId container_id;
  NodeId creator;  // owner (Deploy) or applicant (Migrate)
  bool resource_exhaustion{false};
  EventPhase phase{EventPhase::Open};
  std::map<NodeId, StateReport> replies;
  std::map<NodeId, NodeId> votes;  // voter -> candidate
  NodeId elected_solver{kNoNode};
  NodeId previous_host{kNoNode};  // host at event open (Migrate cleanup target)
  std::size_t required_replies{0};
  std::size_t required_votes{0};
  SimTime opened_at{0};
  SimTime solved_at{0};
};

struct InterDomainRecord {
  ServiceId service_id;
  std::string vip;
  std::uint16_t port{0};
  NodeId host;
  SimTime recorded_at{0};
};

// ---------------------------------------------------------------------------
// Contract calls: the transaction payloads the ledger executes.
// ---------------------------------------------------------------------------

struct RegisterNodeCall {
  std::string data_ip;
};
struct RegisterServiceCall {
  ServiceId service_id;
  VirtualEndpoint endpoint;
  std::vector<ContainerSpec> containers;
};
struct NewEventCall {
  EventType type{EventType::Deploy};
  ContainerId container_id;
  bool resource_exhaustion{false};
};
struct SendReplyCall {
  EventId event_id{0};
  StateReport report;
};
struct SendVoteCall {
  EventId event_id{0};
  NodeId candidate;
};
struct SolveEventCall {
  EventId event_id{0};
};
struct AdjustReputationCall {
  NodeId node;
  int delta{0};
};
struct RecordMetadataCall {
  ServiceId service_id;
  std::string vip;
  std::uint16_t port{0};
  NodeId host;
};

using ContractCall =
    std::variant<RegisterNodeCall, RegisterServiceCall, NewEventCall, SendReplyCall, SendVoteCall,
                 SolveEventCall, AdjustReputationCall, RecordMetadataCall>;

enum class ContractModule : std::uint8_t {
  DeviceRegistry,
  EventContract,
  ContainerRegistry,
  Reputation,
  InterDomain
};

/// Maps a call to the module that executes it.
ContractModule module_of(const ContractCall& call);
const char* to_string(ContractModule m);

// ---------------------------------------------------------------------------
// Asynchronous logs emitted by contract execution.
// ---------------------------------------------------------------------------

struct ServiceRegisteredLog {
  ServiceId service_id;
  NodeId owner;
  VirtualEndpoint endpoint;
};
struct ContainerRegisteredLog {
  ContainerId container_id;
  ServiceId service_id;
  std::string image_profile;
  std::uint16_t exposed_port{0};
};
struct NewEventLog {
  EventId event_id{0};
  EventType type{EventType::Deploy};
  ContainerId container_id;
  NodeId creator;
};
struct RequiredRepliesLog {
  EventId event_id{0};
};
struct RequiredVotesLog {
  EventId event_id{0};
  NodeId elected_solver;
};
struct EventSolvedLog {
  EventId event_id{0};
  EventType type{EventType::Deploy};
  ContainerId container_id;
  ServiceId service_id;
  NodeId solver;
  NodeId previous_host;
};
struct ReputationUpdatedLog {
  NodeId node;
  int delta{0};
  int score{0};
};

using LogPayload = std::variant<ServiceRegisteredLog, ContainerRegisteredLog, NewEventLog,
                                RequiredRepliesLog, RequiredVotesLog, EventSolvedLog,
                                ReputationUpdatedLog>;

enum class LogKind : std::uint8_t {
  ServiceRegistered,
  ContainerRegistered,
  NewEvent,
  RequiredReplies,
  RequiredVotes,
  EventSolved,
  ReputationUpdated
};

inline LogKind kind_of(const LogPayload& p) { return static_cast<LogKind>(p.index()); }
const char* to_string(LogKind k);

// ---------------------------------------------------------------------------
// Errors. A ContractError raised during block execution rejects the
// transaction (recorded, dropped); it never aborts the block.
// ---------------------------------------------------------------------------

enum class ContractFault : std::uint8_t {
  UnknownContract,
  UnregisteredSender,
  AlreadyRegistered,
  DuplicateServiceId,
  DuplicateContainerId,
  UnknownService,
  UnknownContainer,
  UnknownEvent,
  UnknownNode,
  ConcurrentEventForContainer,
  NotCurrentHost,
  DuplicateReply,
  ReplyFromCreator,
  InvalidReport,
  DuplicateVote,
  InvalidCandidate,
  NotElectedSolver,
  WrongPhase
};

const char* to_string(ContractFault f);

class ContractError : public std::runtime_error {
 public:
  ContractError(ContractFault fault, const std::string& detail)
      : std::runtime_error(std::string(to_string(fault)) + ": " + detail), fault_(fault) {}
  ContractFault fault() const { return fault_; }

 private:
  ContractFault fault_;
};

/// Quorum sizes. Unset thresholds default to N-1 replies (every node except
/// the event creator) and N votes (every node, creator included).
struct QuorumConfig {
  std::optional<std::size_t> reply_threshold;
  std::optional<std::size_t> vote_threshold;
};

/// The contract suite. One instance per simulated domain; executed only by
/// the ledger, queried read-only by agents (each fog node holds a full copy
/// of the chain state, so reads are local and free).
class Contracts {
 public:
  explicit Contracts(QuorumConfig quorum = {}) : quorum_(quorum) {}

  /// Executes one call and returns the logs it emits, in emission order.
  /// Throws ContractError to reject. Sender-registration checks for non-DDR
  /// calls happen at submission, in the ledger.
  std::vector<LogPayload> execute(NodeId sender, const ContractCall& call, SimTime now);

  // Device registry.
  bool node_registered(NodeId id) const { return nodes_.count(id) > 0; }
  std::size_t node_count() const { return nodes_.size(); }
  const std::map<NodeId, NodeRecord>& nodes() const { return nodes_; }

  // Container registry.
  const ServiceRecord* service(const ServiceId& id) const;
  const ContainerRecord* container(const ContainerId& id) const;
  const std::map<ServiceId, ServiceRecord>& services() const { return services_; }
  const std::map<ContainerId, ContainerRecord>& containers() const { return containers_; }

  // Event contract.
  const ClusterEvent* event(EventId id) const;
  const std::map<EventId, ClusterEvent>& events() const { return events_; }

  // Reputation.
  int reputation(NodeId id) const;

  // Inter-domain records (append-only).
  const std::vector<InterDomainRecord>& interdomain_records() const { return interdomain_; }

  /// Election tally: plurality of votes, ties broken by lowest node id.
  static NodeId tally_votes(const std::map<NodeId, NodeId>& votes);

 private:
  std::vector<LogPayload> register_node(NodeId sender, const RegisterNodeCall& c, SimTime now);
  std::vector<LogPayload> register_service(NodeId sender, const RegisterServiceCall& c);
  std::vector<LogPayload> new_event(NodeId sender, const NewEventCall& c, SimTime now);
  std::vector<LogPayload> send_reply(NodeId sender, const SendReplyCall& c);
  std::vector<LogPayload> send_vote(NodeId sender, const SendVoteCall& c);
  std::vector<LogPayload> solve_event(NodeId sender, const SolveEventCall& c, SimTime now);
  std::vector<LogPayload> adjust_reputation(const AdjustReputationCall& c);
  std::vector<LogPayload> record_metadata(const RecordMetadataCall& c, SimTime now);

  ClusterEvent& event_or_throw(EventId id);
  LogPayload bump_reputation(NodeId node, int delta);

  QuorumConfig quorum_;
  std::map<NodeId, NodeRecord> nodes_;
  std::map<ServiceId, ServiceRecord> services_;
  std::map<ContainerId, ContainerRecord> containers_;
  std::map<EventId, ClusterEvent> events_;
  std::map<NodeId, int> reputation_;
  std::vector<InterDomainRecord> interdomain_;
  EventId next_event_id_{1};
};

}  // namespace fogsim
