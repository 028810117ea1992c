#include "fogsim/contracts.hpp"

#include <algorithm>

namespace fogsim {

ContractModule module_of(const ContractCall& call) {
  struct Visitor {
    ContractModule operator()(const RegisterNodeCall&) const { return ContractModule::DeviceRegistry; }
    ContractModule operator()(const RegisterServiceCall&) const {
      return ContractModule::ContainerRegistry;
    }
    ContractModule operator()(const NewEventCall&) const { return ContractModule::EventContract; }
    ContractModule operator()(const SendReplyCall&) const { return ContractModule::EventContract; }
    ContractModule operator()(const SendVoteCall&) const { return ContractModule::EventContract; }
    ContractModule operator()(const SolveEventCall&) const { return ContractModule::EventContract; }
    ContractModule operator()(const AdjustReputationCall&) const {
      return ContractModule::Reputation;
    }
    ContractModule operator()(const RecordMetadataCall&) const { return ContractModule::InterDomain; }
  };
  return std::visit(Visitor{}, call);
}

const char* to_string(ContractModule m) {
  switch (m) {
    case ContractModule::DeviceRegistry: return "device_registry";
    case ContractModule::EventContract: return "event_contract";
    case ContractModule::ContainerRegistry: return "container_registry";
    case ContractModule::Reputation: return "reputation";
    default: return "interdomain";
  }
}

const char* to_string(LogKind k) {
  switch (k) {
    case LogKind::ServiceRegistered: return "ServiceRegistered";
    case LogKind::ContainerRegistered: return "ContainerRegistered";
    case LogKind::NewEvent: return "NewEvent";
    case LogKind::RequiredReplies: return "RequiredReplies";
    case LogKind::RequiredVotes: return "RequiredVotes";
    case LogKind::EventSolved: return "EventSolved";
    default: return "ReputationUpdated";
  }
}

const char* to_string(ContractFault f) {
  switch (f) {
    case ContractFault::UnknownContract: return "UnknownContract";
    case ContractFault::UnregisteredSender: return "UnregisteredSender";
    case ContractFault::AlreadyRegistered: return "AlreadyRegistered";
    case ContractFault::DuplicateServiceId: return "DuplicateServiceId";
    case ContractFault::DuplicateContainerId: return "DuplicateContainerId";
    case ContractFault::UnknownService: return "UnknownService";
    case ContractFault::UnknownContainer: return "UnknownContainer";
    case ContractFault::UnknownEvent: return "UnknownEvent";
    case ContractFault::UnknownNode: return "UnknownNode";
    case ContractFault::ConcurrentEventForContainer: return "ConcurrentEventForContainer";
    case ContractFault::NotCurrentHost: return "NotCurrentHost";
    case ContractFault::DuplicateReply: return "DuplicateReply";
    case ContractFault::ReplyFromCreator: return "ReplyFromCreator";
    case ContractFault::InvalidReport: return "InvalidReport";
    case ContractFault::DuplicateVote: return "DuplicateVote";
    case ContractFault::InvalidCandidate: return "InvalidCandidate";
    case ContractFault::NotElectedSolver: return "NotElectedSolver";
    default: return "WrongPhase";
  }
}

std::vector<LogPayload> Contracts::execute(NodeId sender, const ContractCall& call, SimTime now) {
  struct Visitor {
    Contracts& self;
    NodeId sender;
    SimTime now;
    std::vector<LogPayload> operator()(const RegisterNodeCall& c) {
      return self.register_node(sender, c, now);
    }
    std::vector<LogPayload> operator()(const RegisterServiceCall& c) {
      return self.register_service(sender, c);
    }
    std::vector<LogPayload> operator()(const NewEventCall& c) {
      return self.new_event(sender, c, now);
    }
    std::vector<LogPayload> operator()(const SendReplyCall& c) { return self.send_reply(sender, c); }
    std::vector<LogPayload> operator()(const SendVoteCall& c) { return self.send_vote(sender, c); }
    std::vector<LogPayload> operator()(const SolveEventCall& c) {
      return self.solve_event(sender, c, now);
    }
    std::vector<LogPayload> operator()(const AdjustReputationCall& c) {
      return self.adjust_reputation(c);
    }
    std::vector<LogPayload> operator()(const RecordMetadataCall& c) {
      return self.record_metadata(c, now);
    }
  };
  return std::visit(Visitor{*this, sender, now}, call);
}

const ServiceRecord* Contracts::service(const ServiceId& id) const {
  auto it = services_.find(id);
  return it == services_.end() ? nullptr : &it->second;
}

const ContainerRecord* Contracts::container(const ContainerId& id) const {
  auto it = containers_.find(id);
  return it == containers_.end() ? nullptr : &it->second;
}

const ClusterEvent* Contracts::event(EventId id) const {
  auto it = events_.find(id);
  return it == events_.end() ? nullptr : &it->second;
}

int Contracts::reputation(NodeId id) const {
  auto it = reputation_.find(id);
  return it == reputation_.end() ? 0 : it->second;
}

NodeId Contracts::tally_votes(const std::map<NodeId, NodeId>& votes) {
  std::map<NodeId, std::size_t> counts;
  for (const auto& [voter, candidate] : votes) counts[candidate]++;
  NodeId winner = kNoNode;
  std::size_t best = 0;
  // Ascending id order, strict improvement: ties resolve to the lowest id.
  for (const auto& [candidate, n] : counts) {
    if (n > best) {
      best = n;
      winner = candidate;
    }
  }
  return winner;
}

ClusterEvent& Contracts::event_or_throw(EventId id) {
  auto it = events_.find(id);
  if (it == events_.end()) {
    throw ContractError(ContractFault::UnknownEvent, "event " + std::to_string(id));
  }
  return it->second;
}

LogPayload Contracts::bump_reputation(NodeId node, int delta) {
  int& score = reputation_[node];
  score += delta;
  return ReputationUpdatedLog{node, delta, score};
}

std::vector<LogPayload> Contracts::register_node(NodeId sender, const RegisterNodeCall& c,
                                                 SimTime now) {
  if (nodes_.count(sender) > 0) {
    throw ContractError(ContractFault::AlreadyRegistered, to_string(sender));
  }
  nodes_[sender] = NodeRecord{sender, c.data_ip, now};
  reputation_.emplace(sender, 0);
  return {};
}

std::vector<LogPayload> Contracts::register_service(NodeId sender, const RegisterServiceCall& c) {
  if (services_.count(c.service_id) > 0) {
    throw ContractError(ContractFault::DuplicateServiceId, c.service_id);
  }
  for (const auto& spec : c.containers) {
    if (containers_.count(spec.container_id) > 0) {
      throw ContractError(ContractFault::DuplicateContainerId, spec.container_id);
    }
  }

  ServiceRecord svc;
  svc.service_id = c.service_id;
  svc.owner = sender;
  svc.endpoint = c.endpoint;
  svc.status = ServiceStatus::Registered;

  std::vector<LogPayload> logs;
  logs.push_back(ServiceRegisteredLog{c.service_id, sender, c.endpoint});
  for (const auto& spec : c.containers) {
    ContainerRecord rec;
    rec.container_id = spec.container_id;
    rec.service_id = c.service_id;
    rec.image_profile_name = spec.image_profile;
    rec.exposed_port = spec.exposed_port;
    containers_[spec.container_id] = rec;
    svc.containers.push_back(spec.container_id);
    logs.push_back(
        ContainerRegisteredLog{spec.container_id, c.service_id, spec.image_profile, spec.exposed_port});
  }
  services_[c.service_id] = std::move(svc);
  return logs;
}

std::vector<LogPayload> Contracts::new_event(NodeId sender, const NewEventCall& c, SimTime now) {
  auto cit = containers_.find(c.container_id);
  if (cit == containers_.end() || cit->second.status == ContainerStatus::Removed) {
    throw ContractError(ContractFault::UnknownContainer, c.container_id);
  }
  for (const auto& [id, ev] : events_) {
    if (ev.container_id == c.container_id && ev.phase != EventPhase::Solved) {
      throw ContractError(ContractFault::ConcurrentEventForContainer, c.container_id);
    }
  }
  ContainerRecord& rec = cit->second;
  if (c.type == EventType::Migrate) {
    // Only the node currently hosting the container can ask to move it.
    if (!rec.current_host || *rec.current_host != sender) {
      throw ContractError(ContractFault::NotCurrentHost, c.container_id);
    }
  }

  ClusterEvent ev;
  ev.event_id = next_event_id_++;
  ev.type = c.type;
  ev.container_id = c.container_id;
  ev.creator = sender;
  ev.resource_exhaustion = c.resource_exhaustion;
  ev.phase = EventPhase::Open;
  ev.previous_host = rec.current_host.value_or(kNoNode);
  ev.opened_at = now;
  const std::size_t n = nodes_.size();
  ev.required_replies = quorum_.reply_threshold.value_or(n > 0 ? n - 1 : 0);
  ev.required_votes = quorum_.vote_threshold.value_or(n);

  rec.status = c.type == EventType::Deploy ? ContainerStatus::Deploying : ContainerStatus::Migrating;

  EventId id = ev.event_id;
  events_[id] = std::move(ev);
  return {NewEventLog{id, c.type, c.container_id, sender}};
}

std::vector<LogPayload> Contracts::send_reply(NodeId sender, const SendReplyCall& c) {
  ClusterEvent& ev = event_or_throw(c.event_id);
  if (ev.phase != EventPhase::Open) {
    throw ContractError(ContractFault::WrongPhase, to_string(ev.phase));
  }
  if (sender == ev.creator) {
    throw ContractError(ContractFault::ReplyFromCreator, to_string(sender));
  }
  if (ev.replies.count(sender) > 0) {
    throw ContractError(ContractFault::DuplicateReply, to_string(sender));
  }
  const StateReport& r = c.report;
  if (r.free_cpu_fraction < 0.0 || r.free_cpu_fraction > 1.0 || r.free_mem_fraction < 0.0 ||
      r.free_mem_fraction > 1.0 || r.running_containers < 0) {
    throw ContractError(ContractFault::InvalidReport, to_string(sender));
  }

  ev.replies[sender] = r;
  if (ev.replies.size() == ev.required_replies) {
    ev.phase = EventPhase::RepliesCollected;
    return {RequiredRepliesLog{ev.event_id}};
  }
  return {};
}

std::vector<LogPayload> Contracts::send_vote(NodeId sender, const SendVoteCall& c) {
  ClusterEvent& ev = event_or_throw(c.event_id);
  if (ev.phase != EventPhase::RepliesCollected) {
    throw ContractError(ContractFault::WrongPhase, to_string(ev.phase));
  }
  if (ev.votes.count(sender) > 0) {
    throw ContractError(ContractFault::DuplicateVote, to_string(sender));
  }
  if (nodes_.count(c.candidate) == 0) {
    throw ContractError(ContractFault::InvalidCandidate, to_string(c.candidate));
  }
  if (ev.type == EventType::Migrate && c.candidate == ev.creator) {
    // A migration back onto the applicant is meaningless.
    throw ContractError(ContractFault::InvalidCandidate, to_string(c.candidate));
  }

  ev.votes[sender] = c.candidate;
  if (ev.votes.size() == ev.required_votes) {
    ev.elected_solver = tally_votes(ev.votes);
    ev.phase = EventPhase::SolverElected;
    return {RequiredVotesLog{ev.event_id, ev.elected_solver}};
  }
  return {};
}

std::vector<LogPayload> Contracts::solve_event(NodeId sender, const SolveEventCall& c, SimTime now) {
  ClusterEvent& ev = event_or_throw(c.event_id);
  if (ev.phase != EventPhase::SolverElected) {
    throw ContractError(ContractFault::WrongPhase, to_string(ev.phase));
  }
  if (sender != ev.elected_solver) {
    throw ContractError(ContractFault::NotElectedSolver, to_string(sender));
  }

  ev.phase = EventPhase::Solved;
  ev.solved_at = now;

  ContainerRecord& rec = containers_.at(ev.container_id);
  rec.desired_host = ev.elected_solver;
  rec.current_host = ev.elected_solver;
  rec.status = ContainerStatus::Running;

  ServiceRecord& svc = services_.at(rec.service_id);
  if (ev.type == EventType::Deploy) svc.status = ServiceStatus::Active;

  std::vector<LogPayload> logs;
  logs.push_back(bump_reputation(ev.elected_solver, +1));
  if (ev.type == EventType::Migrate && ev.resource_exhaustion) {
    logs.push_back(bump_reputation(ev.creator, -1));
  }
  logs.push_back(EventSolvedLog{ev.event_id, ev.type, ev.container_id, rec.service_id,
                                ev.elected_solver, ev.previous_host});
  return logs;
}

std::vector<LogPayload> Contracts::adjust_reputation(const AdjustReputationCall& c) {
  if (nodes_.count(c.node) == 0) {
    throw ContractError(ContractFault::UnknownNode, to_string(c.node));
  }
  return {bump_reputation(c.node, c.delta)};
}

std::vector<LogPayload> Contracts::record_metadata(const RecordMetadataCall& c, SimTime now) {
  interdomain_.push_back(InterDomainRecord{c.service_id, c.vip, c.port, c.host, now});
  return {};
}

}  // namespace fogsim
