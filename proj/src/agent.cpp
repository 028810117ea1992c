#include "fogsim/agent.hpp"

#include <algorithm>

namespace fogsim {

NodeAgent::NodeAgent(Scheduler& sched, Ledger& ledger, ControlLink& control,
                     ContainerRuntime& runtime, Network& network,
                     const std::map<std::string, ImageProfile>& profiles, AgentConfig config)
    : sched_(sched),
      ledger_(ledger),
      control_(control),
      runtime_(runtime),
      network_(network),
      profiles_(profiles),
      config_(std::move(config)) {}

void NodeAgent::register_node() {
  ledger_.submit(config_.node_id, RegisterNodeCall{config_.data_ip});
}

void NodeAgent::start() {
  if (started_) return;
  started_ = true;
  ledger_.subscribe([this](const ContractLog& log) { on_log(log); });
  if (config_.problem_max_containers > 0) {
    sched_.schedule_in(config_.problem_check_interval, [this] { check_problems(); });
  }
}

void NodeAgent::deploy_service(const RegisterServiceCall& spec) {
  ledger_.submit(config_.node_id, spec);
}

StateReport NodeAgent::snapshot() const {
  const int running = runtime_.running_on(config_.node_id);
  auto clamp01 = [](double v) { return v < 0.0 ? 0.0 : (v > 1.0 ? 1.0 : v); };
  StateReport report;
  report.node_id = config_.node_id;
  report.free_cpu_fraction = clamp01(config_.base_free_cpu - config_.cpu_per_container * running);
  report.free_mem_fraction = clamp01(config_.base_free_mem - config_.mem_per_container * running);
  report.running_containers = running;
  return report;
}

void NodeAgent::on_log(const ContractLog& log) {
  struct Visitor {
    NodeAgent& self;
    void operator()(const ServiceRegisteredLog& l) { self.handle_service_registered(l); }
    void operator()(const ContainerRegisteredLog& l) { self.handle_container_registered(l); }
    void operator()(const NewEventLog& l) { self.handle_new_event(l); }
    void operator()(const RequiredRepliesLog& l) { self.handle_required_replies(l); }
    void operator()(const RequiredVotesLog& l) { self.handle_elected(l); }
    void operator()(const EventSolvedLog& l) { self.handle_event_solved(l); }
    void operator()(const ReputationUpdatedLog&) {}
  };
  std::visit(Visitor{*this}, log.payload);
}

void NodeAgent::handle_service_registered(const ServiceRegisteredLog& log) {
  if (log.owner != config_.node_id) return;
  // Owner links the containerized service to a fresh virtual service.
  control_.register_virtual_service(log.endpoint.vip, log.endpoint.port, log.endpoint.proto);
}

void NodeAgent::handle_container_registered(const ContainerRegisteredLog& log) {
  const ServiceRecord* svc = ledger_.contracts().service(log.service_id);
  if (svc == nullptr || svc->owner != config_.node_id) return;
  ledger_.submit(config_.node_id, NewEventCall{EventType::Deploy, log.container_id, false});
}

void NodeAgent::handle_new_event(const NewEventLog& log) {
  if (log.creator == config_.node_id) return;  // the creator supplies the event, not a reply
  ledger_.submit(config_.node_id, SendReplyCall{log.event_id, snapshot()});
}

NodeId NodeAgent::choose_candidate(const ClusterEvent& ev) const {
  // Free-capacity argmax over the reported states plus self-knowledge,
  // excluding the Migrate applicant. Ties go to the lowest node id.
  std::map<NodeId, double> scores;
  for (const auto& [node, report] : ev.replies) {
    scores[node] = report.free_cpu_fraction + report.free_mem_fraction;
  }
  const bool self_is_applicant = ev.type == EventType::Migrate && ev.creator == config_.node_id;
  const bool self_excluded_owner =
      ev.type == EventType::Deploy && ev.creator == config_.node_id && !config_.owner_may_solve;
  if (!self_is_applicant && !self_excluded_owner && scores.count(config_.node_id) == 0) {
    const StateReport self = snapshot();
    scores[config_.node_id] = self.free_cpu_fraction + self.free_mem_fraction;
  }
  if (ev.type == EventType::Migrate) scores.erase(ev.creator);

  NodeId best = kNoNode;
  double best_score = -1.0;
  for (const auto& [node, score] : scores) {
    if (score > best_score) {
      best_score = score;
      best = node;
    }
  }
  return best;
}

void NodeAgent::handle_required_replies(const RequiredRepliesLog& log) {
  const ClusterEvent* ev = ledger_.contracts().event(log.event_id);
  if (ev == nullptr) return;
  const NodeId candidate = choose_candidate(*ev);
  if (candidate == kNoNode) return;
  ledger_.submit(config_.node_id, SendVoteCall{log.event_id, candidate});
}

void NodeAgent::handle_elected(const RequiredVotesLog& log) {
  if (log.elected_solver != config_.node_id) return;
  const ClusterEvent* ev = ledger_.contracts().event(log.event_id);
  if (ev == nullptr) return;
  const ContainerRecord* rec = ledger_.contracts().container(ev->container_id);
  if (rec == nullptr) return;

  runtime_.create(config_.node_id, rec->container_id, profile_or_default(rec->image_profile_name));
  network_.bind_endpoint(config_.data_ip, rec->exposed_port, config_.node_id, rec->container_id);

  if (config_.health_gating) {
    awaiting_healthy_[rec->container_id] = log.event_id;
  } else {
    solver_continue(log.event_id, rec->container_id);
  }
}

void NodeAgent::on_container_healthy(const ContainerInstance& instance) {
  auto it = awaiting_healthy_.find(instance.container_id);
  if (it == awaiting_healthy_.end()) return;
  const EventId event_id = it->second;
  awaiting_healthy_.erase(it);
  solver_continue(event_id, instance.container_id);
}

void NodeAgent::solver_continue(EventId event_id, ContainerId container_id) {
  const ContainerRecord* rec = ledger_.contracts().container(container_id);
  const ServiceRecord* svc = rec ? ledger_.contracts().service(rec->service_id) : nullptr;
  if (svc == nullptr) return;
  const VirtualEndpoint endpoint = svc->endpoint;
  const std::uint16_t exposed_port = rec->exposed_port;

  BackendEndpoint backend{config_.data_ip, exposed_port, true};
  control_.upsert_backend(endpoint.vip, endpoint.port, endpoint.proto, backend,
                          [this, event_id, endpoint](const VirtualService& vs) {
                            if (!vs.active) {
                              control_.set_active(endpoint.vip, endpoint.port, endpoint.proto, true,
                                                  [this, event_id](const VirtualService&) {
                                                    ledger_.submit(config_.node_id,
                                                                   SolveEventCall{event_id});
                                                  });
                            } else {
                              ledger_.submit(config_.node_id, SolveEventCall{event_id});
                            }
                          });
}

void NodeAgent::handle_event_solved(const EventSolvedLog& log) {
  const ServiceRecord* svc = ledger_.contracts().service(log.service_id);
  if (svc == nullptr) return;

  if (log.type == EventType::Migrate && log.previous_host == config_.node_id) {
    // Applicant cleanup: stop steering traffic at the old instance first,
    // release it afterwards. The drain gap lets in-flight responses finish.
    const VirtualEndpoint endpoint = svc->endpoint;
    const ContainerId container = log.container_id;
    const ContainerRecord* rec = ledger_.contracts().container(container);
    const std::uint16_t exposed_port = rec ? rec->exposed_port : 0;

    auto stop_old = [this, container, exposed_port] {
      sched_.schedule_in(config_.stop_drain, [this, container, exposed_port] {
        runtime_.stop(container, config_.node_id);
        network_.unbind_endpoint(config_.data_ip, exposed_port);
      });
    };
    // The backend entry is shared by every container of the service hosted
    // here; it leaves the virtual service only when the last one leaves.
    bool still_hosts_service = false;
    for (const ContainerId& sibling : svc->containers) {
      if (sibling == container) continue;
      const ContainerRecord* sib = ledger_.contracts().container(sibling);
      if (sib && sib->current_host && *sib->current_host == config_.node_id) {
        still_hosts_service = true;
        break;
      }
    }
    if (still_hosts_service) {
      stop_old();
    } else {
      control_.remove_backend(endpoint.vip, endpoint.port, endpoint.proto, config_.data_ip,
                              [stop_old](const VirtualService&) { stop_old(); });
    }
  }

  const ClusterEvent* ev = ledger_.contracts().event(log.event_id);
  if (ev != nullptr && ev->creator == config_.node_id) {
    // Event creator shares the publicly exposed endpoint with the
    // inter-domain registry.
    ledger_.submit(config_.node_id, RecordMetadataCall{log.service_id, svc->endpoint.vip,
                                                       svc->endpoint.port, log.solver});
  }
}

bool NodeAgent::trigger_migration(const ContainerId& container, bool resource_exhaustion) {
  const ContainerRecord* rec = ledger_.contracts().container(container);
  if (rec == nullptr || !rec->current_host || *rec->current_host != config_.node_id) return false;
  for (const auto& [id, ev] : ledger_.contracts().events()) {
    if (ev.container_id == container && ev.phase != EventPhase::Solved) return false;
  }
  ledger_.submit(config_.node_id, NewEventCall{EventType::Migrate, container, resource_exhaustion});
  return true;
}

void NodeAgent::check_problems() {
  if (runtime_.running_on(config_.node_id) > config_.problem_max_containers) {
    // Migrate the most demanding hosted container (largest startup cost).
    const ContainerRecord* pick = nullptr;
    SimTime pick_startup = -1;
    for (const auto& [id, rec] : ledger_.contracts().containers()) {
      if (!rec.current_host || *rec.current_host != config_.node_id) continue;
      if (rec.status != ContainerStatus::Running) continue;
      const SimTime startup = profile_or_default(rec.image_profile_name).startup_time;
      if (startup > pick_startup) {
        pick_startup = startup;
        pick = &rec;
      }
    }
    if (pick != nullptr) trigger_migration(pick->container_id, true);
  }
  sched_.schedule_in(config_.problem_check_interval, [this] { check_problems(); });
}

const ImageProfile& NodeAgent::profile_or_default(const std::string& name) const {
  auto it = profiles_.find(name);
  if (it != profiles_.end()) return it->second;
  static const ImageProfile fallback{"default", 0, 0, ConnectionMode::PerRequest};
  return fallback;
}

}  // namespace fogsim
