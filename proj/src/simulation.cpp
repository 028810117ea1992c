#include "fogsim/simulation.hpp"

#include <algorithm>

namespace fogsim {

namespace {

SimTime ms_to_time(double ms) { return static_cast<SimTime>(ms * kMillisecond); }

QuorumConfig quorum_from(const ScenarioConfig& c) {
  return QuorumConfig{c.reply_threshold, c.vote_threshold};
}

LedgerConfig ledger_from(const ScenarioConfig& c) {
  return LedgerConfig{ms_to_time(c.block_interval_ms), ms_to_time(c.log_delay_ms)};
}

SdnConfig sdn_from(const ScenarioConfig& c) {
  SdnConfig s;
  s.packet_in_latency = ms_to_time(c.packet_in_ms);
  s.rule_install_latency = ms_to_time(c.rule_install_ms);
  s.health_filter = c.health_filter;
  s.rule_idle_timeout = ms_to_time(c.rule_idle_timeout_ms);
  s.atomic_cutover = c.migration_cutover == "atomic";
  return s;
}

HealthCheckConfig health_from(const ScenarioConfig& c) {
  return HealthCheckConfig{ms_to_time(c.probe_interval_ms), ms_to_time(c.probe_timeout_ms),
                           c.passes_required};
}

NetConfig net_from(const ScenarioConfig& c) {
  NetConfig n;
  n.data_delay = ms_to_time(c.data_ms);
  n.syn_timeout = ms_to_time(c.syn_timeout_ms);
  n.max_retries = c.max_retries;
  n.response_timeout = ms_to_time(c.response_timeout_ms);
  return n;
}

}  // namespace

Simulation::Simulation(ScenarioConfig config)
    : config_((validate_scenario(config), std::move(config))),
      rng_(config_.seed),
      contracts_(quorum_from(config_)),
      ledger_(sched_, contracts_, ledger_from(config_)),
      sdn_(sched_, sdn_from(config_)),
      control_(sched_, sdn_,
               LinkModel("control_link", ms_to_time(config_.control_link_ms),
                         ms_to_time(config_.jitter_ms), &rng_)),
      runtime_(sched_, health_from(config_)),
      network_(sched_, sdn_, runtime_, net_from(config_)),
      profiles_(config_.profiles) {
  // Episode tracker subscribes first so its records never lag agent actions.
  ledger_.subscribe([this](const ContractLog& log) { track_log(log); });

  for (int i = 1; i <= config_.nodes; ++i) {
    AgentConfig ac;
    ac.node_id = NodeId{static_cast<std::uint32_t>(i)};
    ac.data_ip = config_.node_ip(i);
    ac.health_gating = config_.health_gating;
    ac.stop_drain = ms_to_time(config_.stop_drain_ms);
    ac.base_free_cpu = config_.base_free_cpu;
    ac.base_free_mem = config_.base_free_mem;
    ac.cpu_per_container = config_.cpu_per_container;
    ac.mem_per_container = config_.mem_per_container;
    ac.problem_max_containers = config_.problem_max_containers;
    ac.owner_may_solve = config_.owner_may_solve;
    agents_.push_back(std::make_unique<NodeAgent>(sched_, ledger_, control_, runtime_, network_,
                                                  profiles_, ac));
  }

  runtime_.on_healthy([this](const ContainerInstance& inst) {
    const std::size_t idx = inst.host.value - 1;
    if (idx < agents_.size()) agents_[idx]->on_container_healthy(inst);
  });

  const ImageProfile& profile = profiles_.at(config_.profile_name);
  WorkloadConfig wc;
  wc.client_ip = config_.client_ip;
  wc.vip = config_.vip;
  wc.port = config_.service_port;
  wc.proto = config_.proto == "UDP" ? Proto::UDP : Proto::TCP;
  wc.mode = profile.connection_mode;
  wc.start_at = from_seconds(config_.workload_start_s);
  wc.request_interval = from_seconds(config_.request_interval_s);
  wc.duration = config_.duration() - wc.start_at;
  wc.reconnect_backoff = ms_to_time(config_.reconnect_backoff_ms);
  generator_ = std::make_unique<RequestGenerator>(sched_, network_, wc);
}

RegisterServiceCall Simulation::service_spec() const {
  RegisterServiceCall spec;
  spec.service_id = config_.service_id;
  spec.endpoint.vip = config_.vip;
  spec.endpoint.port = config_.service_port;
  spec.endpoint.proto = config_.proto == "UDP" ? Proto::UDP : Proto::TCP;
  for (int i = 0; i < config_.containers; ++i) {
    ContainerSpec cs;
    cs.container_id = config_.service_id + "-" + std::to_string(i);
    cs.image_profile = config_.profile_name;
    cs.exposed_port = static_cast<std::uint16_t>(config_.container_port + i);
    spec.containers.push_back(cs);
  }
  return spec;
}

void Simulation::track_log(const ContractLog& log) {
  struct Visitor {
    Simulation& self;
    const ContractLog& log;
    void operator()(const NewEventLog& l) {
      EpisodeRecord rec;
      rec.event_id = l.event_id;
      rec.type = l.type;
      rec.container = l.container_id;
      rec.creator = l.creator;
      rec.opened_at = log.emitted_at;
      self.episodes_[l.event_id] = rec;
    }
    void operator()(const RequiredRepliesLog& l) {
      auto it = self.episodes_.find(l.event_id);
      if (it == self.episodes_.end()) return;
      it->second.replies_at = log.emitted_at;
      if (const ClusterEvent* ev = self.contracts_.event(l.event_id)) {
        it->second.replies = ev->replies;
      }
    }
    void operator()(const RequiredVotesLog& l) {
      auto it = self.episodes_.find(l.event_id);
      if (it == self.episodes_.end()) return;
      it->second.elected_at = log.emitted_at;
      it->second.solver = l.elected_solver;
      if (const ClusterEvent* ev = self.contracts_.event(l.event_id)) {
        it->second.votes = ev->votes;
      }
    }
    void operator()(const EventSolvedLog& l) {
      auto it = self.episodes_.find(l.event_id);
      if (it == self.episodes_.end()) return;
      it->second.solved_at = log.emitted_at;
    }
    void operator()(const ServiceRegisteredLog&) {}
    void operator()(const ContainerRegisteredLog&) {}
    void operator()(const ReputationUpdatedLog&) {}
  };
  std::visit(Visitor{*this, log}, log.payload);
}

void Simulation::schedule_migration_trigger(std::uint64_t index) {
  const SimTime period = from_seconds(config_.migration_period_s);
  const SimTime first = config_.migration_start_s > 0 ? from_seconds(config_.migration_start_s)
                                                      : period;
  const SimTime at = first + static_cast<SimTime>(index) * period;
  if (at >= config_.duration()) return;
  if (config_.migration_count > 0 &&
      index >= static_cast<std::uint64_t>(config_.migration_count)) {
    return;
  }
  sched_.schedule(at, [this, index] {
    // Move the service's first container off its current host.
    const ServiceRecord* svc = contracts_.service(config_.service_id);
    if (svc != nullptr && !svc->containers.empty()) {
      const ContainerRecord* rec = contracts_.container(svc->containers.front());
      if (rec != nullptr && rec->current_host) {
        const std::size_t idx = rec->current_host->value - 1;
        if (idx < agents_.size() &&
            agents_[idx]->trigger_migration(rec->container_id, false)) {
          migrations_triggered_++;
        }
      }
    }
    schedule_migration_trigger(index + 1);
  });
}

void Simulation::run() {
  if (ran_) throw std::logic_error("Simulation::run called twice");
  ran_ = true;

  for (auto& agent : agents_) {
    agent->register_node();
    agent->start();
  }
  ledger_.start();

  if (!config_.service_id.empty()) {
    sched_.schedule(from_seconds(config_.deploy_at_s),
                    [this] { agents_.front()->deploy_service(service_spec()); });
  }
  if (config_.migration_period_s > 0) schedule_migration_trigger(0);
  generator_->start();

  sched_.run_until(config_.duration() + from_seconds(config_.grace_s));
  generator_->finalize();
}

const std::vector<RequestSample>& Simulation::samples() const { return generator_->samples(); }

std::uint64_t Simulation::requests_issued() const { return generator_->issued(); }

std::uint64_t Simulation::migrations_solved() const {
  std::uint64_t n = 0;
  for (const auto& [id, ep] : episodes_) {
    if (ep.type == EventType::Migrate && ep.solved_at >= 0) n++;
  }
  return n;
}

std::uint64_t Simulation::deploys_solved() const {
  std::uint64_t n = 0;
  for (const auto& [id, ep] : episodes_) {
    if (ep.type == EventType::Deploy && ep.solved_at >= 0) n++;
  }
  return n;
}

SimTime Simulation::liveness_bound() const {
  SimTime max_startup = 0;
  for (const auto& [name, p] : profiles_) max_startup = std::max(max_startup, p.startup_time);
  return 4 * ms_to_time(config_.block_interval_ms) + max_startup +
         ms_to_time(config_.probe_interval_ms) + from_seconds(1.0);
}

std::vector<EventId> Simulation::stuck_episodes() const {
  std::vector<EventId> stuck;
  const SimTime end = config_.duration() + from_seconds(config_.grace_s);
  for (const auto& [id, ep] : episodes_) {
    if (ep.solved_at < 0 && ep.opened_at + liveness_bound() < end) stuck.push_back(id);
  }
  return stuck;
}

SummaryStats Simulation::summary() const {
  return compute_summary(samples(), migrations_solved(), config_.duration());
}

}  // namespace fogsim
