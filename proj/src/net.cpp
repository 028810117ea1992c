#include "fogsim/net.hpp"

#include <memory>

namespace fogsim {

Network::Network(Scheduler& sched, SdnController& sdn, ContainerRuntime& runtime, NetConfig config)
    : sched_(sched), sdn_(sdn), runtime_(runtime), config_(config) {
  // Rules can be pulled out from under established flows (backend removal,
  // service deactivation); affected streams turn Broken and the client finds
  // out at its next send.
  sdn_.on_rule_invalidated = [this](const FiveTuple& tuple) {
    for (auto& [id, conn] : connections_) {
      if (conn.state == ConnectionState::Established && conn.five_tuple == tuple) {
        conn.state = ConnectionState::Broken;
      }
    }
  };
}

void Network::bind_endpoint(const std::string& node_ip, std::uint16_t port, NodeId host,
                            const ContainerId& container) {
  bindings_[{node_ip, port}] = Binding{host, container};
}

void Network::unbind_endpoint(const std::string& node_ip, std::uint16_t port) {
  bindings_.erase({node_ip, port});
}

std::uint64_t Network::open_connection(const FiveTuple& tuple,
                                       std::function<void(ConnectResult)> done) {
  Connection conn;
  conn.conn_id = next_conn_id_++;
  conn.five_tuple = tuple;
  conn.started_at = sched_.now();
  const std::uint64_t id = conn.conn_id;
  connections_[id] = std::move(conn);
  connect_callbacks_[id] = std::move(done);
  opened_++;
  attempt_syn(id);
  return id;
}

void Network::attempt_syn(std::uint64_t conn_id) {
  auto it = connections_.find(conn_id);
  if (it == connections_.end() || it->second.state != ConnectionState::Connecting) return;
  Connection& conn = it->second;
  const int attempt_index = conn.attempts++;
  arm_retry_timer(conn_id, attempt_index);

  const SimTime at_switch = sched_.now() + half_path();
  const FiveTuple tuple = conn.five_tuple;
  sched_.schedule(at_switch, [this, conn_id, tuple, at_switch] {
    auto cit = connections_.find(conn_id);
    if (cit == connections_.end() || cit->second.state != ConnectionState::Connecting) return;

    if (const FlowRule* rule = sdn_.lookup(tuple)) {
      // Table hit: forward to the rule's backend.
      const SimTime at_backend = at_switch + half_path();
      const std::string ip = rule->backend_ip;
      const std::uint16_t port = rule->backend_port;
      sched_.schedule(at_backend + config_.data_delay, [this, conn_id, ip, port] {
        establish(conn_id, sched_.now(), ip, port, false);
      });
      return;
    }

    // Miss: escalate to the controller. A drop leaves the retry timer to act.
    SdnController::Resolution res = sdn_.packet_in(tuple, at_switch);
    if (!res.admitted) return;
    const SimTime at_backend = res.rule_ready_at + half_path();
    sched_.schedule(at_backend + config_.data_delay, [this, conn_id, res] {
      establish(conn_id, sched_.now(), res.backend_ip, res.backend_port, true);
    });
  });
}

void Network::arm_retry_timer(std::uint64_t conn_id, int attempt_index) {
  sched_.schedule_in(config_.syn_timeout, [this, conn_id, attempt_index] {
    auto it = connections_.find(conn_id);
    if (it == connections_.end() || it->second.state != ConnectionState::Connecting) return;
    Connection& conn = it->second;
    if (conn.attempts != attempt_index + 1) return;  // superseded by a later attempt
    if (conn.attempts >= config_.max_retries) {
      conn.state = ConnectionState::Failed;
      failed_++;
      const SimTime elapsed = sched_.now() - conn.started_at;
      connections_.erase(it);
      auto cb = connect_callbacks_.find(conn_id);
      if (cb != connect_callbacks_.end()) {
        auto done = std::move(cb->second);
        connect_callbacks_.erase(cb);
        done(ConnectResult{conn_id, false, elapsed});
      }
      return;
    }
    attempt_syn(conn_id);
  });
}

void Network::establish(std::uint64_t conn_id, SimTime at, const std::string& backend_ip,
                        std::uint16_t backend_port, bool via_miss) {
  auto it = connections_.find(conn_id);
  if (it == connections_.end() || it->second.state != ConnectionState::Connecting) return;
  Connection& conn = it->second;

  auto bit = bindings_.find({backend_ip, backend_port});
  if (bit == bindings_.end()) return;  // no listener; SYN unanswered, timer retries
  const ContainerInstance* inst = runtime_.instance(bit->second.container, bit->second.host);
  if (inst == nullptr || inst->state == ContainerState::Stopped) return;

  conn.state = ConnectionState::Established;
  conn.established_at = at;
  conn.via_miss = via_miss;
  conn.backend_ip = backend_ip;
  conn.backend_port = backend_port;
  conn.backend_host = bit->second.host;
  conn.backend_container = bit->second.container;
  established_++;
  if (via_miss) established_via_miss_++;

  auto cb = connect_callbacks_.find(conn_id);
  if (cb != connect_callbacks_.end()) {
    auto done = std::move(cb->second);
    connect_callbacks_.erase(cb);
    done(ConnectResult{conn_id, true, at - conn.started_at});
  }
}

void Network::send_request(std::uint64_t conn_id, std::function<void(RequestOutcome)> done) {
  auto it = connections_.find(conn_id);
  if (it == connections_.end() || it->second.state != ConnectionState::Established) {
    done(RequestOutcome{false, sched_.now(), kNoNode, {}, false});
    return;
  }
  Connection& conn = it->second;
  const NodeId host = conn.backend_host;
  const ContainerId container = conn.backend_container;
  const SimTime arrival = sched_.now() + config_.data_delay;

  auto settled = std::make_shared<bool>(false);
  auto finish = [done, settled](RequestOutcome outcome) {
    if (*settled) return;
    *settled = true;
    done(outcome);
  };

  // Response timeout, counted from the send.
  sched_.schedule_in(config_.response_timeout, [this, finish, host, container] {
    finish(RequestOutcome{false, sched_.now(), host, container, false});
  });

  sched_.schedule(arrival, [this, conn_id, host, container, arrival, finish] {
    const ContainerInstance* inst = runtime_.instance(container, host);
    const bool pre_healthy = inst != nullptr && inst->state != ContainerState::Healthy;
    runtime_.serve_request(container, host, arrival,
                           [this, conn_id, host, container, pre_healthy, finish](SimTime done_at,
                                                                                 bool ok) {
                             const SimTime at_client = done_at + config_.data_delay;
                             sched_.schedule(at_client, [this, conn_id, host, container, pre_healthy,
                                                         ok, finish] {
                               if (!ok) {
                                 auto cit = connections_.find(conn_id);
                                 if (cit != connections_.end() &&
                                     cit->second.state == ConnectionState::Established) {
                                   cit->second.state = ConnectionState::Broken;
                                 }
                               }
                               finish(RequestOutcome{ok, sched_.now(), host, container, pre_healthy});
                             });
                           });
  });
}

void Network::close(std::uint64_t conn_id) {
  auto it = connections_.find(conn_id);
  if (it == connections_.end()) return;
  ConnectionState& st = it->second.state;
  if (st == ConnectionState::Established || st == ConnectionState::Broken) {
    st = ConnectionState::Closed;
    closed_++;
  }
  // Finished connections drop out of the table; stale timer and response
  // events find nothing and no-op.
  if (st == ConnectionState::Closed || st == ConnectionState::Failed) connections_.erase(it);
}

const Connection* Network::connection(std::uint64_t conn_id) const {
  auto it = connections_.find(conn_id);
  return it == connections_.end() ? nullptr : &it->second;
}

bool Network::is_established(std::uint64_t conn_id) const {
  const Connection* c = connection(conn_id);
  return c != nullptr && c->state == ConnectionState::Established;
}

}  // namespace fogsim
