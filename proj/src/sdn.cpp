#include "fogsim/sdn.hpp"

#include <algorithm>

namespace fogsim {

std::uint32_t SdnController::register_virtual_service(const std::string& vip, std::uint16_t port,
                                                      Proto proto) {
  const auto key = std::make_tuple(vip, port, proto);
  if (by_endpoint_.count(key) > 0) {
    throw SdnError("EndpointInUse: " + vip + ":" + std::to_string(port));
  }
  VirtualService vs;
  vs.vs_id = next_vs_id_++;
  vs.vip = vip;
  vs.port = port;
  vs.proto = proto;
  vs.active = false;
  services_[vs.vs_id] = vs;
  by_endpoint_[key] = vs.vs_id;
  return vs.vs_id;
}

VirtualService& SdnController::service_or_throw(const std::string& vip, std::uint16_t port,
                                                Proto proto) {
  auto it = by_endpoint_.find(std::make_tuple(vip, port, proto));
  if (it == by_endpoint_.end()) {
    throw SdnError("UnknownVirtualService: " + vip + ":" + std::to_string(port));
  }
  return services_.at(it->second);
}

const VirtualService* SdnController::find(const std::string& vip, std::uint16_t port,
                                          Proto proto) const {
  auto it = by_endpoint_.find(std::make_tuple(vip, port, proto));
  return it == by_endpoint_.end() ? nullptr : &services_.at(it->second);
}

VirtualService& SdnController::upsert_backend(const std::string& vip, std::uint16_t port,
                                              Proto proto, const BackendEndpoint& endpoint) {
  VirtualService& vs = service_or_throw(vip, port, proto);
  if (config_.atomic_cutover) {
    // Replace-all semantics: the new instance immediately owns the service.
    for (const BackendEndpoint& old : vs.backends) {
      if (old.node_ip != endpoint.node_ip) erase_rules_targeting(vs, old.node_ip);
    }
    vs.backends.clear();
    vs.backends.push_back(endpoint);
    vs.rr_cursor = 0;
    return vs;
  }
  auto it = std::find_if(vs.backends.begin(), vs.backends.end(),
                         [&](const BackendEndpoint& b) { return b.node_ip == endpoint.node_ip; });
  if (it != vs.backends.end()) {
    it->port = endpoint.port;
    it->healthy = endpoint.healthy;
  } else {
    vs.backends.push_back(endpoint);
  }
  return vs;
}

VirtualService& SdnController::remove_backend(const std::string& vip, std::uint16_t port,
                                              Proto proto, const std::string& node_ip) {
  VirtualService& vs = service_or_throw(vip, port, proto);
  auto it = std::find_if(vs.backends.begin(), vs.backends.end(),
                         [&](const BackendEndpoint& b) { return b.node_ip == node_ip; });
  if (it == vs.backends.end()) {
    throw SdnError("UnknownBackend: " + node_ip);
  }
  const std::size_t idx = static_cast<std::size_t>(it - vs.backends.begin());
  vs.backends.erase(it);
  if (vs.rr_cursor > idx) vs.rr_cursor--;
  if (!vs.backends.empty()) vs.rr_cursor %= vs.backends.size();
  // Invalidate rules steering traffic at the removed instance so the next
  // packet re-resolves against the surviving backends.
  erase_rules_targeting(vs, node_ip);
  return vs;
}

VirtualService& SdnController::set_active(const std::string& vip, std::uint16_t port, Proto proto,
                                          bool active) {
  VirtualService& vs = service_or_throw(vip, port, proto);
  set_active_calls_++;
  vs.active = active;
  if (!active) erase_rules_for_service(vs);
  return vs;
}

void SdnController::erase_rules_targeting(const VirtualService& vs, const std::string& node_ip) {
  for (auto it = flow_table_.begin(); it != flow_table_.end();) {
    const bool same_service = it->first.dst_ip == vs.vip && it->first.dst_port == vs.port &&
                              it->first.proto == vs.proto;
    if (same_service && it->second.backend_ip == node_ip) {
      flow_trace_.push_back({FlowTraceEntry::Op::Remove, sched_.now(), it->first, node_ip, true});
      if (on_rule_invalidated) on_rule_invalidated(it->first);
      it = flow_table_.erase(it);
    } else {
      ++it;
    }
  }
}

void SdnController::erase_rules_for_service(const VirtualService& vs) {
  for (auto it = flow_table_.begin(); it != flow_table_.end();) {
    if (it->first.dst_ip == vs.vip && it->first.dst_port == vs.port && it->first.proto == vs.proto) {
      flow_trace_.push_back(
          {FlowTraceEntry::Op::Remove, sched_.now(), it->first, it->second.backend_ip, true});
      if (on_rule_invalidated) on_rule_invalidated(it->first);
      it = flow_table_.erase(it);
    } else {
      ++it;
    }
  }
}

const FlowRule* SdnController::lookup(const FiveTuple& match) const {
  auto it = flow_table_.find(match);
  return it == flow_table_.end() ? nullptr : &it->second;
}

SdnController::Resolution SdnController::packet_in(const FiveTuple& match, SimTime now) {
  // Idempotence: a concurrent retry may race an install already under way.
  if (const FlowRule* existing = lookup(match)) {
    return Resolution{true, existing->backend_ip, existing->backend_port, now};
  }

  auto it = by_endpoint_.find(std::make_tuple(match.dst_ip, match.dst_port, match.proto));
  if (it == by_endpoint_.end()) return {};
  VirtualService& vs = services_.at(it->second);
  if (!vs.active || vs.backends.empty()) return {};

  std::vector<std::size_t> eligible;
  for (std::size_t i = 0; i < vs.backends.size(); ++i) {
    if (!config_.health_filter || vs.backends[i].healthy) eligible.push_back(i);
  }
  if (eligible.empty()) return {};

  // Round-robin over the eligible set.
  const std::size_t pick = eligible[vs.rr_cursor % eligible.size()];
  vs.rr_cursor = (vs.rr_cursor + 1) % eligible.size();
  const BackendEndpoint& backend = vs.backends[pick];

  const SimTime ready = now + config_.packet_in_latency + config_.rule_install_latency;
  FlowRule rule{match, backend.node_ip, backend.port, ready};
  flow_table_[match] = rule;
  rules_installed_++;
  flow_trace_.push_back({FlowTraceEntry::Op::Install, ready, match, backend.node_ip, backend.healthy});

  if (config_.rule_idle_timeout > 0) {
    // Lazy expiry: drop the rule if it is still the same install.
    sched_.schedule(ready + config_.rule_idle_timeout, [this, match, ready] {
      auto fit = flow_table_.find(match);
      if (fit != flow_table_.end() && fit->second.installed_at == ready) {
        flow_trace_.push_back(
            {FlowTraceEntry::Op::Remove, sched_.now(), match, fit->second.backend_ip, true});
        flow_table_.erase(fit);
      }
    });
  }

  return Resolution{true, backend.node_ip, backend.port, ready};
}

void SdnController::remove_rule(const FiveTuple& match) {
  auto it = flow_table_.find(match);
  if (it == flow_table_.end()) return;
  flow_trace_.push_back({FlowTraceEntry::Op::Remove, sched_.now(), match, it->second.backend_ip, true});
  if (on_rule_invalidated) on_rule_invalidated(it->first);
  flow_table_.erase(it);
}

void ControlLink::round_trip(std::function<const VirtualService&()> op, Ack ack) {
  const SimTime request = link_.delay();
  sched_.schedule_in(request, [this, op = std::move(op), ack = std::move(ack)] {
    // A failed management call acknowledges with an empty snapshot, the way
    // a REST client sees an error status; it never tears down the caller.
    VirtualService snapshot;
    try {
      snapshot = op();
    } catch (const SdnError&) {
    }
    if (ack) {
      sched_.schedule_in(link_.delay(), [ack, snapshot = std::move(snapshot)] { ack(snapshot); });
    }
  });
}

void ControlLink::register_virtual_service(const std::string& vip, std::uint16_t port, Proto proto,
                                           Ack ack) {
  round_trip(
      [this, vip, port, proto]() -> const VirtualService& {
        controller_->register_virtual_service(vip, port, proto);
        return *controller_->find(vip, port, proto);
      },
      std::move(ack));
}

void ControlLink::upsert_backend(const std::string& vip, std::uint16_t port, Proto proto,
                                 const BackendEndpoint& endpoint, Ack ack) {
  round_trip(
      [this, vip, port, proto, endpoint]() -> const VirtualService& {
        return controller_->upsert_backend(vip, port, proto, endpoint);
      },
      std::move(ack));
}

void ControlLink::remove_backend(const std::string& vip, std::uint16_t port, Proto proto,
                                 const std::string& node_ip, Ack ack) {
  round_trip(
      [this, vip, port, proto, node_ip]() -> const VirtualService& {
        return controller_->remove_backend(vip, port, proto, node_ip);
      },
      std::move(ack));
}

void ControlLink::set_active(const std::string& vip, std::uint16_t port, Proto proto, bool active,
                             Ack ack) {
  round_trip(
      [this, vip, port, proto, active]() -> const VirtualService& {
        return controller_->set_active(vip, port, proto, active);
      },
      std::move(ack));
}

}  // namespace fogsim
