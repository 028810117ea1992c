#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/link.hpp"
#include "fogsim/scheduler.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

struct BackendEndpoint {
  std::string node_ip;
  std::uint16_t port{0};
  bool healthy{true};
};

struct VirtualService {
  std::uint32_t vs_id{0};
  std::string vip;
  std::uint16_t port{0};
  Proto proto{Proto::TCP};
  bool active{false};
  std::vector<BackendEndpoint> backends;
  std::size_t rr_cursor{0};
};

struct FlowRule {
  FiveTuple match;
  std::string backend_ip;  // rewrite target
  std::uint16_t backend_port{0};
  SimTime installed_at{0};
};

struct FlowTraceEntry {
  enum class Op : std::uint8_t { Install, Remove } op{Op::Install};
  SimTime at{0};
  FiveTuple match;
  std::string backend_ip;
  bool backend_healthy_at_install{true};
};

class SdnError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct SdnConfig {
  SimTime packet_in_latency{from_ms(3)};     // switch -> controller, one way
  SimTime rule_install_latency{from_ms(3)};  // controller decision + install
  bool health_filter{true};                  // select only healthy backends
  SimTime rule_idle_timeout{0};              // 0 = rules persist until invalidated
  bool atomic_cutover{false};                // upsert replaces all other backends
};

/// Behavioral model of the SDN controller, its virtual-services application,
/// and the single domain switch. Exact-match reactive rules: a table miss
/// escalates to the controller, which resolves the destination virtual
/// service, picks a healthy backend round-robin, and installs a rewrite rule.
///
/// The controller's virtual-services state is mutated only through the
/// control-link API (see ControlLink below) or directly in unit tests.
class SdnController {
 public:
  SdnController(Scheduler& sched, SdnConfig config = {}) : sched_(sched), config_(config) {}

  // --- virtual services application -------------------------------------

  std::uint32_t register_virtual_service(const std::string& vip, std::uint16_t port, Proto proto);
  VirtualService& upsert_backend(const std::string& vip, std::uint16_t port, Proto proto,
                                 const BackendEndpoint& endpoint);
  VirtualService& remove_backend(const std::string& vip, std::uint16_t port, Proto proto,
                                 const std::string& node_ip);
  VirtualService& set_active(const std::string& vip, std::uint16_t port, Proto proto, bool active);

  const VirtualService* find(const std::string& vip, std::uint16_t port, Proto proto) const;

  // --- switch ------------------------------------------------------------

  /// Exact-match table lookup.
  const FlowRule* lookup(const FiveTuple& match) const;

  /// Result of escalating a table miss.
  struct Resolution {
    bool admitted{false};
    std::string backend_ip;
    std::uint16_t backend_port{0};
    SimTime rule_ready_at{0};  // when the rule is in the table and the packet forwarded
  };

  /// Handles a packet-in for `match` arriving at the switch at `now`.
  /// If a matching rule already exists the caller should have used lookup();
  /// re-resolving an existing match returns it as admitted with no new
  /// install. A drop is a result, not an error.
  Resolution packet_in(const FiveTuple& match, SimTime now);

  /// Deletes the rule for `match`, if present.
  void remove_rule(const FiveTuple& match);

  std::size_t flow_table_size() const { return flow_table_.size(); }
  std::uint64_t rules_installed() const { return rules_installed_; }
  std::uint64_t set_active_calls() const { return set_active_calls_; }
  const std::vector<FlowTraceEntry>& flow_trace() const { return flow_trace_; }
  const std::map<std::uint32_t, VirtualService>& virtual_services() const { return services_; }

  /// Invoked when a rule is removed out from under an established flow, so
  /// connection models can observe breakage. Set by the network layer.
  std::function<void(const FiveTuple&)> on_rule_invalidated;

 private:
  VirtualService& service_or_throw(const std::string& vip, std::uint16_t port, Proto proto);
  void erase_rules_targeting(const VirtualService& vs, const std::string& node_ip);
  void erase_rules_for_service(const VirtualService& vs);

  Scheduler& sched_;
  SdnConfig config_;
  std::map<std::uint32_t, VirtualService> services_;
  std::map<std::tuple<std::string, std::uint16_t, Proto>, std::uint32_t> by_endpoint_;
  std::map<FiveTuple, FlowRule> flow_table_;
  std::vector<FlowTraceEntry> flow_trace_;
  std::uint64_t rules_installed_{0};
  std::uint64_t set_active_calls_{0};
  std::uint32_t next_vs_id_{1};
};

/// The virtual services interface: the REST-style management API fog nodes
/// reach over the control link, which is isolated from the SDN control
/// network. Every call is a request/acknowledge round trip of one link
/// delay each way; the acknowledge carries a snapshot of the service.
class ControlLink {
 public:
  using Ack = std::function<void(const VirtualService&)>;

  ControlLink(Scheduler& sched, SdnController& controller, LinkModel link)
      : sched_(sched), controller_(&controller), link_(link) {}

  void register_virtual_service(const std::string& vip, std::uint16_t port, Proto proto, Ack ack = {});
  void upsert_backend(const std::string& vip, std::uint16_t port, Proto proto,
                      const BackendEndpoint& endpoint, Ack ack = {});
  void remove_backend(const std::string& vip, std::uint16_t port, Proto proto,
                      const std::string& node_ip, Ack ack = {});
  void set_active(const std::string& vip, std::uint16_t port, Proto proto, bool active, Ack ack = {});

 private:
  void round_trip(std::function<const VirtualService&()> op, Ack ack);

  Scheduler& sched_;
  SdnController* controller_;
  LinkModel link_;
};

}  // namespace fogsim
