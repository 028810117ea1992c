#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/link.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scheduler.hpp"
#include "fogsim/sdn.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

enum class ConnectionState : std::uint8_t { Connecting, Established, Broken, Closed, Failed };

struct NetConfig {
  SimTime data_delay{from_ms(2)};        // client -> backend, end to end; switch sits mid-path
  SimTime syn_timeout{from_ms(300)};     // retry timer per connection attempt
  int max_retries{3};                    // total SYN attempts before Failed
  SimTime response_timeout{from_ms(5000)};
};

struct Connection {
  std::uint64_t conn_id{0};
  FiveTuple five_tuple;
  SimTime started_at{0};
  SimTime established_at{-1};
  ConnectionState state{ConnectionState::Connecting};
  bool via_miss{false};  // resolution required a packet-in
  int attempts{0};
  std::string backend_ip;
  std::uint16_t backend_port{0};
  NodeId backend_host{kNoNode};
  ContainerId backend_container;
};

struct ConnectResult {
  std::uint64_t conn_id{0};
  bool established{false};
  SimTime connect_time{0};  // time to establish, or time to failure
};

struct RequestOutcome {
  bool ok{false};
  SimTime responded_at{0};
  NodeId backend_host{kNoNode};
  ContainerId container;
  bool served_pre_healthy{false};  // container state < Healthy when the request arrived
};

/// Client-side transport model over the data network. A connection resolves
/// through the switch: an exact-match rule forwards directly; a miss takes
/// the packet-in path and pays controller latency. Unanswered SYNs retry on
/// a fixed timer until the attempt budget is spent.
class Network {
 public:
  Network(Scheduler& sched, SdnController& sdn, ContainerRuntime& runtime, NetConfig config = {});

  /// Publishes (node_ip, port) as the ingress of a container instance.
  void bind_endpoint(const std::string& node_ip, std::uint16_t port, NodeId host,
                     const ContainerId& container);
  void unbind_endpoint(const std::string& node_ip, std::uint16_t port);

  std::uint64_t open_connection(const FiveTuple& tuple, std::function<void(ConnectResult)> done);

  /// Sends one request on an Established connection. The callback fires at
  /// client-side response time, or earlier on failure (connection broken,
  /// backend stopped, response timeout).
  void send_request(std::uint64_t conn_id, std::function<void(RequestOutcome)> done);

  void close(std::uint64_t conn_id);

  const Connection* connection(std::uint64_t conn_id) const;
  bool is_established(std::uint64_t conn_id) const;

  // Conservation counters.
  std::uint64_t opened() const { return opened_; }
  std::uint64_t established_total() const { return established_; }
  std::uint64_t failed_total() const { return failed_; }
  std::uint64_t closed_total() const { return closed_; }
  std::uint64_t established_via_miss() const { return established_via_miss_; }

 private:
  struct Binding {
    NodeId host;
    ContainerId container;
  };

  void attempt_syn(std::uint64_t conn_id);
  void arm_retry_timer(std::uint64_t conn_id, int attempt_index);
  void establish(std::uint64_t conn_id, SimTime at, const std::string& backend_ip,
                 std::uint16_t backend_port, bool via_miss);
  SimTime half_path() const { return config_.data_delay / 2; }

  Scheduler& sched_;
  SdnController& sdn_;
  ContainerRuntime& runtime_;
  NetConfig config_;
  std::map<std::uint64_t, Connection> connections_;
  std::map<std::uint64_t, std::function<void(ConnectResult)>> connect_callbacks_;
  std::map<std::pair<std::string, std::uint16_t>, Binding> bindings_;
  std::uint64_t next_conn_id_{1};
  std::uint64_t opened_{0}, established_{0}, failed_{0}, closed_{0}, established_via_miss_{0};
};

}  // namespace fogsim
