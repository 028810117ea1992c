#pragma once

#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/scheduler.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

enum class ConnectionMode : std::uint8_t { PerRequest, PersistentStream };

/// Per-image performance profile. The values are fitted parameters: the
/// measured behavior they reproduce is observed latency, not container
/// internals.
struct ImageProfile {
  std::string name;
  SimTime startup_time{0};            // Created -> internally initialized
  SimTime per_request_processing{0};  // endpoint computation time
  ConnectionMode connection_mode{ConnectionMode::PerRequest};
};

enum class ContainerState : std::uint8_t { Created, Starting, Running, Healthy, Stopped };

inline const char* to_string(ContainerState s) {
  switch (s) {
    case ContainerState::Created: return "Created";
    case ContainerState::Starting: return "Starting";
    case ContainerState::Running: return "Running";
    case ContainerState::Healthy: return "Healthy";
    default: return "Stopped";
  }
}

struct HealthCheckConfig {
  SimTime probe_interval{from_ms(500)};
  SimTime probe_timeout{from_ms(100)};
  int consecutive_passes_required{1};
};

struct ContainerInstance {
  ContainerId container_id;
  NodeId host;
  ImageProfile profile;
  ContainerState state{ContainerState::Created};
  SimTime created_at{0};
  SimTime running_at{0};
  SimTime healthy_at{-1};  // -1 until Healthy
  int consecutive_passes{0};

  SimTime initialized_at() const { return created_at + profile.startup_time; }
  bool serving() const { return state == ContainerState::Running || state == ContainerState::Healthy; }
};

struct RuntimeTraceEntry {
  enum class Kind : std::uint8_t { Create, Running, Healthy, Stop } kind{Kind::Create};
  SimTime at{0};
  ContainerId container_id;
  NodeId host;
};

class RuntimeError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Container runtime model: lifecycle, request servicing, and the health
/// check system that notifies host agents when a container becomes Healthy.
/// One object models the runtime of every node; instances are keyed by
/// (host, container id), so the same container id may briefly run on two
/// hosts during a migration overlap window.
class ContainerRuntime {
 public:
  using HealthNotification = std::function<void(const ContainerInstance&)>;
  using ResponseCallback = std::function<void(SimTime, bool ok)>;

  ContainerRuntime(Scheduler& sched, HealthCheckConfig health = {})
      : sched_(sched), health_(health) {}

  /// Starts a container on `host`. The instance is Starting immediately and
  /// Running in the same instant (after already-queued events); internal
  /// initialization completes startup_time later. Health probes run from
  /// creation until the instance turns Healthy.
  ContainerInstance& create(NodeId host, const ContainerId& id, const ImageProfile& profile);

  /// One health probe. Passes iff the container has finished initializing.
  bool probe(const ContainerId& id, NodeId host, SimTime now);

  /// Serves one request arriving at `arrival`. Requests that arrive while
  /// the instance is still initializing queue behind initialization. The
  /// callback fires at response time, or with ok=false if the container
  /// stops first.
  void serve_request(const ContainerId& id, NodeId host, SimTime arrival, ResponseCallback done);

  /// Stops an instance; pending responses fail. Idempotent.
  void stop(const ContainerId& id, NodeId host);

  const ContainerInstance* instance(const ContainerId& id, NodeId host) const;
  /// Non-stopped instances of `id` across all hosts.
  std::vector<const ContainerInstance*> live_instances(const ContainerId& id) const;
  int running_on(NodeId host) const;

  void on_healthy(HealthNotification cb) { notify_ = std::move(cb); }
  const std::vector<RuntimeTraceEntry>& trace() const { return trace_; }
  const HealthCheckConfig& health_config() const { return health_; }

 private:
  struct Pending {
    std::uint64_t id;
    ResponseCallback done;
  };
  struct Slot {
    ContainerInstance instance;
    std::vector<Pending> pending;
    std::uint64_t epoch{0};
  };
  using Key = std::pair<NodeId, ContainerId>;

  void schedule_probe(Key key, std::uint64_t epoch, SimTime at);

  Scheduler& sched_;
  HealthCheckConfig health_;
  std::map<Key, Slot> slots_;
  std::map<NodeId, int> running_count_;
  std::vector<RuntimeTraceEntry> trace_;
  HealthNotification notify_;
  std::uint64_t next_pending_id_{1};
  std::uint64_t next_epoch_{1};
};

/// Built-in image profiles fitted against the latency behavior of the three
/// reference workloads. All values are echoed into run metadata.
const std::map<std::string, ImageProfile>& builtin_profiles();

}  // namespace fogsim
