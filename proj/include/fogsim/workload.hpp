#pragma once

#include <cstdint>
#include <deque>
#include <string>
#include <vector>

#include "fogsim/metrics.hpp"
#include "fogsim/net.hpp"
#include "fogsim/runtime.hpp"
#include "fogsim/scheduler.hpp"

namespace fogsim {

struct WorkloadConfig {
  std::string client_ip{"192.168.0.90"};  // the observer node
  std::string vip;
  std::uint16_t port{80};
  Proto proto{Proto::TCP};
  ConnectionMode mode{ConnectionMode::PerRequest};
  SimTime start_at{0};
  SimTime request_interval{from_seconds(3)};  // the R parameter
  SimTime duration{0};                        // issuance window; requests at start_at + k*R, k*R < duration
  SimTime reconnect_backoff{from_ms(200)};    // persistent streams: wait before re-dialing
};

/// Measurement client. Per-request mode opens a fresh connection (new source
/// port, hence a new flow rule) for every request; persistent-stream mode
/// multiplexes queries over one connection and re-dials after breakage.
class RequestGenerator {
 public:
  RequestGenerator(Scheduler& sched, Network& network, WorkloadConfig config);

  void start();

  /// Closes a still-open stream; call once the run is over.
  void finalize();

  const std::vector<RequestSample>& samples() const { return samples_; }
  std::uint64_t issued() const { return issued_; }

 private:
  enum class StreamState : std::uint8_t { Idle, Connecting, Ready };
  struct QueuedQuery {
    SimTime issued_at;
  };

  void tick(std::uint64_t k);
  void issue_per_request(SimTime issued_at);
  void issue_stream_query(SimTime issued_at);
  void dial_stream(SimTime backoff);
  void flush_queue(SimTime established_at);
  void send_on_stream(SimTime issued_at, SimTime connect_time);
  FiveTuple next_tuple();

  Scheduler& sched_;
  Network& network_;
  WorkloadConfig config_;
  std::vector<RequestSample> samples_;
  std::deque<QueuedQuery> queue_;
  StreamState stream_state_{StreamState::Idle};
  std::uint64_t stream_conn_{0};
  std::uint64_t issued_{0};
  std::uint32_t port_seq_{0};
};

}  // namespace fogsim
