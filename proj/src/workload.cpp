#include "fogsim/workload.hpp"

namespace fogsim {

RequestGenerator::RequestGenerator(Scheduler& sched, Network& network, WorkloadConfig config)
    : sched_(sched), network_(network), config_(std::move(config)) {}

void RequestGenerator::start() {
  if (config_.duration <= 0) return;
  if (config_.mode == ConnectionMode::PersistentStream) {
    // Dial ahead of the first query so the stream is up when queries begin.
    const SimTime lead = from_ms(500);
    const SimTime dial_at = config_.start_at > lead ? config_.start_at - lead : 0;
    sched_.schedule(dial_at, [this] { dial_stream(0); });
  }
  sched_.schedule(config_.start_at, [this] { tick(0); });
}

void RequestGenerator::tick(std::uint64_t k) {
  const SimTime issued_at = sched_.now();
  issued_++;
  if (config_.mode == ConnectionMode::PerRequest) {
    issue_per_request(issued_at);
  } else {
    issue_stream_query(issued_at);
  }
  const SimTime next_offset = static_cast<SimTime>(k + 1) * config_.request_interval;
  if (next_offset < config_.duration) {
    sched_.schedule(config_.start_at + next_offset, [this, k] { tick(k + 1); });
  }
}

FiveTuple RequestGenerator::next_tuple() {
  // Ephemeral ports from 40001; long soaks wrap and reuse released ports.
  const std::uint16_t port = static_cast<std::uint16_t>(40001 + (port_seq_ % 25535));
  port_seq_++;
  return FiveTuple{config_.client_ip, port, config_.vip, config_.port, config_.proto};
}

void RequestGenerator::issue_per_request(SimTime issued_at) {
  const FiveTuple tuple = next_tuple();
  network_.open_connection(tuple, [this, issued_at, tuple](ConnectResult conn) {
    if (!conn.established) {
      RequestSample s;
      s.sent_at = issued_at;
      s.connect_time = conn.connect_time;
      s.latency_time = conn.connect_time;  // time to failure
      s.success = false;
      s.five_tuple = tuple;
      samples_.push_back(s);
      return;
    }
    const SimTime connect_time = conn.connect_time;
    const std::uint64_t id = conn.conn_id;
    network_.send_request(id, [this, issued_at, tuple, connect_time, id](RequestOutcome out) {
      RequestSample s;
      s.sent_at = issued_at;
      s.connect_time = connect_time;
      s.latency_time = out.responded_at - issued_at;
      s.success = out.ok;
      s.five_tuple = tuple;
      s.backend = out.backend_host;
      s.container = out.container;
      s.served_pre_healthy = out.served_pre_healthy;
      samples_.push_back(s);
      network_.close(id);
    });
  });
}

void RequestGenerator::issue_stream_query(SimTime issued_at) {
  if (stream_state_ == StreamState::Ready && network_.is_established(stream_conn_)) {
    send_on_stream(issued_at, 0);
    return;
  }
  // Stream down (or found broken by this query): abandon it, queue the
  // query, and re-dial after the reconnect backoff.
  queue_.push_back(QueuedQuery{issued_at});
  if (stream_state_ != StreamState::Connecting) {
    if (stream_conn_ != 0) {
      network_.close(stream_conn_);
      stream_conn_ = 0;
    }
    stream_state_ = StreamState::Connecting;
    dial_stream(config_.reconnect_backoff);
  }
}

void RequestGenerator::dial_stream(SimTime backoff) {
  stream_state_ = StreamState::Connecting;
  sched_.schedule_in(backoff, [this] {
    const FiveTuple tuple = next_tuple();
    network_.open_connection(tuple, [this](ConnectResult conn) {
      if (!conn.established) {
        // Give up on the queries that waited for this dial; the next tick
        // starts another cycle.
        stream_state_ = StreamState::Idle;
        while (!queue_.empty()) {
          const QueuedQuery q = queue_.front();
          queue_.pop_front();
          RequestSample s;
          s.sent_at = q.issued_at;
          s.connect_time = sched_.now() - q.issued_at;
          s.latency_time = sched_.now() - q.issued_at;
          s.success = false;
          samples_.push_back(s);
        }
        return;
      }
      stream_conn_ = conn.conn_id;
      stream_state_ = StreamState::Ready;
      flush_queue(sched_.now());
    });
  });
}

void RequestGenerator::flush_queue(SimTime established_at) {
  while (!queue_.empty()) {
    const QueuedQuery q = queue_.front();
    queue_.pop_front();
    send_on_stream(q.issued_at, established_at - q.issued_at);
  }
}

void RequestGenerator::send_on_stream(SimTime issued_at, SimTime connect_time) {
  const std::uint64_t id = stream_conn_;
  const Connection* conn = network_.connection(id);
  const FiveTuple tuple = conn != nullptr ? conn->five_tuple : FiveTuple{};
  network_.send_request(id, [this, issued_at, connect_time, tuple](RequestOutcome out) {
    RequestSample s;
    s.sent_at = issued_at;
    s.connect_time = connect_time;
    s.latency_time = out.responded_at - issued_at;
    s.success = out.ok;
    s.five_tuple = tuple;
    s.backend = out.backend_host;
    s.container = out.container;
    s.served_pre_healthy = out.served_pre_healthy;
    samples_.push_back(s);
  });
}

void RequestGenerator::finalize() {
  if (config_.mode == ConnectionMode::PersistentStream && stream_conn_ != 0) {
    network_.close(stream_conn_);
  }
}

}  // namespace fogsim
