#pragma once

#include <cstdint>
#include <functional>
#include <queue>
#include <stdexcept>
#include <vector>

#include "fogsim/time.hpp"

namespace fogsim {

class SchedulingInPast : public std::logic_error {
 public:
  using std::logic_error::logic_error;
};

/// Deterministic discrete-event scheduler. Events fire in (fire_at, seq)
/// order; seq is the insertion sequence, so same-time events fire in the
/// order they were scheduled. The scheduler is the sole driver of every
/// simulation component; callbacks must never block.
class Scheduler {
 public:
  using Action = std::function<void()>;

  SimTime now() const { return now_; }

  /// Schedules `action` to fire exactly once at `at`. Throws
  /// SchedulingInPast if `at` precedes the current time. Scheduling at the
  /// current time is allowed: the action runs within the current step,
  /// after already-queued same-time events.
  void schedule(SimTime at, Action action) {
    if (at < now_) {
      throw SchedulingInPast("schedule at t=" + std::to_string(at) +
                             "us before now=" + std::to_string(now_) + "us");
    }
    queue_.push(Entry{at, next_seq_++, std::move(action)});
  }

  void schedule_in(SimTime delay, Action action) { schedule(now_ + delay, std::move(action)); }

  /// Runs events until the queue is empty or the next event fires after
  /// `until`. The clock never exceeds `until`.
  void run_until(SimTime until) {
    while (!queue_.empty() && queue_.top().fire_at <= until) {
      Entry e = pop();
      now_ = e.fire_at;
      e.action();
    }
    if (now_ < until) now_ = until;
  }

  /// Drains the queue completely.
  void run_to_completion() {
    while (!queue_.empty()) {
      Entry e = pop();
      now_ = e.fire_at;
      e.action();
    }
  }

  bool empty() const { return queue_.empty(); }
  std::size_t pending() const { return queue_.size(); }

 private:
  struct Entry {
    SimTime fire_at;
    std::uint64_t seq;
    Action action;
  };
  struct Later {
    bool operator()(const Entry& a, const Entry& b) const {
      if (a.fire_at != b.fire_at) return a.fire_at > b.fire_at;
      return a.seq > b.seq;
    }
  };

  Entry pop() {
    // std::priority_queue::top is const; the action must be moved out.
    Entry e = std::move(const_cast<Entry&>(queue_.top()));
    queue_.pop();
    return e;
  }

  std::priority_queue<Entry, std::vector<Entry>, Later> queue_;
  SimTime now_{0};
  std::uint64_t next_seq_{0};
};

}  // namespace fogsim
