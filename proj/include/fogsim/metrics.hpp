#pragma once

#include <cstdint>
#include <map>
#include <stdexcept>
#include <vector>

#include "fogsim/ids.hpp"
#include "fogsim/time.hpp"

namespace fogsim {

/// One client request. The unit every latency and availability figure is
/// computed from.
struct RequestSample {
  SimTime sent_at{0};
  SimTime connect_time{0};  // 0 for reused streams; time-to-failure on error
  SimTime latency_time{0};  // connect + transit + endpoint computation; time-to-failure on error
  bool success{false};
  FiveTuple five_tuple;
  NodeId backend{kNoNode};
  ContainerId container;
  bool served_pre_healthy{false};  // serving instance had not reported Healthy at arrival
};

class EmptySampleSet : public std::runtime_error {
 public:
  EmptySampleSet() : std::runtime_error("EmptySampleSet") {}
};

struct SummaryStats {
  std::uint64_t migrations_total{0};
  double migrations_per_hour{0.0};
  double migrations_per_day{0.0};
  std::uint64_t requests_total{0};
  double requests_per_hour{0.0};
  double requests_per_day{0.0};
  std::uint64_t errors{0};
  // Latency statistics cover Success samples only; errors are tallied apart.
  double max_latency_ms{0.0};
  double min_latency_ms{0.0};
  double avg_latency_ms{0.0};
  double latency_stddev_ms{0.0};  // population standard deviation
  std::vector<double> availability_per_day;  // fraction per simulated day
  double availability_overall{1.0};
};

/// Exact counts over the sample set. Day buckets are disjoint, cover the
/// whole duration, and a day with no requests counts as fully available.
SummaryStats compute_summary(const std::vector<RequestSample>& samples,
                             std::uint64_t migrations_total, SimTime duration);

struct PercentileReport {
  std::map<double, double> fraction_below;  // threshold_ms -> fraction of Success samples under it
  double p50{0.0};
  double p90{0.0};
  double p95{0.0};
  double p99{0.0};
};

/// Latency distribution over Success samples (nearest-rank percentiles).
/// Throws EmptySampleSet when no Success sample exists.
PercentileReport percentile_report(const std::vector<RequestSample>& samples,
                                   const std::vector<double>& thresholds_ms);

}  // namespace fogsim
