#include "fogsim/metrics.hpp"

#include <algorithm>
#include <cmath>

namespace fogsim {

SummaryStats compute_summary(const std::vector<RequestSample>& samples,
                             std::uint64_t migrations_total, SimTime duration) {
  if (samples.empty()) throw EmptySampleSet();

  SummaryStats s;
  s.migrations_total = migrations_total;
  s.requests_total = samples.size();
  const double hours = to_seconds(duration) / 3600.0;
  const double days = to_seconds(duration) / 86400.0;
  if (hours > 0) {
    s.migrations_per_hour = static_cast<double>(migrations_total) / hours;
    s.requests_per_hour = static_cast<double>(samples.size()) / hours;
  }
  if (days > 0) {
    s.migrations_per_day = static_cast<double>(migrations_total) / days;
    s.requests_per_day = static_cast<double>(samples.size()) / days;
  }

  std::vector<double> latencies;
  latencies.reserve(samples.size());
  for (const RequestSample& r : samples) {
    if (r.success) {
      latencies.push_back(to_ms(r.latency_time));
    } else {
      s.errors++;
    }
  }

  if (!latencies.empty()) {
    double sum = 0.0;
    s.min_latency_ms = latencies.front();
    s.max_latency_ms = latencies.front();
    for (double v : latencies) {
      sum += v;
      s.min_latency_ms = std::min(s.min_latency_ms, v);
      s.max_latency_ms = std::max(s.max_latency_ms, v);
    }
    s.avg_latency_ms = sum / static_cast<double>(latencies.size());
    double sq = 0.0;
    for (double v : latencies) {
      const double d = v - s.avg_latency_ms;
      sq += d * d;
    }
    s.latency_stddev_ms = std::sqrt(sq / static_cast<double>(latencies.size()));
  }

  const std::uint64_t day_count =
      static_cast<std::uint64_t>((duration + kDay - 1) / kDay);  // ceil over full duration
  std::vector<std::uint64_t> day_requests(std::max<std::uint64_t>(day_count, 1), 0);
  std::vector<std::uint64_t> day_errors(day_requests.size(), 0);
  for (const RequestSample& r : samples) {
    std::uint64_t bucket = static_cast<std::uint64_t>(r.sent_at / kDay);
    if (bucket >= day_requests.size()) bucket = day_requests.size() - 1;
    day_requests[bucket]++;
    if (!r.success) day_errors[bucket]++;
  }
  for (std::size_t d = 0; d < day_requests.size(); ++d) {
    const double avail =
        day_requests[d] == 0
            ? 1.0
            : 1.0 - static_cast<double>(day_errors[d]) / static_cast<double>(day_requests[d]);
    s.availability_per_day.push_back(avail);
  }
  s.availability_overall =
      1.0 - static_cast<double>(s.errors) / static_cast<double>(s.requests_total);
  return s;
}

PercentileReport percentile_report(const std::vector<RequestSample>& samples,
                                   const std::vector<double>& thresholds_ms) {
  std::vector<double> latencies;
  for (const RequestSample& r : samples) {
    if (r.success) latencies.push_back(to_ms(r.latency_time));
  }
  if (latencies.empty()) throw EmptySampleSet();
  std::sort(latencies.begin(), latencies.end());

  PercentileReport report;
  const double n = static_cast<double>(latencies.size());
  for (double t : thresholds_ms) {
    const auto below = std::lower_bound(latencies.begin(), latencies.end(), t);
    report.fraction_below[t] = static_cast<double>(below - latencies.begin()) / n;
  }
  auto nearest_rank = [&](double q) {
    const std::size_t rank =
        static_cast<std::size_t>(std::ceil(q * n));  // 1-indexed nearest rank
    return latencies[std::min(latencies.size() - 1, rank == 0 ? 0 : rank - 1)];
  };
  report.p50 = nearest_rank(0.50);
  report.p90 = nearest_rank(0.90);
  report.p95 = nearest_rank(0.95);
  report.p99 = nearest_rank(0.99);
  return report;
}

}  // namespace fogsim
