#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <cmath>
#include <random>
#include <vector>

#include "fogsim/metrics.hpp"

using namespace fogsim;

namespace {

RequestSample sample(double sent_s, double latency_ms, bool ok) {
  RequestSample s;
  s.sent_at = from_seconds(sent_s);
  s.connect_time = 0;
  s.latency_time = static_cast<SimTime>(latency_ms * kMillisecond);
  s.success = ok;
  return s;
}

std::vector<RequestSample> bulk(std::uint64_t total, std::uint64_t errors) {
  std::vector<RequestSample> out;
  out.reserve(total);
  for (std::uint64_t i = 0; i < total; ++i) {
    out.push_back(sample(static_cast<double>(i % 86400), 10.0, i >= errors));
  }
  return out;
}

}  // namespace

TEST_CASE("availability matches the reference counts") {
  // 144000 requests, 2 errors -> 99.99861%; 432000 requests, 34 errors ->
  // 99.99213%; error-free sets are fully available.
  auto s1 = compute_summary(bulk(144000, 2), 0, 5 * kDay);
  CHECK(s1.availability_overall == doctest::Approx(0.9999861).epsilon(1e-6));
  auto s2 = compute_summary(bulk(432000, 34), 0, 5 * kDay);
  CHECK(s2.availability_overall == doctest::Approx(0.9999213).epsilon(1e-6));
  auto s3 = compute_summary(bulk(100, 0), 0, kDay);
  CHECK(s3.availability_overall == 1.0);
}

TEST_CASE("per-day partition is disjoint and covers the duration") {
  std::vector<RequestSample> samples;
  samples.push_back(sample(100.0, 10.0, true));
  samples.push_back(sample(86400.0 + 7.0, 10.0, false));
  samples.push_back(sample(86400.0 + 9.0, 10.0, true));
  auto s = compute_summary(samples, 0, 2 * kDay);
  REQUIRE(s.availability_per_day.size() == 2);
  CHECK(s.availability_per_day[0] == 1.0);
  CHECK(s.availability_per_day[1] == doctest::Approx(0.5));
  CHECK(s.errors == 1);
  CHECK(s.requests_total == 3);
}

TEST_CASE("latency statistics cover Success samples only") {
  std::vector<RequestSample> samples{sample(0, 10, true), sample(1, 20, true),
                                     sample(2, 900, false), sample(3, 30, true)};
  auto s = compute_summary(samples, 5, from_seconds(3600));
  CHECK(s.errors == 1);
  CHECK(s.min_latency_ms == 10.0);
  CHECK(s.max_latency_ms == 30.0);
  CHECK(s.avg_latency_ms == doctest::Approx(20.0));
  CHECK(s.migrations_total == 5);
  CHECK(s.migrations_per_hour == doctest::Approx(5.0));
  CHECK(s.requests_per_hour == doctest::Approx(4.0));
}

TEST_CASE("summary equals a brute-force recomputation") {
  std::mt19937 rng(11);
  std::vector<RequestSample> samples;
  for (int i = 0; i < 5000; ++i) {
    samples.push_back(sample(static_cast<double>(rng() % 200000),
                             static_cast<double>(1 + rng() % 2000) / 7.0, rng() % 97 != 0));
  }
  auto s = compute_summary(samples, 123, 3 * kDay);

  // Independent pass: naive accumulation in long double.
  long double sum = 0.0L, sum_sq = 0.0L;
  std::uint64_t ok = 0, errors = 0;
  double mn = 1e18, mx = -1e18;
  for (const RequestSample& r : samples) {
    if (!r.success) {
      errors++;
      continue;
    }
    ok++;
    const double v = to_ms(r.latency_time);
    sum += v;
    sum_sq += v * v;
    mn = std::min(mn, v);
    mx = std::max(mx, v);
  }
  const long double mean = sum / ok;
  const long double var = sum_sq / ok - mean * mean;

  CHECK(s.errors == errors);
  CHECK(s.requests_total == samples.size());
  CHECK(s.min_latency_ms == mn);
  CHECK(s.max_latency_ms == mx);
  CHECK(s.avg_latency_ms == doctest::Approx(static_cast<double>(mean)).epsilon(1e-9));
  CHECK(s.latency_stddev_ms ==
        doctest::Approx(static_cast<double>(std::sqrt(var))).epsilon(1e-9));
  CHECK(s.availability_overall ==
        1.0 - static_cast<double>(errors) / static_cast<double>(samples.size()));
}

TEST_CASE("fraction-below thresholds and nearest-rank percentiles") {
  std::vector<RequestSample> samples{sample(0, 10, true), sample(1, 20, true),
                                     sample(2, 40, true)};
  auto report = percentile_report(samples, {30.0});
  CHECK(report.fraction_below[30.0] == doctest::Approx(2.0 / 3.0));

  std::vector<RequestSample> equal(5, sample(0, 16, true));
  auto flat = percentile_report(equal, {});
  CHECK(flat.p50 == 16.0);
  CHECK(flat.p99 == 16.0);

  // Nearest-rank against a brute-force pick on a known set.
  std::vector<RequestSample> ladder;
  for (int i = 1; i <= 100; ++i) ladder.push_back(sample(0, i, true));
  auto r = percentile_report(ladder, {50.5});
  CHECK(r.p50 == 50.0);
  CHECK(r.p95 == 95.0);
  CHECK(r.p99 == 99.0);
  CHECK(r.fraction_below[50.5] == doctest::Approx(0.5));
}

TEST_CASE("empty sample sets are rejected") {
  CHECK_THROWS_AS(compute_summary({}, 0, kDay), EmptySampleSet);
  std::vector<RequestSample> only_errors{sample(0, 100, false)};
  CHECK_THROWS_AS(percentile_report(only_errors, {10.0}), EmptySampleSet);
  CHECK_NOTHROW(compute_summary(only_errors, 0, kDay));
}
