#pragma once

#include <cstdint>

namespace fogsim {

// Simulated time in integer microseconds. All internal arithmetic is integral;
// milliseconds appear only at the reporting boundary.
using SimTime = std::int64_t;

constexpr SimTime kMicrosecond = 1;
constexpr SimTime kMillisecond = 1000;
constexpr SimTime kSecond = 1000 * kMillisecond;
constexpr SimTime kDay = 86400 * kSecond;

constexpr SimTime from_ms(std::int64_t ms) { return ms * kMillisecond; }
constexpr double to_ms(SimTime t) { return static_cast<double>(t) / kMillisecond; }
constexpr SimTime from_seconds(double s) {
  return static_cast<SimTime>(s * static_cast<double>(kSecond));
}
constexpr double to_seconds(SimTime t) { return static_cast<double>(t) / kSecond; }

}  // namespace fogsim
