#pragma once

#include <cstdint>
#include <random>
#include <string>

#include "fogsim/time.hpp"

namespace fogsim {

/// Seeded random source. Every stochastic draw in a run flows through one of
/// these, so (config, seed) fully determines the trace.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  SimTime uniform(SimTime lo, SimTime hi) {
    if (hi <= lo) return lo;
    return std::uniform_int_distribution<SimTime>(lo, hi)(engine_);
  }

  std::uint32_t uniform_u32(std::uint32_t lo, std::uint32_t hi) {
    return std::uniform_int_distribution<std::uint32_t>(lo, hi)(engine_);
  }

  double uniform_unit() { return std::uniform_real_distribution<double>(0.0, 1.0)(engine_); }

 private:
  std::mt19937_64 engine_;
};

/// One-way message channel with fixed delay and optional symmetric jitter.
/// The three domain channels (data network, SDN control network, control
/// link between fog nodes and the virtual services interface) are instances
/// of this model.
class LinkModel {
 public:
  LinkModel() = default;
  LinkModel(std::string name, SimTime one_way_delay, SimTime jitter = 0, Rng* rng = nullptr)
      : name_(std::move(name)), one_way_delay_(one_way_delay), jitter_(jitter), rng_(rng) {}

  const std::string& name() const { return name_; }
  SimTime base_delay() const { return one_way_delay_; }

  SimTime delay() const {
    if (jitter_ == 0 || rng_ == nullptr) return one_way_delay_;
    SimTime d = one_way_delay_ + rng_->uniform(-jitter_, jitter_);
    return d < 0 ? 0 : d;
  }

 private:
  std::string name_;
  SimTime one_way_delay_{0};
  SimTime jitter_{0};
  Rng* rng_{nullptr};
};

}  // namespace fogsim
