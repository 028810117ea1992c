#pragma once

#include <string>
#include <vector>

#include "fogsim/simulation.hpp"

namespace fogsim {

struct PropertyResult {
  std::string name;
  bool pass{false};
  std::string detail;
};

/// Trace-level property suite: quorum gating, log-order precedence,
/// solver-only solve, election oracle, single-episode rule, flow-rule
/// counting, health gating, zero-orphan accounting, connection and sample
/// conservation, and episode liveness. Run after Simulation::run().
std::vector<PropertyResult> run_property_checks(const Simulation& sim);

bool all_pass(const std::vector<PropertyResult>& results);

}  // namespace fogsim
