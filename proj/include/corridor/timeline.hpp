#pragma once

#include <optional>
#include <string>
#include <vector>

#include "corridor/model.hpp"
#include "corridor/plan.hpp"

namespace corridor {

// Cycle-relative slot of one phase, both ends inclusive. The ranges of a
// configuration partition [0, cycle_duration - 1].
struct PhaseRange {
  PhaseId phase;
  int begin = 0;
  int end = 0;

  friend auto operator<=>(const PhaseRange&, const PhaseRange&) = default;
};

// Tick at which a junction's cycle_index-th cycle since time 0 completes and
// a configuration may be (re)selected.
struct DecisionPoint {
  int cycle_index = 0;  // 1-based
  int time = 0;         // absolute second

  friend auto operator<=>(const DecisionPoint&, const DecisionPoint&) = default;
};

struct JunctionState {
  std::string junction;
  PhaseId phase;
  int elapsed = 0;
  std::string config;

  friend auto operator<=>(const JunctionState&, const JunctionState&) = default;
};

int cycle_duration(const Configuration& config);

std::vector<PhaseRange> phase_ranges(const Configuration& config);

// Seconds of the current cycle already spent when the simulation starts:
// start offset of the initial phase within the active configuration plus the
// seconds that phase has been active. Throws std::invalid_argument when the
// initial state is inconsistent (unknown config/phase, elapsed out of range).
int elapsed_in_cycle(const Junction& junction);

// All cycle ends within (0, horizon - 1], ascending. A choice at the horizon
// itself could never influence the simulation, so it is not a decision point.
// Non-controllable junctions have none.
std::vector<DecisionPoint> decision_points(const Junction& junction, int horizon);

// Phase, phase-elapsed seconds and active configuration of every junction at
// second t under the given plan. The configuration chosen at a decision point
// governs from that very tick on. Throws on t outside [0, horizon] and on
// plans that do not match the instance's decision points.
std::vector<JunctionState> active_state(const Instance& instance,
                                        const SignalPlan& plan, int t);

struct StabilityViolation {
  std::string junction;
  int cycle_index = 0;
  std::string message;
};

// Checks the k-cycle stability rule: a junction may switch configuration at
// cycle c only if at least k cycles completed since the previous switch,
// counting the cycles already completed at time 0 for the first switch.
std::optional<StabilityViolation> first_stability_violation(const Instance& instance,
                                                            const SignalPlan& plan);

bool plan_respects_stability(const Instance& instance, const SignalPlan& plan);

}  // namespace corridor
