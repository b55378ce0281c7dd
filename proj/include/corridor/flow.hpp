#pragma once

#include <map>
#include <string>
#include <vector>

#include "corridor/model.hpp"
#include "corridor/objective.hpp"
#include "corridor/plan.hpp"
#include "corridor/timeline.hpp"

namespace corridor {

// The corridor at one second. Counters exist for goal links only; increment
// accounting is engaged lazily for the links an occupancy objective names.
struct CorridorState {
  int t = 0;
  std::map<LinkId, Pcu> occ;
  std::map<LinkId, Pcu> counter;
  std::map<LinkId, Pcu> increments;

  friend bool operator==(const CorridorState&, const CorridorState&) = default;
};

struct TickDelta {
  LinkId link;
  Pcu delta_in;
  Pcu delta_out;

  Pcu delta_total() const { return delta_in - delta_out; }
};

struct LinkGates {
  bool not_empty = false;
  bool not_full = true;
};

// State at t = 0: occupancies and counters from the instance's initial facts,
// increments at zero for every tracked link. Throws std::invalid_argument on
// tracked links missing from the instance.
CorridorState initial_state(const Instance& instance,
                            const std::vector<LinkId>& tracked = {});

// Flow gates derived from the state one tick earlier: a link feeds its
// outgoing movements only while it holds something, and accepts incoming
// movements only while below capacity.
std::map<LinkId, LinkGates> gates(const Instance& instance, const CorridorState& prev);

// Gated in/out flow sums for one link during the tick following `prev`,
// given the phases active in that tick. Intergreens move nothing.
TickDelta tick_delta(const Instance& instance, const std::vector<JunctionState>& active,
                     const CorridorState& prev, const LinkId& link);

// One tick of the dynamics: occupancies move by the net delta, goal counters
// absorb the inflow, tracked increments absorb the net delta. Overflow in the
// fixed-point arithmetic throws std::overflow_error.
CorridorState step(const Instance& instance, const SignalPlan& plan,
                   const CorridorState& prev);

struct Trace {
  std::vector<CorridorState> states;  // index = second, size horizon + 1

  const CorridorState& at(int t) const { return states.at(static_cast<std::size_t>(t)); }
  const CorridorState& final_state() const { return states.back(); }
};

// Full deterministic run from 0 to the instance's horizon. Requires a
// structurally valid instance and a shape-valid plan (k-legality is a search
// concern, not a simulation one).
Trace simulate(const Instance& instance, const SignalPlan& plan,
               const std::vector<LinkId>& tracked = {});

// Tier values at the final state, minimisation negated. Throws
// std::invalid_argument when a tier references a link the trace does not
// carry the quantity for.
ObjectiveValue objective_value(const Trace& trace, const Objective& objective);

// CSV layout: time,link,occ_scaled,occ,counter_scaled,counter — one row per
// (second, link) in lexicographic link order; counter cells empty for links
// without a counter.
std::string trace_to_csv(const Trace& trace);

}  // namespace corridor
