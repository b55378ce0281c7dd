#pragma once

#include <map>
#include <string>
#include <vector>

#include "corridor/model.hpp"

namespace corridor {

// A configuration choice for every decision point of every controllable
// junction, in cycle order. Junctions without an entry are the
// non-controllable ones; they keep cycling under their initial configuration.
struct SignalPlan {
  std::map<std::string, std::vector<std::string>> choices;

  friend auto operator<=>(const SignalPlan&, const SignalPlan&) = default;
};

// The plan that keeps every junction on its initial configuration.
SignalPlan identity_plan(const Instance& instance);

// Throws std::invalid_argument when the plan does not fit the instance:
// entries for unknown or non-controllable junctions, a missing or surplus
// choice, or a configuration that is not available at its junction.
void check_plan_shape(const Instance& instance, const SignalPlan& plan);

// JSON wire form: {"junctions": {"j1": [{"cycle_index":1,"time":21,"config":"j1_c1"}]}}
std::string plan_to_json(const Instance& instance, const SignalPlan& plan);
SignalPlan plan_from_json(const Instance& instance, const std::string& text);

}  // namespace corridor
