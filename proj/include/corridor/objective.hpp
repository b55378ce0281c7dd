#pragma once

#include <string>
#include <vector>

#include "corridor/model.hpp"

namespace corridor {

enum class Quantity { kCounter, kIncrements };
enum class Sense { kMaximize, kMinimize };

// One priority level: the sum of a quantity over a set of links, maximised or
// minimised. Minimisation is folded into the value by negation so that a
// larger tier value is always better.
struct ObjectiveTier {
  Quantity quantity = Quantity::kCounter;
  Sense sense = Sense::kMaximize;
  std::vector<LinkId> links;

  friend auto operator<=>(const ObjectiveTier&, const ObjectiveTier&) = default;
};

// Tiers in priority order, compared lexicographically.
struct Objective {
  std::vector<ObjectiveTier> tiers;

  friend auto operator<=>(const Objective&, const Objective&) = default;
};

// One value per tier (minimisation already negated). std::vector compares
// lexicographically, so larger ObjectiveValue = better plan.
using ObjectiveValue = std::vector<Pcu>;

// Maximise the summed counters of all goal links — the problem's native goal.
Objective default_objective(const Instance& instance);

// Throws std::invalid_argument on: no tiers, a tier with no links, unknown
// links, counter tiers naming non-goal links, a link repeated within a tier,
// or the same link pulled in opposite senses for the same quantity.
void check_objective(const Instance& instance, const Objective& objective);

// Text form, e.g. "counter_max:link(a,y,b)+link(b,z,c);counter_min:link(c,w,d)".
// Tiers are ';'-separated; each is one of counter_max, counter_min,
// increments_max, increments_min, optionally followed by ':' and a
// '+'-separated link list (default: every goal link). The result is checked.
Objective parse_objective(const Instance& instance, const std::string& text);
std::string objective_to_string(const Objective& objective);

// Links that need occupancy-increment accounting during simulation.
std::vector<LinkId> tracked_links(const Objective& objective);

}  // namespace corridor
