#include "corridor/timeline.hpp"

#include <algorithm>
#include <stdexcept>

namespace corridor {

int cycle_duration(const Configuration& config) {
  int total = 0;
  for (const auto& pd : config.phases) total += pd.seconds;
  return total;
}

std::vector<PhaseRange> phase_ranges(const Configuration& config) {
  std::vector<PhaseRange> out;
  out.reserve(config.phases.size());
  int begin = 0;
  for (const auto& pd : config.phases) {
    out.push_back({pd.phase, begin, begin + pd.seconds - 1});
    begin += pd.seconds;
  }
  return out;
}

int elapsed_in_cycle(const Junction& junction) {
  const Configuration* config = junction.find_config(junction.initial_config);
  if (config == nullptr) {
    throw std::invalid_argument("junction " + junction.id +
                                ": unknown initial configuration " +
                                junction.initial_config);
  }
  for (const auto& range : phase_ranges(*config)) {
    if (range.phase != junction.initial_phase) continue;
    const int duration = range.end - range.begin + 1;
    if (junction.initial_elapsed < 0 || junction.initial_elapsed >= duration) {
      throw std::invalid_argument(
          "junction " + junction.id + ": initial elapsed " +
          std::to_string(junction.initial_elapsed) + " outside phase " +
          to_string(junction.initial_phase) + " of duration " +
          std::to_string(duration));
    }
    return range.begin + junction.initial_elapsed;
  }
  throw std::invalid_argument("junction " + junction.id + ": initial phase " +
                              to_string(junction.initial_phase) +
                              " not part of configuration " + config->id);
}

std::vector<DecisionPoint> decision_points(const Junction& junction, int horizon) {
  std::vector<DecisionPoint> out;
  if (!junction.controllable || junction.configs.empty()) return out;
  const int duration = cycle_duration(junction.configs.front());
  if (duration <= 0) return out;
  const int start_offset = elapsed_in_cycle(junction);
  for (int cycle = 1;; ++cycle) {
    const int time = cycle * duration - start_offset;
    if (time > horizon - 1) break;
    if (time > 0) out.push_back({cycle, time});
  }
  return out;
}

namespace {

const Configuration& config_or_throw(const Junction& junction, const std::string& id) {
  const Configuration* config = junction.find_config(id);
  if (config == nullptr) {
    throw std::invalid_argument("junction " + junction.id +
                                ": unknown configuration " + id);
  }
  return *config;
}

const std::vector<std::string>* plan_entry(const SignalPlan& plan,
                                           const std::string& junction) {
  auto it = plan.choices.find(junction);
  return it == plan.choices.end() ? nullptr : &it->second;
}

}  // namespace

std::vector<JunctionState> active_state(const Instance& instance,
                                        const SignalPlan& plan, int t) {
  if (t < 0 || t > instance.horizon) {
    throw std::invalid_argument("time " + std::to_string(t) +
                                " outside simulation range [0, " +
                                std::to_string(instance.horizon) + "]");
  }
  check_plan_shape(instance, plan);

  std::vector<JunctionState> out;
  out.reserve(instance.junctions.size());
  for (const auto& junction : instance.junctions) {
    const int duration = cycle_duration(junction.configs.front());
    const int start_offset = elapsed_in_cycle(junction);
    const auto points = decision_points(junction, instance.horizon);
    const auto* choices = plan_entry(plan, junction.id);

    // The configuration chosen at the latest decision point at or before t;
    // before the first cycle end the initial one governs.
    std::string governing = junction.initial_config;
    for (std::size_t i = 0; i < points.size(); ++i) {
      if (points[i].time <= t) governing = (*choices)[i];
    }

    const Configuration& config = config_or_throw(junction, governing);
    const int rel = (start_offset + t) % duration;
    for (const auto& range : phase_ranges(config)) {
      if (rel >= range.begin && rel <= range.end) {
        out.push_back({junction.id, range.phase, rel - range.begin, config.id});
        break;
      }
    }
  }
  return out;
}

std::optional<StabilityViolation> first_stability_violation(const Instance& instance,
                                                            const SignalPlan& plan) {
  check_plan_shape(instance, plan);
  for (const auto& junction : instance.junctions) {
    if (!junction.controllable) continue;
    const auto* choices = plan_entry(plan, junction.id);
    if (choices == nullptr) continue;

    const int stability = junction.min_cycles_between_changes;
    std::string active = junction.initial_config;
    // Cycle index of the most recent switch; the pre-simulation switch sits
    // cycles_since_change completed cycles before time 0.
    int last_change = -junction.cycles_since_change;
    for (std::size_t i = 0; i < choices->size(); ++i) {
      const int cycle = static_cast<int>(i) + 1;
      const std::string& chosen = (*choices)[i];
      if (chosen == active) continue;
      if (cycle - last_change < stability) {
        return StabilityViolation{
            junction.id, cycle,
            "junction " + junction.id + ": switch to " + chosen + " at cycle " +
                std::to_string(cycle) + " after only " +
                std::to_string(cycle - last_change) + " completed cycles (minimum " +
                std::to_string(stability) + ")"};
      }
      active = chosen;
      last_change = cycle;
    }
  }
  return std::nullopt;
}

bool plan_respects_stability(const Instance& instance, const SignalPlan& plan) {
  return !first_stability_violation(instance, plan).has_value();
}

}  // namespace corridor
