#include "corridor/plan.hpp"

#include <stdexcept>

#include <json.hpp>

#include "corridor/timeline.hpp"

namespace corridor {

SignalPlan identity_plan(const Instance& instance) {
  SignalPlan plan;
  for (const auto& junction : instance.junctions) {
    if (!junction.controllable) continue;
    const auto points = decision_points(junction, instance.horizon);
    plan.choices[junction.id] =
        std::vector<std::string>(points.size(), junction.initial_config);
  }
  return plan;
}

void check_plan_shape(const Instance& instance, const SignalPlan& plan) {
  for (const auto& [junction_id, choices] : plan.choices) {
    const Junction* junction = instance.find_junction(junction_id);
    if (junction == nullptr) {
      throw std::invalid_argument("plan names unknown junction " + junction_id);
    }
    if (!junction->controllable) {
      throw std::invalid_argument("plan assigns configurations to non-controllable junction " +
                                  junction_id);
    }
    const auto points = decision_points(*junction, instance.horizon);
    if (choices.size() != points.size()) {
      throw std::invalid_argument(
          "plan for junction " + junction_id + " has " +
          std::to_string(choices.size()) + " choices, expected " +
          std::to_string(points.size()));
    }
    for (const auto& config : choices) {
      if (junction->find_config(config) == nullptr) {
        throw std::invalid_argument("plan chooses configuration " + config +
                                    " not available at junction " + junction_id);
      }
    }
  }
  for (const auto& junction : instance.junctions) {
    if (!junction.controllable) continue;
    if (decision_points(junction, instance.horizon).empty()) continue;
    if (plan.choices.find(junction.id) == plan.choices.end()) {
      throw std::invalid_argument("plan missing decisions for junction " + junction.id);
    }
  }
}

std::string plan_to_json(const Instance& instance, const SignalPlan& plan) {
  check_plan_shape(instance, plan);
  nlohmann::ordered_json junctions = nlohmann::ordered_json::object();
  for (const auto& [junction_id, choices] : plan.choices) {
    const Junction* junction = instance.find_junction(junction_id);
    const auto points = decision_points(*junction, instance.horizon);
    nlohmann::ordered_json entries = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < points.size(); ++i) {
      entries.push_back({{"cycle_index", points[i].cycle_index},
                         {"time", points[i].time},
                         {"config", choices[i]}});
    }
    junctions[junction_id] = std::move(entries);
  }
  nlohmann::ordered_json doc{{"junctions", std::move(junctions)}};
  return doc.dump(2) + "\n";
}

SignalPlan plan_from_json(const Instance& instance, const std::string& text) {
  nlohmann::json doc;
  try {
    doc = nlohmann::json::parse(text);
  } catch (const nlohmann::json::parse_error& err) {
    throw std::invalid_argument(std::string("plan is not valid json: ") + err.what());
  }
  if (!doc.is_object() || !doc.contains("junctions") || !doc["junctions"].is_object()) {
    throw std::invalid_argument("plan json must be an object with a \"junctions\" map");
  }

  SignalPlan plan;
  for (const auto& [junction_id, entries] : doc["junctions"].items()) {
    const Junction* junction = instance.find_junction(junction_id);
    if (junction == nullptr) {
      throw std::invalid_argument("plan names unknown junction " + junction_id);
    }
    if (!entries.is_array()) {
      throw std::invalid_argument("plan entry for junction " + junction_id +
                                  " must be an array");
    }
    const auto points = decision_points(*junction, instance.horizon);
    if (entries.size() != points.size()) {
      throw std::invalid_argument(
          "plan for junction " + junction_id + " has " +
          std::to_string(entries.size()) + " choices, expected " +
          std::to_string(points.size()));
    }
    std::vector<std::string> choices;
    choices.reserve(entries.size());
    for (std::size_t i = 0; i < entries.size(); ++i) {
      const auto& entry = entries[i];
      if (!entry.is_object() || !entry.contains("config") || !entry["config"].is_string()) {
        throw std::invalid_argument("plan entry " + std::to_string(i) + " for junction " +
                                    junction_id + " needs a \"config\" string");
      }
      if (entry.contains("cycle_index") &&
          entry["cycle_index"].get<int>() != points[i].cycle_index) {
        throw std::invalid_argument(
            "plan entry " + std::to_string(i) + " for junction " + junction_id +
            ": cycle_index " + entry["cycle_index"].dump() + " does not match " +
            std::to_string(points[i].cycle_index));
      }
      if (entry.contains("time") && entry["time"].get<int>() != points[i].time) {
        throw std::invalid_argument(
            "plan entry " + std::to_string(i) + " for junction " + junction_id +
            ": time " + entry["time"].dump() + " does not match decision point at " +
            std::to_string(points[i].time));
      }
      choices.push_back(entry["config"].get<std::string>());
    }
    plan.choices[junction_id] = std::move(choices);
  }
  check_plan_shape(instance, plan);
  return plan;
}

}  // namespace corridor
