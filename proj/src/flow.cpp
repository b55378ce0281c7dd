#include "corridor/flow.hpp"

#include <algorithm>
#include <set>
#include <sstream>
#include <stdexcept>

namespace corridor {

namespace {

const JunctionState* state_of(const std::vector<JunctionState>& active,
                              const std::string& junction) {
  for (const JunctionState& s : active)
    if (s.junction == junction) return &s;
  return nullptr;
}

bool stage_active(const std::vector<JunctionState>& active, const PhaseId& stage) {
  const JunctionState* s = state_of(active, stage.junction);
  return s != nullptr && s->phase == stage;
}

}  // namespace

CorridorState initial_state(const Instance& instance, const std::vector<LinkId>& tracked) {
  CorridorState state;
  state.t = 0;
  for (const Link& link : instance.links) {
    state.occ[link.id] = link.initial_occ;
    if (link.initial_counter) state.counter[link.id] = *link.initial_counter;
  }
  for (const LinkId& id : tracked) {
    if (!instance.find_link(id))
      throw std::invalid_argument("tracked link " + to_string(id) + " is not in the instance");
    state.increments[id] = Pcu{};
  }
  return state;
}

std::map<LinkId, LinkGates> gates(const Instance& instance, const CorridorState& prev) {
  std::map<LinkId, LinkGates> out;
  for (const Link& link : instance.links) {
    Pcu occ = prev.occ.at(link.id);
    LinkGates g;
    g.not_empty = occ > Pcu{};
    g.not_full = !link.capacity || occ < *link.capacity;
    out[link.id] = g;
  }
  return out;
}

TickDelta tick_delta(const Instance& instance, const std::vector<JunctionState>& active,
                     const CorridorState& prev, const LinkId& link) {
  std::map<LinkId, LinkGates> gate = gates(instance, prev);
  TickDelta delta;
  delta.link = link;
  for (const TurnRateTable::Entry& entry : instance.turn_rates.entries()) {
    if (entry.stage.kind != PhaseKind::kStage) continue;
    if (!stage_active(active, entry.stage)) continue;
    if (entry.to == link && gate.at(entry.from).not_empty && gate.at(link).not_full)
      delta.delta_in += entry.rate_per_second;
    if (entry.from == link && gate.at(link).not_empty && gate.at(entry.to).not_full)
      delta.delta_out += entry.rate_per_second;
  }
  return delta;
}

CorridorState step(const Instance& instance, const SignalPlan& plan,
                   const CorridorState& prev) {
  CorridorState next = prev;
  next.t = prev.t + 1;
  std::vector<JunctionState> active = active_state(instance, plan, next.t);
  for (const Link& link : instance.links) {
    TickDelta delta = tick_delta(instance, active, prev, link.id);
    next.occ[link.id] = prev.occ.at(link.id) + delta.delta_total();
    if (auto it = next.counter.find(link.id); it != next.counter.end())
      it->second = it->second + delta.delta_in;
    if (auto it = next.increments.find(link.id); it != next.increments.end())
      it->second = it->second + delta.delta_total();
  }
  return next;
}

Trace simulate(const Instance& instance, const SignalPlan& plan,
               const std::vector<LinkId>& tracked) {
  if (auto violations = validate(instance); !violations.empty())
    throw std::invalid_argument("instance is not valid: " + violations.front().message);
  check_plan_shape(instance, plan);

  Trace trace;
  trace.states.push_back(initial_state(instance, tracked));
  for (int t = 1; t <= instance.horizon; ++t)
    trace.states.push_back(step(instance, plan, trace.states.back()));
  return trace;
}

ObjectiveValue objective_value(const Trace& trace, const Objective& objective) {
  const CorridorState& final_state = trace.final_state();
  ObjectiveValue value;
  for (const ObjectiveTier& tier : objective.tiers) {
    Pcu sum;
    for (const LinkId& id : tier.links) {
      const std::map<LinkId, Pcu>& source =
          tier.quantity == Quantity::kCounter ? final_state.counter : final_state.increments;
      auto it = source.find(id);
      if (it == source.end())
        throw std::invalid_argument(
            to_string(id) + (tier.quantity == Quantity::kCounter
                                 ? " carries no counter in this trace"
                                 : " carries no increment accounting in this trace"));
      sum = sum + it->second;
    }
    value.push_back(tier.sense == Sense::kMaximize ? sum : -sum);
  }
  return value;
}

std::string trace_to_csv(const Trace& trace) {
  std::ostringstream out;
  out << "time,link,occ_scaled,occ,counter_scaled,counter\n";
  for (const CorridorState& state : trace.states) {
    for (const auto& [id, occ] : state.occ) {
      out << state.t << ',' << to_string(id) << ',' << occ.raw() << ',' << occ.to_decimal()
          << ',';
      if (auto it = state.counter.find(id); it != state.counter.end())
        out << it->second.raw() << ',' << it->second.to_decimal();
      else
        out << ',';
      out << '\n';
    }
  }
  return out.str();
}

}  // namespace corridor
