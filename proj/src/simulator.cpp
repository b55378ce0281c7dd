#include "corridor/simulator.hpp"

#include <algorithm>
#include <map>
#include <stdexcept>

#include "corridor/timeline.hpp"

namespace corridor {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw std::overflow_error("fixed-point overflow while accumulating flow");
  return out;
}

std::int64_t checked_sub(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_sub_overflow(a, b, &out))
    throw std::overflow_error("fixed-point overflow while accumulating flow");
  return out;
}

}  // namespace

Simulator::Simulator(const Instance& instance, std::vector<LinkId> tracked) {
  if (auto violations = validate(instance); !violations.empty())
    throw std::invalid_argument("instance is not valid: " + violations.front().message);

  horizon_ = instance.horizon;

  std::vector<const Junction*> ordered;
  for (const Junction& junction : instance.junctions) ordered.push_back(&junction);
  std::sort(ordered.begin(), ordered.end(),
            [](const Junction* a, const Junction* b) { return a->id < b->id; });

  std::map<std::string, int> junction_index;
  std::vector<std::vector<PhaseId>> chains;
  for (const Junction* junction : ordered) {
    CompiledJunction cj;
    cj.id = junction->id;
    cj.duration = cycle_duration(junction->configs.front());
    cj.start_offset = elapsed_in_cycle(*junction);
    cj.controllable = junction->controllable;
    cj.stability = junction->min_cycles_between_changes;
    cj.initial_cycles = junction->cycles_since_change;

    std::vector<PhaseId> chain;
    for (const PhaseDuration& pd : junction->configs.front().phases) chain.push_back(pd.phase);

    for (const Configuration& config : junction->configs) {
      cj.config_ids.push_back(config.id);
      std::vector<PhaseRange> ranges = phase_ranges(config);
      std::vector<int> pos_at_rel(static_cast<std::size_t>(cj.duration), 0);
      for (std::size_t pos = 0; pos < ranges.size(); ++pos)
        for (int rel = ranges[pos].begin; rel <= ranges[pos].end; ++rel)
          pos_at_rel[static_cast<std::size_t>(rel)] = static_cast<int>(pos);
      cj.phase_pos_at_rel.insert(cj.phase_pos_at_rel.end(), pos_at_rel.begin(),
                                 pos_at_rel.end());
    }
    cj.initial_config = static_cast<int>(
        std::find(cj.config_ids.begin(), cj.config_ids.end(), junction->initial_config) -
        cj.config_ids.begin());

    junction_index.emplace(cj.id, static_cast<int>(junctions_.size()));
    junction_ids_.push_back(cj.id);
    junctions_.push_back(std::move(cj));
    chains.push_back(std::move(chain));
  }

  std::map<LinkId, int> link_index;
  for (const Link& link : instance.links) {
    CompiledLink cl;
    cl.bounded = link.capacity.has_value();
    cl.capacity = cl.bounded ? link.capacity->raw() : 0;
    cl.initial_occ = link.initial_occ.raw();
    if (link.initial_counter) {
      cl.goal = static_cast<int>(goal_links_.size());
      goal_links_.push_back(link.id);
      goal_initial_.push_back(link.initial_counter->raw());
    }
    link_index.emplace(link.id, static_cast<int>(link_ids_.size()));
    link_ids_.push_back(link.id);
    links_.push_back(std::move(cl));
  }

  std::sort(tracked.begin(), tracked.end());
  tracked.erase(std::unique(tracked.begin(), tracked.end()), tracked.end());
  for (const LinkId& id : tracked) {
    auto it = link_index.find(id);
    if (it == link_index.end())
      throw std::invalid_argument("tracked link " + to_string(id) + " is not in the instance");
    links_[static_cast<std::size_t>(it->second)].tracked =
        static_cast<int>(tracked_links_.size());
    tracked_links_.push_back(id);
  }

  for (const TurnRateTable::Entry& entry : instance.turn_rates.entries()) {
    int j = junction_index.at(entry.stage.junction);
    const std::vector<PhaseId>& chain = chains[static_cast<std::size_t>(j)];
    int pos = static_cast<int>(std::find(chain.begin(), chain.end(), entry.stage) -
                               chain.begin());
    int from = link_index.at(entry.from);
    int to = link_index.at(entry.to);
    Flow flow{0, j, pos, entry.rate_per_second.raw()};
    flow.other = from;
    links_[static_cast<std::size_t>(to)].in.push_back(flow);
    flow.other = to;
    links_[static_cast<std::size_t>(from)].out.push_back(flow);
  }

  for (CompiledLink& link : links_) {
    auto ceiling = [](std::vector<Flow>& flows) {
      std::sort(flows.begin(), flows.end(), [](const Flow& a, const Flow& b) {
        return std::tie(a.junction, a.phase_pos, a.other) <
               std::tie(b.junction, b.phase_pos, b.other);
      });
      std::map<std::pair<int, int>, std::int64_t> per_stage;
      for (const Flow& f : flows) {
        auto& sum = per_stage[std::make_pair(f.junction, f.phase_pos)];
        sum = checked_add(sum, f.rate);
      }
      std::int64_t best = 0;
      for (const auto& [key, sum] : per_stage) best = std::max(best, sum);
      return best;
    };
    link.max_in_rate = ceiling(link.in);
    link.max_out_rate = ceiling(link.out);
  }

  std::vector<Decision> decisions;
  for (const auto& [id, j] : junction_index) {
    const Junction* junction = instance.find_junction(id);
    for (const DecisionPoint& point : decision_points(*junction, horizon_))
      decisions.push_back(Decision{j, point.cycle_index, point.time});
  }
  std::sort(decisions.begin(), decisions.end(),
            [this](const Decision& a, const Decision& b) {
              return std::tie(a.time, junction_ids_[static_cast<std::size_t>(a.junction)]) <
                     std::tie(b.time, junction_ids_[static_cast<std::size_t>(b.junction)]);
            });
  decisions_ = std::move(decisions);
}

int Simulator::junction_index(const std::string& id) const {
  for (std::size_t i = 0; i < junction_ids_.size(); ++i)
    if (junction_ids_[i] == id) return static_cast<int>(i);
  throw std::out_of_range("unknown junction " + id);
}

int Simulator::link_index(const LinkId& id) const {
  for (std::size_t i = 0; i < link_ids_.size(); ++i)
    if (link_ids_[i] == id) return static_cast<int>(i);
  throw std::out_of_range("unknown link " + to_string(id));
}

int Simulator::goal_index(const LinkId& id) const {
  int link = link_index(id);
  if (links_[static_cast<std::size_t>(link)].goal < 0)
    throw std::out_of_range(to_string(id) + " is not a goal link");
  return links_[static_cast<std::size_t>(link)].goal;
}

int Simulator::tracked_index(const LinkId& id) const {
  int link = link_index(id);
  if (links_[static_cast<std::size_t>(link)].tracked < 0)
    throw std::out_of_range(to_string(id) + " is not a tracked link");
  return links_[static_cast<std::size_t>(link)].tracked;
}

int Simulator::config_count(int junction) const {
  return static_cast<int>(junctions_.at(static_cast<std::size_t>(junction)).config_ids.size());
}

int Simulator::config_index(int junction, const std::string& config_id) const {
  const CompiledJunction& cj = junctions_.at(static_cast<std::size_t>(junction));
  for (std::size_t i = 0; i < cj.config_ids.size(); ++i)
    if (cj.config_ids[i] == config_id) return static_cast<int>(i);
  throw std::out_of_range("junction " + cj.id + " has no configuration " + config_id);
}

const std::string& Simulator::config_id(int junction, int config) const {
  return junctions_.at(static_cast<std::size_t>(junction))
      .config_ids.at(static_cast<std::size_t>(config));
}

int Simulator::initial_config(int junction) const {
  return junctions_.at(static_cast<std::size_t>(junction)).initial_config;
}

int Simulator::stability(int junction) const {
  return junctions_.at(static_cast<std::size_t>(junction)).stability;
}

int Simulator::initial_cycles(int junction) const {
  return junctions_.at(static_cast<std::size_t>(junction)).initial_cycles;
}

Simulator::State Simulator::initial_state() const {
  State state;
  state.t = 0;
  state.next_decision = 0;
  state.occ.reserve(links_.size());
  for (const CompiledLink& link : links_) state.occ.push_back(link.initial_occ);
  state.counter = goal_initial_;
  state.increments.assign(tracked_links_.size(), 0);
  state.config.reserve(junctions_.size());
  for (const CompiledJunction& junction : junctions_) state.config.push_back(junction.initial_config);
  return state;
}

void Simulator::advance(State& state, std::span<const int> choices, int to_t) const {
  if (to_t < state.t || to_t > horizon_)
    throw std::out_of_range("cannot advance from t=" + std::to_string(state.t) + " to t=" +
                            std::to_string(to_t));

  const std::size_t n_links = links_.size();
  std::vector<int> active_pos(junctions_.size(), 0);
  std::vector<char> not_empty(n_links, 0);
  std::vector<char> not_full(n_links, 0);

  for (int t = state.t + 1; t <= to_t; ++t) {
    while (state.next_decision < static_cast<int>(decisions_.size()) &&
           decisions_[static_cast<std::size_t>(state.next_decision)].time == t) {
      if (state.next_decision >= static_cast<int>(choices.size()))
        throw std::out_of_range("plan prefix ends before decision at t=" + std::to_string(t));
      const Decision& d = decisions_[static_cast<std::size_t>(state.next_decision)];
      state.config[static_cast<std::size_t>(d.junction)] =
          choices[static_cast<std::size_t>(state.next_decision)];
      ++state.next_decision;
    }

    for (std::size_t j = 0; j < junctions_.size(); ++j) {
      const CompiledJunction& cj = junctions_[j];
      int rel = (cj.start_offset + t) % cj.duration;
      active_pos[j] =
          cj.phase_pos_at_rel[static_cast<std::size_t>(state.config[j] * cj.duration + rel)];
    }

    for (std::size_t l = 0; l < n_links; ++l) {
      std::int64_t occ = state.occ[l];
      not_empty[l] = occ > 0;
      not_full[l] = !links_[l].bounded || occ < links_[l].capacity;
    }

    for (std::size_t l = 0; l < n_links; ++l) {
      const CompiledLink& link = links_[l];
      std::int64_t delta_in = 0;
      if (not_full[l]) {
        for (const Flow& f : link.in) {
          if (active_pos[static_cast<std::size_t>(f.junction)] == f.phase_pos &&
              not_empty[static_cast<std::size_t>(f.other)])
            delta_in = checked_add(delta_in, f.rate);
        }
      }
      std::int64_t delta_out = 0;
      if (not_empty[l]) {
        for (const Flow& f : link.out) {
          if (active_pos[static_cast<std::size_t>(f.junction)] == f.phase_pos &&
              not_full[static_cast<std::size_t>(f.other)])
            delta_out = checked_add(delta_out, f.rate);
        }
      }
      std::int64_t total = checked_sub(delta_in, delta_out);
      state.occ[l] = checked_add(state.occ[l], total);
      if (link.goal >= 0)
        state.counter[static_cast<std::size_t>(link.goal)] =
            checked_add(state.counter[static_cast<std::size_t>(link.goal)], delta_in);
      if (link.tracked >= 0)
        state.increments[static_cast<std::size_t>(link.tracked)] =
            checked_add(state.increments[static_cast<std::size_t>(link.tracked)], total);
    }
    state.t = t;
  }
  state.t = to_t;
}

std::vector<int> Simulator::encode_plan(const SignalPlan& plan) const {
  std::vector<int> choices;
  std::map<int, int> seen;  // junction index -> choices consumed so far
  for (const Decision& d : decisions_) {
    const std::string& id = junction_ids_[static_cast<std::size_t>(d.junction)];
    auto it = plan.choices.find(id);
    if (it == plan.choices.end())
      throw std::invalid_argument("plan has no choices for junction " + id);
    int used = seen[d.junction]++;
    if (used >= static_cast<int>(it->second.size()))
      throw std::invalid_argument("plan for junction " + id + " ends before cycle " +
                                  std::to_string(d.cycle_index));
    choices.push_back(config_index(d.junction, it->second[static_cast<std::size_t>(used)]));
  }
  return choices;
}

SignalPlan Simulator::decode_plan(std::span<const int> choices) const {
  if (choices.size() != decisions_.size())
    throw std::invalid_argument("choice vector length " + std::to_string(choices.size()) +
                                " does not match " + std::to_string(decisions_.size()) +
                                " decision points");
  SignalPlan plan;
  for (std::size_t j = 0; j < junctions_.size(); ++j)
    if (junctions_[j].controllable) plan.choices[junction_ids_[j]] = {};
  for (std::size_t i = 0; i < decisions_.size(); ++i) {
    const Decision& d = decisions_[i];
    plan.choices[junction_ids_[static_cast<std::size_t>(d.junction)]].push_back(
        config_id(d.junction, choices[i]));
  }
  return plan;
}

}  // namespace corridor
