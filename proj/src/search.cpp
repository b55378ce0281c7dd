#include "corridor/search.hpp"

#include <algorithm>
#include <chrono>
#include <cstdint>
#include <limits>
#include <stdexcept>

#include <json.hpp>

#include "corridor/simulator.hpp"

namespace corridor {

namespace {

std::int64_t checked_add(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_add_overflow(a, b, &out))
    throw std::overflow_error("fixed-point overflow in search bookkeeping");
  return out;
}

std::int64_t checked_mul(std::int64_t a, std::int64_t b) {
  std::int64_t out;
  if (__builtin_mul_overflow(a, b, &out))
    throw std::overflow_error("fixed-point overflow in search bookkeeping");
  return out;
}

std::int64_t checked_neg(std::int64_t a) {
  std::int64_t out;
  if (__builtin_sub_overflow(std::int64_t{0}, a, &out))
    throw std::overflow_error("fixed-point overflow in search bookkeeping");
  return out;
}

using Clock = std::chrono::steady_clock;

// The search engines share one compiled view of the problem: dense objective
// and constraint indices on top of the Simulator, the global decision order,
// and the invariants every engine relies on. A node of depth n is a choice
// vector of length n with its state advanced to target(n): the tick just
// before decision n fires (the horizon once all decisions are fixed).
class Engine {
 public:
  explicit Engine(const SearchProblem& problem)
      : problem_(problem), sim_(problem.instance, tracked_links(problem.objective)) {
    bound_raw_ = problem.instance.bound.raw();

    for (const ObjectiveTier& tier : problem_.objective.tiers) {
      Tier compiled;
      compiled.counter = tier.quantity == Quantity::kCounter;
      compiled.maximize = tier.sense == Sense::kMaximize;
      for (const LinkId& id : tier.links) {
        int value_index =
            compiled.counter ? sim_.goal_index(id) : sim_.tracked_index(id);
        compiled.ix.emplace_back(value_index, sim_.link_index(id));
      }
      tiers_.push_back(std::move(compiled));
    }

    for (int g = 0; g < sim_.goal_count(); ++g)
      goals_.emplace_back(g, sim_.link_index(sim_.goal_link(g)));

    if (problem_.baseline) {
      std::int64_t total = 0;
      for (const auto& [id, value] : *problem_.baseline) {
        baseline_ix_.emplace_back(sim_.goal_index(id), sim_.link_index(id));
        total = checked_add(total, value.raw());
      }
      baseline_total_ = total;
    }

    for (int j = 0; j < sim_.junction_count(); ++j) {
      std::vector<int> order(static_cast<std::size_t>(sim_.config_count(j)));
      for (std::size_t i = 0; i < order.size(); ++i) order[i] = static_cast<int>(i);
      std::sort(order.begin(), order.end(), [&](int a, int b) {
        return sim_.config_id(j, a) < sim_.config_id(j, b);
      });
      lex_order_.push_back(std::move(order));
    }

    if (problem_.timeout_seconds)
      deadline_ = Clock::now() + std::chrono::duration_cast<Clock::duration>(
                                     std::chrono::duration<double>(*problem_.timeout_seconds));
  }

  const Simulator& sim() const { return sim_; }
  int decision_count() const { return static_cast<int>(sim_.decisions().size()); }

  int target(int n) const {
    return n < decision_count() ? sim_.decisions()[static_cast<std::size_t>(n)].time - 1
                                : sim_.horizon();
  }

  Simulator::State root_state() const {
    Simulator::State state = sim_.initial_state();
    sim_.advance(state, {}, target(0));
    return state;
  }

  bool expired() const { return deadline_ && Clock::now() >= *deadline_; }

  ObjectiveValue value_of(const Simulator::State& state) const {
    ObjectiveValue value;
    value.reserve(tiers_.size());
    for (const Tier& tier : tiers_) {
      std::int64_t sum = 0;
      for (const auto& [value_index, link] : tier.ix) {
        std::int64_t v = tier.counter ? state.counter[static_cast<std::size_t>(value_index)]
                                      : state.increments[static_cast<std::size_t>(value_index)];
        sum = checked_add(sum, v);
      }
      value.push_back(Pcu::from_raw(tier.maximize ? sum : checked_neg(sum)));
    }
    return value;
  }

  std::int64_t counter_ub(const Simulator::State& state, int goal, int link) const {
    std::int64_t remaining = sim_.horizon() - state.t;
    return checked_add(state.counter[static_cast<std::size_t>(goal)],
                       checked_mul(remaining, sim_.max_in_rate(link)));
  }

  ObjectiveValue upper_bound(const Simulator::State& state) const {
    std::int64_t remaining = sim_.horizon() - state.t;
    ObjectiveValue value;
    value.reserve(tiers_.size());
    for (const Tier& tier : tiers_) {
      std::int64_t sum = 0;
      for (const auto& [value_index, link] : tier.ix) {
        std::int64_t v;
        if (tier.counter) {
          std::int64_t now = state.counter[static_cast<std::size_t>(value_index)];
          // Counters never decrease: the ungated inflow ceiling bounds growth
          // from above, the current value bounds it from below.
          v = tier.maximize
                  ? checked_add(now, checked_mul(remaining, sim_.max_in_rate(link)))
                  : checked_neg(now);
        } else {
          std::int64_t now = state.increments[static_cast<std::size_t>(value_index)];
          v = tier.maximize
                  ? checked_add(now, checked_mul(remaining, sim_.max_in_rate(link)))
                  : checked_add(checked_neg(now),
                                checked_mul(remaining, sim_.max_out_rate(link)));
        }
        sum = checked_add(sum, v);
      }
      value.push_back(Pcu::from_raw(sum));
    }
    return value;
  }

  // False when no completion of the node can satisfy the bound / baseline.
  bool constraints_reachable(const Simulator::State& state) const {
    for (const auto& [goal, link] : goals_)
      if (counter_ub(state, goal, link) < bound_raw_) return false;
    if (baseline_total_) {
      std::int64_t sum = 0;
      for (const auto& [goal, link] : baseline_ix_)
        sum = checked_add(sum, counter_ub(state, goal, link));
      if (sum <= *baseline_total_) return false;
    }
    return true;
  }

  bool leaf_feasible(const Simulator::State& state) const {
    for (const auto& [goal, link] : goals_)
      if (state.counter[static_cast<std::size_t>(goal)] < bound_raw_) return false;
    if (baseline_total_) {
      std::int64_t sum = 0;
      for (const auto& [goal, link] : baseline_ix_)
        sum = checked_add(sum, state.counter[static_cast<std::size_t>(goal)]);
      if (sum <= *baseline_total_) return false;
    }
    return true;
  }

  // Child configurations of one decision: the active configuration first (a
  // switch that violates k-stability taints every completion, so illegal
  // switches are not generated at all), then the others by id.
  std::vector<int> children(const Simulator::Decision& decision, int active_config,
                            int last_change) const {
    std::vector<int> out;
    out.push_back(active_config);
    if (decision.cycle_index - last_change >= sim_.stability(decision.junction)) {
      for (int config : lex_order_[static_cast<std::size_t>(decision.junction)])
        if (config != active_config) out.push_back(config);
    }
    return out;
  }

  bool seq_less(const std::vector<int>& a, const std::vector<int>& b) const {
    for (std::size_t i = 0; i < a.size() && i < b.size(); ++i) {
      const Simulator::Decision& d = sim_.decisions()[i];
      const std::string& ida = sim_.config_id(d.junction, a[i]);
      const std::string& idb = sim_.config_id(d.junction, b[i]);
      if (ida != idb) return ida < idb;
    }
    return a.size() < b.size();
  }

  long long raw_plan_space() const {
    long long product = 1;
    for (const Simulator::Decision& d : sim_.decisions()) {
      int options = sim_.config_count(d.junction);
      if (product > std::numeric_limits<long long>::max() / options)
        return std::numeric_limits<long long>::max();
      product *= options;
    }
    return product;
  }

  std::vector<int> initial_configs() const {
    std::vector<int> out;
    for (int j = 0; j < sim_.junction_count(); ++j) out.push_back(sim_.initial_config(j));
    return out;
  }

  std::vector<int> initial_changes() const {
    std::vector<int> out;
    for (int j = 0; j < sim_.junction_count(); ++j) out.push_back(-sim_.initial_cycles(j));
    return out;
  }

 private:
  struct Tier {
    bool counter = true;
    bool maximize = true;
    std::vector<std::pair<int, int>> ix;  // (goal/tracked index, link index)
  };

  const SearchProblem& problem_;
  Simulator sim_;
  std::int64_t bound_raw_ = 0;
  std::vector<Tier> tiers_;
  std::vector<std::pair<int, int>> goals_;        // (goal index, link index)
  std::vector<std::pair<int, int>> baseline_ix_;  // (goal index, link index)
  std::optional<std::int64_t> baseline_total_;
  std::vector<std::vector<int>> lex_order_;  // per junction, config indices by id
  std::optional<Clock::time_point> deadline_;
};

// Depth-first traversal shared by the oracle and branch-and-bound. The oracle
// visits every k-legal leaf; branch-and-bound additionally prunes nodes whose
// relaxation cannot reach the constraints or beat the incumbent.
struct Walker {
  Engine& engine;
  bool prune;         // branch-and-bound pruning on
  bool use_timeout;
  bool stop_at_first; // decision mode: any feasible leaf ends the search
  const IncumbentCallback& on_incumbent;

  std::vector<int> choices;
  std::vector<int> active_config;
  std::vector<int> last_change;

  std::optional<std::vector<int>> best_choices;
  ObjectiveValue best_value;
  long long nodes = 0;
  bool expired = false;

  Walker(Engine& engine, bool prune, bool use_timeout, bool stop_at_first,
         const IncumbentCallback& on_incumbent)
      : engine(engine),
        prune(prune),
        use_timeout(use_timeout),
        stop_at_first(stop_at_first),
        on_incumbent(on_incumbent),
        active_config(engine.initial_configs()),
        last_change(engine.initial_changes()) {}

  // Returns true to unwind the whole search.
  bool walk(const Simulator::State& state, int n) {
    if (use_timeout && engine.expired()) {
      expired = true;
      return true;
    }

    if (n == engine.decision_count()) {
      ++nodes;
      if (!engine.leaf_feasible(state)) return false;
      ObjectiveValue value = engine.value_of(state);
      bool better = !best_choices || value > best_value ||
                    (value == best_value && engine.seq_less(choices, *best_choices));
      if (better) {
        best_choices = choices;
        best_value = value;
        if (on_incumbent) on_incumbent(engine.sim().decode_plan(choices), value, nodes);
      }
      return stop_at_first;
    }

    if (prune) {
      if (!engine.constraints_reachable(state)) return false;
      if (best_choices && !(engine.upper_bound(state) > best_value)) return false;
    }

    const Simulator::Decision& decision =
        engine.sim().decisions()[static_cast<std::size_t>(n)];
    int j = decision.junction;
    int saved_config = active_config[static_cast<std::size_t>(j)];
    int saved_change = last_change[static_cast<std::size_t>(j)];

    for (int config : engine.children(decision, saved_config, saved_change)) {
      choices.push_back(config);
      if (config != saved_config) {
        active_config[static_cast<std::size_t>(j)] = config;
        last_change[static_cast<std::size_t>(j)] = decision.cycle_index;
      }
      Simulator::State child = state;
      engine.sim().advance(child, choices, engine.target(n + 1));
      bool stop = walk(child, n + 1);
      active_config[static_cast<std::size_t>(j)] = saved_config;
      last_change[static_cast<std::size_t>(j)] = saved_change;
      choices.pop_back();
      if (stop) return true;
    }
    return false;
  }
};

SearchResult finish(Engine& engine, Walker& walker, SearchMode mode,
                    Clock::time_point started) {
  SearchResult result;
  result.nodes_explored = walker.nodes;
  result.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  if (walker.best_choices) {
    result.plan = engine.sim().decode_plan(*walker.best_choices);
    result.value = walker.best_value;
    if (mode == SearchMode::kDecision)
      result.status = SearchStatus::kSatisfied;
    else
      result.status = walker.expired ? SearchStatus::kBestFound : SearchStatus::kOptimal;
  } else {
    result.status = walker.expired ? SearchStatus::kTimeoutNoSolution
                                   : SearchStatus::kUnsatisfiable;
  }
  return result;
}

}  // namespace

std::string to_string(SearchStatus status) {
  switch (status) {
    case SearchStatus::kSatisfied: return "satisfied";
    case SearchStatus::kOptimal: return "optimal";
    case SearchStatus::kBestFound: return "best-found";
    case SearchStatus::kUnsatisfiable: return "unsatisfiable";
    case SearchStatus::kTimeoutNoSolution: return "timeout-no-solution";
  }
  return "unknown";
}

void check_problem(const SearchProblem& problem) {
  if (auto violations = validate(problem.instance); !violations.empty())
    throw std::invalid_argument("instance is not valid: " + violations.front().message);
  check_objective(problem.instance, problem.objective);
  if (problem.baseline) {
    for (const auto& [id, value] : *problem.baseline) {
      const Link* link = problem.instance.find_link(id);
      if (!link) throw std::invalid_argument("baseline names unknown link " + to_string(id));
      if (!link->is_goal())
        throw std::invalid_argument("baseline names " + to_string(id) +
                                    " which is not a goal link");
    }
  }
  if (problem.timeout_seconds && *problem.timeout_seconds <= 0)
    throw std::invalid_argument("timeout must be positive");
  if (problem.plan_cap < 1) throw std::invalid_argument("plan cap must be at least 1");
}

SearchProblem make_problem(Instance instance, Objective objective, SearchMode mode,
                           std::optional<std::map<LinkId, Pcu>> baseline,
                           std::optional<double> timeout_seconds) {
  SearchProblem problem;
  problem.instance = std::move(instance);
  problem.objective =
      objective.tiers.empty() ? default_objective(problem.instance) : std::move(objective);
  problem.mode = mode;
  problem.baseline = std::move(baseline);
  problem.timeout_seconds = timeout_seconds;
  check_problem(problem);
  return problem;
}

SearchResult enumerate_all(const SearchProblem& problem) {
  check_problem(problem);
  auto started = Clock::now();
  Engine engine(problem);
  if (engine.raw_plan_space() > problem.plan_cap)
    throw std::runtime_error("plan space exceeds the cap of " +
                             std::to_string(problem.plan_cap) + " plans");
  Walker walker(engine, /*prune=*/false, /*use_timeout=*/false,
                problem.mode == SearchMode::kDecision, {});
  walker.walk(engine.root_state(), 0);
  return finish(engine, walker, problem.mode, started);
}

SearchResult branch_and_bound(const SearchProblem& problem,
                              const IncumbentCallback& on_incumbent) {
  check_problem(problem);
  auto started = Clock::now();
  Engine engine(problem);
  Walker walker(engine, /*prune=*/true, /*use_timeout=*/true,
                problem.mode == SearchMode::kDecision, on_incumbent);
  walker.walk(engine.root_state(), 0);
  return finish(engine, walker, problem.mode, started);
}

ObjectiveValue admissible_bound(const SearchProblem& problem, const SignalPlan& prefix) {
  check_problem(problem);
  Engine engine(problem);
  const Simulator& sim = engine.sim();

  std::vector<int> choices;
  std::map<int, int> consumed;
  for (const Simulator::Decision& decision : sim.decisions()) {
    const std::string& id = sim.junction_id(decision.junction);
    auto it = prefix.choices.find(id);
    int used = consumed[decision.junction];
    if (it == prefix.choices.end() || used >= static_cast<int>(it->second.size())) break;
    try {
      choices.push_back(
          sim.config_index(decision.junction, it->second[static_cast<std::size_t>(used)]));
    } catch (const std::out_of_range& e) {
      throw std::invalid_argument(e.what());
    }
    ++consumed[decision.junction];
  }

  Simulator::State state = sim.initial_state();
  sim.advance(state, choices, engine.target(static_cast<int>(choices.size())));
  return engine.upper_bound(state);
}

SearchResult beam_search(const SearchProblem& problem, int width,
                         const IncumbentCallback& on_incumbent) {
  check_problem(problem);
  if (width < 1) throw std::invalid_argument("beam width must be at least 1");
  auto started = Clock::now();
  Engine engine(problem);

  struct Node {
    std::vector<int> choices;
    Simulator::State state;
    std::vector<int> active_config;
    std::vector<int> last_change;
  };
  struct Candidate {
    Node node;
    ObjectiveValue value;  // prefix objective at the node's time
    ObjectiveValue bound;
    int parent_slot = 0;
  };

  Node root{{}, engine.root_state(), engine.initial_configs(), engine.initial_changes()};
  std::vector<Node> beam;
  beam.push_back(std::move(root));
  bool complete = true;
  bool expired = false;

  const int total = engine.decision_count();
  for (int n = 0; n < total && !expired; ++n) {
    std::vector<Candidate> candidates;
    const Simulator::Decision& decision =
        engine.sim().decisions()[static_cast<std::size_t>(n)];
    for (std::size_t slot = 0; slot < beam.size(); ++slot) {
      if (engine.expired()) {
        expired = true;
        break;
      }
      Node& parent = beam[slot];
      int j = decision.junction;
      int current = parent.active_config[static_cast<std::size_t>(j)];
      int change = parent.last_change[static_cast<std::size_t>(j)];
      for (int config : engine.children(decision, current, change)) {
        Candidate candidate;
        candidate.node.choices = parent.choices;
        candidate.node.choices.push_back(config);
        candidate.node.active_config = parent.active_config;
        candidate.node.last_change = parent.last_change;
        if (config != current) {
          candidate.node.active_config[static_cast<std::size_t>(j)] = config;
          candidate.node.last_change[static_cast<std::size_t>(j)] = decision.cycle_index;
        }
        candidate.node.state = parent.state;
        engine.sim().advance(candidate.node.state, candidate.node.choices,
                             engine.target(n + 1));
        candidate.value = engine.value_of(candidate.node.state);
        candidate.bound = engine.upper_bound(candidate.node.state);
        candidate.parent_slot = static_cast<int>(slot);
        candidates.push_back(std::move(candidate));
      }
    }
    if (expired) break;

    std::sort(candidates.begin(), candidates.end(), [&](const Candidate& a, const Candidate& b) {
      if (a.value != b.value) return a.value > b.value;
      if (a.bound != b.bound) return a.bound > b.bound;
      return engine.seq_less(a.node.choices, b.node.choices);
    });

    // Slot j takes the best remaining candidate whose parent sat in slots
    // 0..j. This keeps narrower beams prefixes of wider ones, which is what
    // makes the final value monotone in the width; since every node has at
    // least one child (keeping the configuration is always legal), slots
    // fill contiguously and width ≥ plan-space size keeps every candidate.
    std::vector<Node> next;
    std::vector<bool> taken(candidates.size(), false);
    for (int slot = 0; slot < width && next.size() < candidates.size(); ++slot) {
      for (std::size_t c = 0; c < candidates.size(); ++c) {
        if (taken[c] || candidates[c].parent_slot > slot) continue;
        taken[c] = true;
        next.push_back(std::move(candidates[c].node));
        break;
      }
    }
    if (next.size() < candidates.size()) complete = false;
    beam = std::move(next);
  }

  SearchResult result;
  std::optional<std::vector<int>> best_choices;
  ObjectiveValue best_value;
  if (!expired) {
    for (const Node& node : beam) {
      ++result.nodes_explored;
      if (!engine.leaf_feasible(node.state)) continue;
      ObjectiveValue value = engine.value_of(node.state);
      bool better = !best_choices || value > best_value ||
                    (value == best_value && engine.seq_less(node.choices, *best_choices));
      if (better) {
        best_choices = node.choices;
        best_value = value;
      }
    }
  }

  result.elapsed =
      std::chrono::duration_cast<std::chrono::milliseconds>(Clock::now() - started);
  if (best_choices) {
    result.plan = engine.sim().decode_plan(*best_choices);
    result.value = best_value;
    if (on_incumbent) on_incumbent(*result.plan, result.value, result.nodes_explored);
    if (problem.mode == SearchMode::kDecision)
      result.status = SearchStatus::kSatisfied;
    else
      result.status = complete ? SearchStatus::kOptimal : SearchStatus::kBestFound;
  } else {
    // Without a solution the statuses split on whether the beam provably saw
    // the whole plan space: a dropped candidate means the width budget ran
    // out, reported like any other exhausted budget.
    result.status = (complete && !expired) ? SearchStatus::kUnsatisfiable
                                           : SearchStatus::kTimeoutNoSolution;
  }
  return result;
}

PlanReport check_plan(const SearchProblem& problem, const SignalPlan& plan) {
  check_problem(problem);
  check_plan_shape(problem.instance, plan);
  Engine engine(problem);
  const Simulator& sim = engine.sim();

  PlanReport report;
  report.stability = first_stability_violation(problem.instance, plan);
  report.legal = !report.stability.has_value();

  std::vector<int> choices = sim.encode_plan(plan);
  Simulator::State state = sim.initial_state();
  sim.advance(state, choices, sim.horizon());

  for (int g = 0; g < sim.goal_count(); ++g)
    report.final_counters[sim.goal_link(g)] =
        Pcu::from_raw(state.counter[static_cast<std::size_t>(g)]);

  report.bound_satisfied = true;
  for (const auto& [id, counter] : report.final_counters) {
    if (counter < problem.instance.bound) {
      report.bound_satisfied = false;
      report.bound_failures.push_back(to_string(id) + ": counter " + counter.to_decimal() +
                                      " below bound " +
                                      problem.instance.bound.to_decimal());
    }
  }

  if (problem.baseline) {
    Pcu plan_sum, baseline_sum;
    for (const auto& [id, value] : *problem.baseline) {
      plan_sum = plan_sum + report.final_counters.at(id);
      baseline_sum = baseline_sum + value;
    }
    report.plan_total = plan_sum;
    report.baseline_total = baseline_sum;
    report.baseline_improved = plan_sum > baseline_sum;
  } else {
    Pcu plan_sum;
    for (const auto& [id, counter] : report.final_counters) plan_sum = plan_sum + counter;
    report.plan_total = plan_sum;
  }

  report.value = engine.value_of(state);
  return report;
}

std::string result_to_json(const SearchProblem& problem, const SearchResult& result) {
  nlohmann::ordered_json doc;
  doc["status"] = to_string(result.status);
  if (result.plan)
    doc["plan"] = nlohmann::ordered_json::parse(plan_to_json(problem.instance, *result.plan));
  else
    doc["plan"] = nullptr;
  nlohmann::ordered_json value = nlohmann::ordered_json::array();
  for (const Pcu& tier : result.value)
    value.push_back({{"scaled", tier.raw()}, {"decimal", tier.to_decimal()}});
  doc["value"] = std::move(value);
  doc["nodes_explored"] = result.nodes_explored;
  doc["elapsed_ms"] = result.elapsed.count();
  return doc.dump(2) + "\n";
}

}  // namespace corridor
