#pragma once

#include <chrono>
#include <functional>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corridor/model.hpp"
#include "corridor/objective.hpp"
#include "corridor/plan.hpp"
#include "corridor/timeline.hpp"

namespace corridor {

enum class SearchMode { kDecision, kOptimise };

enum class SearchStatus {
  kSatisfied,          // decision mode found a witness
  kOptimal,            // optimisation completed; value is the true optimum
  kBestFound,          // budget ran out with an incumbent in hand
  kUnsatisfiable,      // search completed; no plan meets the constraints
  kTimeoutNoSolution,  // budget ran out before any feasible plan appeared
};

std::string to_string(SearchStatus status);

struct SearchProblem {
  Instance instance;
  Objective objective;
  SearchMode mode = SearchMode::kOptimise;
  // Externally supplied per-link counters a plan must strictly beat (by sum).
  std::optional<std::map<LinkId, Pcu>> baseline;
  std::optional<double> timeout_seconds;
  long long plan_cap = 100000;  // enumerate_all refuses larger plan spaces
};

// Normalises and validates: an empty objective becomes the default one;
// instance violations, bad objectives, non-goal baseline links or a
// non-positive timeout throw std::invalid_argument.
SearchProblem make_problem(Instance instance, Objective objective = {},
                           SearchMode mode = SearchMode::kOptimise,
                           std::optional<std::map<LinkId, Pcu>> baseline = std::nullopt,
                           std::optional<double> timeout_seconds = std::nullopt);
void check_problem(const SearchProblem& problem);

struct SearchResult {
  SearchStatus status = SearchStatus::kUnsatisfiable;
  std::optional<SignalPlan> plan;
  ObjectiveValue value;  // engaged together with plan
  long long nodes_explored = 0;  // complete plan evaluations
  std::chrono::milliseconds elapsed{0};
};

using IncumbentCallback =
    std::function<void(const SignalPlan&, const ObjectiveValue&, long long nodes)>;

// Ground-truth oracle: walks every k-legal plan. Ignores the time budget but
// refuses plan spaces beyond problem.plan_cap (std::runtime_error). Ties on
// the objective go to the lexicographically smallest configuration-id
// sequence in global decision order.
SearchResult enumerate_all(const SearchProblem& problem);

// Upper bound on the objective of any completion of `prefix` (per-junction
// choice lists, possibly truncated): the prefix is simulated exactly up to
// the first unfixed decision, then every remaining tick accrues each link's
// best ungated stage rate. Exact when the prefix is a full plan.
ObjectiveValue admissible_bound(const SearchProblem& problem, const SignalPlan& prefix);

// Depth-first branch and bound over decision points in (time, junction id)
// order, children keep-current-configuration-first. Prunes on the admissible
// relaxation, the per-goal-link bound and the baseline sum. Anytime: honours
// the wall-clock budget between node expansions and reports improving
// incumbents through the callback.
SearchResult branch_and_bound(const SearchProblem& problem,
                              const IncumbentCallback& on_incumbent = {});

// Anytime beam search: level n holds the best `width` prefixes of n choices,
// ranked by (prefix objective so far, admissible bound). Widths are nested:
// growing the beam never loses the plans a narrower beam found, so the final
// value is monotone in width, and a width no smaller than the plan space
// degenerates to exhaustive search.
SearchResult beam_search(const SearchProblem& problem, int width,
                         const IncumbentCallback& on_incumbent = {});

struct PlanReport {
  bool legal = false;  // k-stability
  std::optional<StabilityViolation> stability;
  bool bound_satisfied = false;
  std::vector<std::string> bound_failures;
  std::optional<bool> baseline_improved;  // engaged iff the problem has a baseline
  Pcu plan_total;                         // counter sum compared against the baseline
  std::optional<Pcu> baseline_total;
  ObjectiveValue value;
  std::map<LinkId, Pcu> final_counters;

  bool feasible() const {
    return legal && bound_satisfied && baseline_improved.value_or(true);
  }
};

// Full audit of one plan: k-legality, bound satisfaction, strict baseline
// improvement and the objective value. Throws std::invalid_argument on plans
// that do not fit the instance's decision points.
PlanReport check_plan(const SearchProblem& problem, const SignalPlan& plan);

// Wire form of a result: status, plan, per-tier value (scaled + decimal),
// nodes and elapsed milliseconds.
std::string result_to_json(const SearchProblem& problem, const SearchResult& result);

}  // namespace corridor
