#include <doctest.h>

#include <algorithm>
#include <climits>
#include <map>
#include <optional>
#include <random>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "corridor/search.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"
#include "support/plan_enum.hpp"
#include "support/reference_interpreter.hpp"

using namespace corridor;

namespace {

long long oracle_goal_sum(const Instance& instance, const SignalPlan& plan) {
  refsim::History history = refsim::run(instance, plan);
  long long total = 0;
  for (const Link& link : instance.links) {
    if (!link.is_goal()) continue;
    total += history.counter.back().at(refsim::link_key(link.id));
  }
  return total;
}

// Smallest final counter across the goal links; the decision question asks
// whether some plan keeps this at or above the bound.
long long oracle_goal_min(const Instance& instance, const SignalPlan& plan) {
  refsim::History history = refsim::run(instance, plan);
  long long worst = LLONG_MAX;
  for (const Link& link : instance.links) {
    if (!link.is_goal()) continue;
    worst = std::min(worst, history.counter.back().at(refsim::link_key(link.id)));
  }
  return worst;
}

SignalPlan fork_plan(const std::string& first, const std::string& second) {
  SignalPlan plan;
  plan.choices["j1"] = {first, second};
  return plan;
}

}  // namespace

TEST_SUITE("search") {

TEST_CASE("every engine finds the known optimum of the two-road fixture") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem = make_problem(instance);

  SearchResult enumerated = enumerate_all(problem);
  CHECK(enumerated.status == SearchStatus::kOptimal);
  REQUIRE(enumerated.plan.has_value());
  CHECK(*enumerated.plan == fork_plan("j1_c2", "j1_c2"));
  REQUIRE(enumerated.value.size() == 1);
  CHECK(enumerated.value[0] == Pcu::from_raw(900000));
  CHECK(enumerated.nodes_explored == 3);

  SearchResult bounded = branch_and_bound(problem);
  CHECK(bounded.status == SearchStatus::kOptimal);
  CHECK(bounded.plan == enumerated.plan);
  CHECK(bounded.value == enumerated.value);
  CHECK(bounded.nodes_explored <= enumerated.nodes_explored);

  SearchResult beamed = beam_search(problem, 3);
  CHECK(beamed.status == SearchStatus::kOptimal);
  CHECK(beamed.plan == enumerated.plan);
  CHECK(beamed.value == enumerated.value);
  CHECK(beamed.nodes_explored == 3);
}

TEST_CASE("narrow beams still report the fixture optimum, without the proof") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem = make_problem(instance);
  for (int width : {1, 2}) {
    SearchResult result = beam_search(problem, width);
    CHECK(result.status == SearchStatus::kBestFound);
    REQUIRE(result.plan.has_value());
    CHECK(result.value[0] == Pcu::from_raw(900000));
    CHECK(result.nodes_explored == width);
  }
  CHECK_THROWS_AS(beam_search(problem, 0), std::invalid_argument);
}

TEST_CASE("branch and bound reports improving incumbents") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem = make_problem(instance);
  std::vector<long long> values;
  std::vector<long long> nodes;
  SearchResult result = branch_and_bound(
      problem, [&](const SignalPlan&, const ObjectiveValue& value, long long n) {
        values.push_back(value[0].raw());
        nodes.push_back(n);
      });
  REQUIRE(values.size() == 2);
  CHECK(values[0] == 700000);
  CHECK(values[1] == 900000);
  CHECK(std::is_sorted(nodes.begin(), nodes.end()));
  CHECK(result.value[0].raw() == 900000);
}

TEST_CASE("engines agree with the scripted plan walk on random instances") {
  std::mt19937_64 rng(6001);
  for (int round = 0; round < 30; ++round) {
    Instance instance = testgen::random_instance(rng);
    std::vector<SignalPlan> plans = planenum::all_legal_plans(instance);
    REQUIRE(!plans.empty());

    long long best = LLONG_MIN;
    for (const SignalPlan& plan : plans)
      best = std::max(best, oracle_goal_sum(instance, plan));

    SearchProblem problem = make_problem(instance);
    SearchResult enumerated = enumerate_all(problem);
    CAPTURE(round);
    CHECK(enumerated.nodes_explored == static_cast<long long>(plans.size()));
    REQUIRE(enumerated.value.size() == 1);
    CHECK(enumerated.value[0].raw() == best);
    REQUIRE(enumerated.plan.has_value());
    CHECK(oracle_goal_sum(instance, *enumerated.plan) == best);

    // Equal-bound subtrees may be pruned, so branch and bound promises some
    // optimal plan, not the enumeration order's canonical one.
    SearchResult bounded = branch_and_bound(problem);
    CHECK(bounded.value == enumerated.value);
    CHECK(bounded.status == SearchStatus::kOptimal);
    CHECK(bounded.nodes_explored <= enumerated.nodes_explored);
    REQUIRE(bounded.plan.has_value());
    CHECK(oracle_goal_sum(instance, *bounded.plan) == best);

    SearchResult beamed = beam_search(problem, static_cast<int>(plans.size()));
    CHECK(beamed.status == SearchStatus::kOptimal);
    CHECK(beamed.value == enumerated.value);
    CHECK(beamed.plan == enumerated.plan);
  }
}

TEST_CASE("beam value is monotone in the width and lands on the optimum") {
  std::mt19937_64 rng(6101);
  for (int round = 0; round < 15; ++round) {
    Instance instance = testgen::random_instance(rng);
    SearchProblem problem = make_problem(instance);
    SearchResult enumerated = enumerate_all(problem);
    int plan_count = static_cast<int>(planenum::count_legal_plans(instance));

    std::optional<ObjectiveValue> previous;
    for (int width : {1, 2, 4, 8, 16, 32}) {
      if (width > plan_count) break;
      SearchResult result = beam_search(problem, width);
      CAPTURE(round);
      CAPTURE(width);
      REQUIRE(result.plan.has_value());
      CHECK(check_plan(problem, *result.plan).legal);
      CHECK(check_plan(problem, *result.plan).value == result.value);
      if (previous) CHECK(!(result.value < *previous));
      previous = result.value;
    }
    SearchResult full = beam_search(problem, plan_count);
    CHECK(full.status == SearchStatus::kOptimal);
    CHECK(full.value == enumerated.value);
  }
}

TEST_CASE("decision mode matches plan-by-plan bound checking") {
  std::mt19937_64 rng(6201);
  for (int round = 0; round < 15; ++round) {
    Instance instance = testgen::random_instance(rng);
    std::vector<SignalPlan> plans = planenum::all_legal_plans(instance);
    long long best_min = LLONG_MIN;
    for (const SignalPlan& plan : plans)
      best_min = std::max(best_min, oracle_goal_min(instance, plan));
    CAPTURE(round);

    instance.bound = Pcu::from_raw(best_min);
    SearchProblem reachable = make_problem(instance, {}, SearchMode::kDecision);
    SearchResult yes = branch_and_bound(reachable);
    CHECK(yes.status == SearchStatus::kSatisfied);
    REQUIRE(yes.plan.has_value());
    CHECK(oracle_goal_min(instance, *yes.plan) >= best_min);
    CHECK(check_plan(reachable, *yes.plan).feasible());

    instance.bound = Pcu::from_raw(best_min + 1);
    SearchProblem hopeless = make_problem(instance, {}, SearchMode::kDecision);
    SearchResult no = branch_and_bound(hopeless);
    CHECK(no.status == SearchStatus::kUnsatisfiable);
    CHECK(!no.plan.has_value());
    CHECK(enumerate_all(hopeless).status == SearchStatus::kUnsatisfiable);
  }
}

TEST_CASE("the admissible relaxation never undercuts a completion") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem = make_problem(instance);

  ObjectiveValue full = admissible_bound(problem, fork_plan("j1_c2", "j1_c2"));
  CHECK(full == enumerate_all(problem).value);  // exact on a full plan

  SignalPlan empty_prefix;
  empty_prefix.choices["j1"] = {};
  ObjectiveValue root = admissible_bound(problem, empty_prefix);
  CHECK(root[0].raw() >= 900000);

  SignalPlan keep_first;
  keep_first.choices["j1"] = {"j1_c1"};
  ObjectiveValue after_keep = admissible_bound(problem, keep_first);
  CHECK(after_keep[0].raw() >= 700000);

  SignalPlan bad;
  bad.choices["j1"] = {"nonsense"};
  CHECK_THROWS_AS(admissible_bound(problem, bad), std::invalid_argument);
}

TEST_CASE("the admissible relaxation is exact on full random plans") {
  std::mt19937_64 rng(6301);
  for (int round = 0; round < 10; ++round) {
    Instance instance = testgen::random_instance(rng);
    SearchProblem problem = make_problem(instance);
    for (const SignalPlan& plan : planenum::all_legal_plans(instance)) {
      CAPTURE(round);
      CHECK(admissible_bound(problem, plan) == check_plan(problem, plan).value);
    }
  }
}

TEST_CASE("a strict baseline rules out the plan that produced it") {
  Instance instance = testgen::load_fixture("fork.lp");
  LinkId goal{"j1", "side_out", "d"};

  std::map<LinkId, Pcu> weak{{goal, Pcu::from_raw(700000)}};
  SearchProblem improvable =
      make_problem(instance, {}, SearchMode::kOptimise, weak);
  SearchResult improved = branch_and_bound(improvable);
  CHECK(improved.status == SearchStatus::kOptimal);
  CHECK(improved.value[0].raw() == 900000);

  PlanReport identity = check_plan(improvable, fork_plan("j1_c1", "j1_c1"));
  CHECK(identity.legal);
  CHECK(identity.baseline_improved == false);
  CHECK(!identity.feasible());
  CHECK(identity.plan_total == Pcu::from_raw(700000));
  CHECK(identity.baseline_total == Pcu::from_raw(700000));

  std::map<LinkId, Pcu> tight{{goal, Pcu::from_raw(900000)}};
  SearchProblem stuck = make_problem(instance, {}, SearchMode::kOptimise, tight);
  CHECK(branch_and_bound(stuck).status == SearchStatus::kUnsatisfiable);
  CHECK(enumerate_all(stuck).status == SearchStatus::kUnsatisfiable);
}

TEST_CASE("plan audits spell out bound failures") {
  Instance instance = testgen::load_fixture("fork.lp");
  instance.bound = pcu_from_decimal("8");
  SearchProblem problem = make_problem(instance);

  PlanReport good = check_plan(problem, fork_plan("j1_c2", "j1_c2"));
  CHECK(good.legal);
  CHECK(good.bound_satisfied);
  CHECK(good.bound_failures.empty());
  CHECK(good.feasible());
  CHECK(good.value[0].raw() == 900000);
  CHECK(good.final_counters.at(LinkId{"j1", "side_out", "d"}) == Pcu::from_raw(900000));

  PlanReport weak = check_plan(problem, fork_plan("j1_c1", "j1_c1"));
  CHECK(weak.legal);
  CHECK(!weak.bound_satisfied);
  REQUIRE(weak.bound_failures.size() == 1);
  CHECK(weak.bound_failures[0].find("side_out") != std::string::npos);
  CHECK(!weak.feasible());

  // Switching away and back inside the stability window is illegal.
  PlanReport illegal = check_plan(problem, fork_plan("j1_c2", "j1_c1"));
  CHECK(!illegal.legal);
  REQUIRE(illegal.stability.has_value());
  CHECK(!illegal.feasible());

  SignalPlan short_plan;
  short_plan.choices["j1"] = {"j1_c1"};
  CHECK_THROWS_AS(check_plan(problem, short_plan), std::invalid_argument);
}

TEST_CASE("an exhausted time budget is reported, not papered over") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem =
      make_problem(instance, {}, SearchMode::kOptimise, std::nullopt, 1e-9);

  SearchResult bounded = branch_and_bound(problem);
  CHECK(bounded.status == SearchStatus::kTimeoutNoSolution);
  CHECK(!bounded.plan.has_value());
  CHECK(bounded.nodes_explored == 0);

  SearchResult beamed = beam_search(problem, 4);
  CHECK(beamed.status == SearchStatus::kTimeoutNoSolution);
  CHECK(!beamed.plan.has_value());

  // The exhaustive oracle deliberately ignores the budget.
  CHECK(enumerate_all(problem).status == SearchStatus::kOptimal);
}

TEST_CASE("exhaustive enumeration refuses oversized plan spaces") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem = make_problem(instance);
  problem.plan_cap = 2;
  CHECK_THROWS_WITH_AS(enumerate_all(problem),
                       doctest::Contains("plan space exceeds the cap"),
                       std::runtime_error);
  CHECK(branch_and_bound(problem).status == SearchStatus::kOptimal);
}

TEST_CASE("problem construction validates its pieces") {
  Instance instance = testgen::load_fixture("fork.lp");

  Instance broken = instance;
  broken.junctions[0].configs[0].phases[0].seconds = 1;
  CHECK_THROWS_AS(make_problem(broken), std::invalid_argument);

  std::map<LinkId, Pcu> stray{{LinkId{"a", "main_in", "j1"}, Pcu::from_raw(1)}};
  CHECK_THROWS_AS(make_problem(instance, {}, SearchMode::kOptimise, stray),
                  std::invalid_argument);

  CHECK_THROWS_AS(
      make_problem(instance, {}, SearchMode::kOptimise, std::nullopt, 0.0),
      std::invalid_argument);

  SearchProblem problem = make_problem(instance);
  problem.plan_cap = 0;
  CHECK_THROWS_AS(check_problem(problem), std::invalid_argument);

  CHECK(make_problem(instance).objective.tiers.size() == 1);
}

TEST_CASE("results serialise with status, plan, value and counters") {
  Instance instance = testgen::load_fixture("fork.lp");
  SearchProblem problem = make_problem(instance);
  SearchResult result = branch_and_bound(problem);

  nlohmann::json doc = nlohmann::json::parse(result_to_json(problem, result));
  CHECK(doc["status"] == "optimal");
  CHECK(doc["nodes_explored"].get<long long>() >= 1);
  CHECK(doc["elapsed_ms"].is_number());
  REQUIRE(doc["value"].size() == 1);
  CHECK(doc["value"][0]["scaled"] == 900000);
  CHECK(doc["value"][0]["decimal"] == "9.00000");
  REQUIRE(doc["plan"].is_object());
  CHECK(doc["plan"]["junctions"]["j1"].size() == 2);
  CHECK(doc["plan"]["junctions"]["j1"][0]["config"] == "j1_c2");
  CHECK(doc["plan"]["junctions"]["j1"][0]["time"] == 21);

  instance.bound = pcu_from_decimal("100");
  SearchProblem hopeless = make_problem(instance);
  nlohmann::json empty =
      nlohmann::json::parse(result_to_json(hopeless, branch_and_bound(hopeless)));
  CHECK(empty["status"] == "unsatisfiable");
  CHECK(empty["plan"].is_null());
}

TEST_CASE("status names are stable") {
  CHECK(to_string(SearchStatus::kSatisfied) == "satisfied");
  CHECK(to_string(SearchStatus::kOptimal) == "optimal");
  CHECK(to_string(SearchStatus::kBestFound) == "best-found");
  CHECK(to_string(SearchStatus::kUnsatisfiable) == "unsatisfiable");
  CHECK(to_string(SearchStatus::kTimeoutNoSolution) == "timeout-no-solution");
}

TEST_CASE("decision mode stops at the first witness") {
  Instance instance = testgen::load_fixture("fork.lp");
  instance.bound = pcu_from_decimal("9");
  SearchProblem problem = make_problem(instance, {}, SearchMode::kDecision);

  SearchResult result = branch_and_bound(problem);
  CHECK(result.status == SearchStatus::kSatisfied);
  REQUIRE(result.plan.has_value());
  CHECK(check_plan(problem, *result.plan).feasible());

  instance.bound = pcu_from_decimal("9.00001");
  CHECK(branch_and_bound(make_problem(instance, {}, SearchMode::kDecision)).status ==
        SearchStatus::kUnsatisfiable);
}

}  // TEST_SUITE
