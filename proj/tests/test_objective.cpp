#include <doctest.h>

#include <stdexcept>

#include "corridor/objective.hpp"
#include "support/fixtures.hpp"

using namespace corridor;

TEST_SUITE("objective") {

TEST_CASE("default objective maximises goal counters") {
  Instance instance = testgen::load_fixture("fork.lp");
  Objective objective = default_objective(instance);
  REQUIRE(objective.tiers.size() == 1);
  CHECK(objective.tiers[0].quantity == Quantity::kCounter);
  CHECK(objective.tiers[0].sense == Sense::kMaximize);
  REQUIRE(objective.tiers[0].links.size() == 1);
  CHECK(objective.tiers[0].links[0] == LinkId{"j1", "side_out", "d"});
}

TEST_CASE("objective text round trip") {
  Instance instance = testgen::load_fixture("fork.lp");
  Objective objective = parse_objective(
      instance, "counter_max:link(j1,side_out,d);increments_min:link(a,main_in,j1)");
  REQUIRE(objective.tiers.size() == 2);
  CHECK(objective.tiers[0].quantity == Quantity::kCounter);
  CHECK(objective.tiers[1].quantity == Quantity::kIncrements);
  CHECK(objective.tiers[1].sense == Sense::kMinimize);
  CHECK(objective_to_string(objective) ==
        "counter_max:link(j1,side_out,d);increments_min:link(a,main_in,j1)");
  CHECK(parse_objective(instance, objective_to_string(objective)).tiers.size() == 2);
}

TEST_CASE("bare tier names fall back to the goal links") {
  Instance instance = testgen::load_fixture("fork.lp");
  Objective objective = parse_objective(instance, "counter_max");
  REQUIRE(objective.tiers.size() == 1);
  CHECK(objective.tiers[0].links == instance.goal_links());
}

TEST_CASE("increments tiers may name any link") {
  Instance instance = testgen::load_fixture("fork.lp");
  Objective objective =
      parse_objective(instance, "increments_max:link(j1,main_out,b)+link(j1,side_out,d)");
  CHECK(objective.tiers[0].links.size() == 2);
  std::vector<LinkId> tracked = tracked_links(objective);
  CHECK(tracked.size() == 2);
}

TEST_CASE("counter tiers require counted links") {
  Instance instance = testgen::load_fixture("fork.lp");
  CHECK_THROWS_AS(parse_objective(instance, "counter_max:link(j1,main_out,b)"),
                  std::invalid_argument);
}

TEST_CASE("malformed objective specs are rejected") {
  Instance instance = testgen::load_fixture("fork.lp");
  CHECK_THROWS_AS(parse_objective(instance, ""), std::invalid_argument);
  CHECK_THROWS_AS(parse_objective(instance, "counter_sideways"), std::invalid_argument);
  CHECK_THROWS_AS(parse_objective(instance, "counter_max:link(a,b)"), std::invalid_argument);
  CHECK_THROWS_AS(parse_objective(instance, "counter_max:link(q,q,q)"),
                  std::invalid_argument);
  CHECK_THROWS_AS(
      parse_objective(instance, "counter_max:link(j1,side_out,d)+link(j1,side_out,d)"),
      std::invalid_argument);
}

TEST_CASE("contrasting senses on one quantity and link are rejected") {
  Instance instance = testgen::load_fixture("fork.lp");
  CHECK_THROWS_AS(
      parse_objective(instance, "counter_max:link(j1,side_out,d);counter_min:link(j1,side_out,d)"),
      std::invalid_argument);
  // The same link may appear with different quantities.
  Objective mixed = parse_objective(
      instance, "counter_max:link(j1,side_out,d);increments_min:link(j1,side_out,d)");
  CHECK(mixed.tiers.size() == 2);
}

TEST_CASE("check_objective rejects empty structures") {
  Instance instance = testgen::load_fixture("fork.lp");
  Objective empty;
  CHECK_THROWS_AS(check_objective(instance, empty), std::invalid_argument);
  Objective no_links;
  no_links.tiers.push_back({Quantity::kIncrements, Sense::kMaximize, {}});
  CHECK_THROWS_AS(check_objective(instance, no_links), std::invalid_argument);
}

}  // TEST_SUITE
