#include <doctest.h>

#include <random>
#include <string>

#include "corridor/facts.hpp"
#include "support/compare.hpp"
#include "support/fixtures.hpp"
#include "support/generators.hpp"

using namespace corridor;

TEST_SUITE("facts") {

TEST_CASE("parses the two-timing junction fixture") {
  ParseResult parsed =
      parse_instance(testgen::read_file(testgen::fixture_path("single_junction.lp")));
  CHECK(parsed.warnings.empty());
  const Instance& instance = parsed.instance;
  CHECK(instance.horizon == 48);
  CHECK(instance.bound.raw() == 0);
  REQUIRE(instance.junctions.size() == 1);

  const Junction& j1 = instance.junctions[0];
  CHECK(j1.id == "j1");
  CHECK(j1.controllable);
  CHECK(j1.min_cycles_between_changes == 2);
  CHECK(j1.cycles_since_change == 0);
  CHECK(j1.initial_config == "j1_c1");
  CHECK(j1.initial_phase == PhaseId{"j1", PhaseKind::kStage, 1});
  CHECK(j1.initial_elapsed == 4);
  REQUIRE(j1.configs.size() == 2);
  CHECK(j1.configs[0].id == "j1_c1");
  REQUIRE(j1.configs[0].phases.size() == 4);
  CHECK(j1.configs[0].phases[0].seconds == 12);
  CHECK(j1.configs[0].phases[1].seconds == 2);
  CHECK(j1.configs[0].phases[2].seconds == 7);
  CHECK(j1.configs[0].phases[3].seconds == 4);
  CHECK(j1.configs[1].phases[0].seconds == 8);
  CHECK(j1.configs[1].phases[2].seconds == 11);
}

TEST_CASE("parses the chain fixture with links, rates and counters") {
  Instance instance = testgen::load_fixture("chain.lp");
  CHECK(instance.horizon == 5);
  REQUIRE(instance.links.size() == 3);
  CHECK(instance.links[0].id == LinkId{"a", "x", "j1"});
  CHECK(instance.links[0].initial_occ.raw() == 1000000);
  CHECK(!instance.links[0].capacity.has_value());
  CHECK(!instance.links[0].is_goal());
  const Link* goal = instance.find_link({"j2", "z", "b"});
  REQUIRE(goal != nullptr);
  CHECK(goal->is_goal());
  CHECK(goal->initial_counter->raw() == 0);
  CHECK(instance.turn_rates.entries().size() == 2);
  CHECK(instance.turn_rates
            .rate_or_zero({"j1", PhaseKind::kStage, 1}, {"a", "x", "j1"}, {"j1", "y", "j2"})
            .raw() == 50000);
  CHECK(!instance.junctions[0].controllable);
}

TEST_CASE("unknown predicates produce warnings, not errors") {
  ParseResult parsed = parse_instance(
      testgen::read_file(testgen::fixture_path("single_junction.lp")) +
      "\nfoo(bar,1).\npddl_solution(link(a,b,c),5).\n");
  REQUIRE(parsed.warnings.size() == 2);
  CHECK(parsed.warnings[0].find("foo/2") != std::string::npos);
  CHECK(parsed.instance.horizon == 48);
}

TEST_CASE("variables are rejected") {
  CHECK_THROWS_WITH_AS(parse_instance("controllable(J)."),
                       doctest::Contains("variables are not allowed"), fact_error);
}

TEST_CASE("errors carry line and column") {
  try {
    parse_instance("controllable(j1).\ncontrollable(,).\n");
    FAIL("expected a parse error");
  } catch (const fact_error& e) {
    CHECK(e.line() == 2);
    CHECK(std::string(e.what()).find("line 2") != std::string::npos);
  }
}

TEST_CASE("malformed files are rejected") {
  CHECK_THROWS_AS(parse_instance("controllable(j1)"), fact_error);  // missing period
  CHECK_THROWS_AS(parse_instance("#const horizon=5.\n"), fact_error);  // no junctions
  CHECK_THROWS_AS(parse_instance("#const horizon=5. #const horizon=6. controllable(j1)."),
                  fact_error);
  CHECK_THROWS_AS(parse_instance("status(j1,stage(j1)).") , fact_error);
  CHECK_THROWS_AS(parse_instance("phase_limit(stage(j1,1),c,5.5)."), fact_error);
}

TEST_CASE("contradictory facts are rejected") {
  std::string base = testgen::read_file(testgen::fixture_path("single_junction.lp"));
  CHECK_THROWS_AS(parse_instance(base + "\nactive_t(0,j1,5).\n"), fact_error);
  CHECK_THROWS_AS(parse_instance(base + "\nactive_c(0,j1,j1_c2).\n"), fact_error);
  CHECK_THROWS_AS(parse_instance(base + "\nphase_limit(stage(j1,1),j1_c1,13).\n"),
                  fact_error);
  CHECK_THROWS_AS(parse_instance(base + "\ncount_c(j1,3).\n"), fact_error);

  std::string chain = testgen::read_file(testgen::fixture_path("chain.lp"));
  CHECK_THROWS_AS(parse_instance(chain + "\ninitial_occ(link(a,x,j1),7).\n"), fact_error);
  CHECK_THROWS_AS(
      parse_instance(chain + "\nturnrate(stage(j1,1),link(a,x,j1),link(j1,y,j2),1).\n"),
      fact_error);
}

TEST_CASE("incomplete initial state is rejected") {
  std::string text = R"(
    controllable(j1).
    available_conf(j1,c1).
    status(j1,stage(j1,1)).
    status(j1,inter(j1,1)).
    next(stage(j1,1),inter(j1,1)).
    end(inter(j1,1)).
    phase_limit(stage(j1,1),c1,5).
    phase_limit(inter(j1,1),c1,5).
    active_p(0,stage(j1,1)).
    active_t(0,j1,0).
  )";
  CHECK_THROWS_WITH_AS(parse_instance(text), doctest::Contains("active_c"), fact_error);
}

TEST_CASE("decimal input mode") {
  std::string chain = testgen::read_file(testgen::fixture_path("chain.lp"));
  // The same network written with decimal volumes.
  std::string decimal = chain;
  auto replace = [&](const std::string& from, const std::string& to) {
    std::size_t at = decimal.find(from);
    REQUIRE(at != std::string::npos);
    decimal.replace(at, from.size(), to);
  };
  replace("initial_occ(link(a,x,j1),1000000)", "initial_occ(link(a,x,j1),10.0)");
  replace("turnrate(stage(j1,1),link(a,x,j1),link(j1,y,j2),50000)",
          "turnrate(stage(j1,1),link(a,x,j1),link(j1,y,j2),0.5)");
  replace("turnrate(stage(j2,1),link(j1,y,j2),link(j2,z,b),50000)",
          "turnrate(stage(j2,1),link(j1,y,j2),link(j2,z,b),0.5)");

  ParseOptions options;
  options.decimal_input = true;
  Instance from_decimal = parse_instance(decimal, options).instance;
  Instance from_raw = parse_instance(chain).instance;
  CHECK(from_decimal == from_raw);

  // Without the flag a fractional number splits at the period and the file
  // no longer parses.
  CHECK_THROWS_AS(parse_instance(decimal), fact_error);
  // Integer durations still work in decimal mode.
  CHECK(from_decimal.junctions[0].configs[0].phases[0].seconds == 5);
}

TEST_CASE("emitted facts are byte-stable and round-trip") {
  for (const std::string name : {"single_junction.lp", "chain.lp", "fork.lp"}) {
    CAPTURE(name);
    Instance original = testgen::load_fixture(name);
    std::string emitted = emit_facts(original);
    ParseResult reparsed = parse_instance(emitted);
    CHECK(reparsed.warnings.empty());
    if (auto diff = testgen::instance_diff(original, reparsed.instance)) FAIL(*diff);
    CHECK(original == reparsed.instance);
    CHECK(emit_facts(reparsed.instance) == emitted);
  }
}

TEST_CASE("random instances round-trip through the fact format") {
  std::mt19937_64 rng(4004);
  for (int round = 0; round < 30; ++round) {
    Instance original = testgen::random_instance(rng);
    std::string emitted = emit_facts(original);
    CAPTURE(emitted);
    Instance reparsed = parse_instance(emitted).instance;
    if (auto diff = testgen::instance_diff(original, reparsed)) FAIL(*diff);
    CHECK(original == reparsed);
    CHECK(emit_facts(reparsed) == emitted);
  }
}

TEST_CASE("emit refuses per-junction stability windows") {
  Instance instance = testgen::load_fixture("chain.lp");
  instance.junctions[0].min_cycles_between_changes = 9;
  CHECK_THROWS_AS(emit_facts(instance), std::invalid_argument);
}

TEST_CASE("baseline solution facts") {
  Instance instance = testgen::load_fixture("fork.lp");
  auto baseline = parse_baseline("pddl_solution(link(j1,side_out,d),700000).", instance);
  REQUIRE(baseline.size() == 1);
  CHECK(baseline.at(LinkId{"j1", "side_out", "d"}).raw() == 700000);

  ParseOptions options;
  options.decimal_input = true;
  auto decimal = parse_baseline("pddl_solution(link(j1,side_out,d),7.0).", instance, options);
  CHECK(decimal.at(LinkId{"j1", "side_out", "d"}).raw() == 700000);

  CHECK_THROWS_AS(parse_baseline("pddl_solution(link(a,b,c),1).", instance), fact_error);
  CHECK_THROWS_AS(parse_baseline("other(link(j1,side_out,d),1).", instance), fact_error);
  CHECK_THROWS_AS(parse_baseline("#const k=1. pddl_solution(link(j1,side_out,d),1).",
                                 instance),
                  fact_error);
  CHECK_THROWS_AS(
      parse_baseline("pddl_solution(link(j1,side_out,d),1). "
                     "pddl_solution(link(j1,side_out,d),2).",
                     instance),
      fact_error);
}

TEST_CASE("solution facts are emitted sorted") {
  std::vector<std::pair<LinkId, Pcu>> counters{
      {{"j2", "z", "b"}, Pcu::from_raw(150000)},
      {{"a", "x", "j1"}, Pcu::from_raw(50000)},
  };
  std::string text = emit_solution_facts(counters);
  std::size_t first = text.find("pddl_solution(link(a,x,j1),50000)");
  std::size_t second = text.find("pddl_solution(link(j2,z,b),150000)");
  REQUIRE(first != std::string::npos);
  REQUIRE(second != std::string::npos);
  CHECK(first < second);
}

}  // TEST_SUITE
