#pragma once

#include <map>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

#include "corridor/model.hpp"

namespace corridor {

// Syntax or semantic failure while reading a fact file. Positions are
// 1-based; semantic errors point at the offending fact.
class fact_error : public std::runtime_error {
 public:
  fact_error(const std::string& message, int line, int column)
      : std::runtime_error("line " + std::to_string(line) + " col " +
                           std::to_string(column) + ": " + message),
        line_(line),
        column_(column) {}

  int line() const { return line_; }
  int column() const { return column_; }

 private:
  int line_;
  int column_;
};

struct ParseOptions {
  // When set, PCU-valued arguments (capacities, occupancies, turn rates,
  // counters) are read as decimals with up to five fractional digits instead
  // of pre-scaled integers. Durations and times stay plain integers.
  bool decimal_input = false;
};

struct ParseResult {
  Instance instance;
  // Unknown predicates and other recoverable oddities; never silently dropped.
  std::vector<std::string> warnings;
};

// Reads a ground-fact instance file. The vocabulary is fixed:
//   controllable/1 available_conf/2 phase_limit/3 status/2 next/2 end/1
//   link/3 precedes/2 follows/2 capacity/2 initial_occ/2 turnrate/4
//   active_p/2 active_t/3 active_c/3 initial_count/2 count_c/2
// plus #const directives for horizon, k and bound. '%' starts a line comment.
// Throws fact_error; never crashes on malformed input.
ParseResult parse_instance(std::string_view text, const ParseOptions& options = {});

// Renders an instance back into fact syntax. Deterministic and byte-stable:
// parse_instance(emit_facts(i)).instance == i for every instance expressible
// in the format (a junction-dependent stability constant is flattened to a
// single #const k when uniform).
std::string emit_facts(const Instance& instance);

// Reads pddl_solution/2 facts: the per-link counter values some external
// plan achieved, used as a strict lower bar for the search. Every link must
// exist in the instance.
std::map<LinkId, Pcu> parse_baseline(std::string_view text, const Instance& instance,
                                     const ParseOptions& options = {});

// Renders counters as pddl_solution/2 facts, sorted by link.
std::string emit_solution_facts(const std::vector<std::pair<LinkId, Pcu>>& counters);

}  // namespace corridor
