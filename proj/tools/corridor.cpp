#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corridor/facts.hpp"
#include "corridor/flow.hpp"
#include "corridor/search.hpp"
#include "corridor/timeline.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitDomain = 1;   // invalid instance, illegal plan, unsatisfiable
constexpr int kExitUsage = 2;    // bad flags, IO failures, parse failures
constexpr int kExitTimeout = 3;  // budget exhausted with no solution

struct io_error : std::runtime_error {
  using std::runtime_error::runtime_error;
};

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw io_error("cannot open " + path);
  std::ostringstream out;
  out << in.rdbuf();
  if (!in.good() && !in.eof()) throw io_error("cannot read " + path);
  return std::move(out).str();
}

void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw io_error("cannot open " + path + " for writing");
  out << content;
  if (!out.good()) throw io_error("cannot write " + path);
}

struct CommonOpts {
  std::string instance_path;
  bool decimal_input = false;
  std::optional<int> horizon;
  std::optional<int> k;
  std::optional<std::string> bound;
};

void add_common(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("-i,--instance", opts.instance_path, "Instance fact file")
      ->required();
  cmd->add_flag("--decimal-input", opts.decimal_input,
                "Accept decimal literals in fact files");
  cmd->add_option("--horizon", opts.horizon, "Override the instance horizon")
      ->check(CLI::NonNegativeNumber);
  cmd->add_option("--k", opts.k, "Override the stability window (cycles)")
      ->check(CLI::NonNegativeNumber);
}

void add_bound(CLI::App* cmd, CommonOpts& opts) {
  cmd->add_option("--bound", opts.bound,
                  "Override the per-counted-link lower bound (decimal PCU)");
}

corridor::Instance load_instance(const CommonOpts& opts) {
  corridor::ParseOptions parse_opts;
  parse_opts.decimal_input = opts.decimal_input;
  corridor::ParseResult parsed =
      corridor::parse_instance(read_file(opts.instance_path), parse_opts);
  for (const std::string& warning : parsed.warnings)
    std::cerr << "warning: " << warning << "\n";
  if (opts.horizon) parsed.instance.horizon = *opts.horizon;
  if (opts.k)
    for (corridor::Junction& junction : parsed.instance.junctions)
      junction.min_cycles_between_changes = *opts.k;
  if (opts.bound) parsed.instance.bound = corridor::pcu_from_decimal(*opts.bound);
  return std::move(parsed.instance);
}

corridor::SignalPlan load_plan(const corridor::Instance& instance,
                               const std::optional<std::string>& path) {
  if (!path) return corridor::identity_plan(instance);
  return corridor::plan_from_json(instance, read_file(*path));
}

std::string format_value(const corridor::ObjectiveValue& value) {
  std::string out = "[";
  for (std::size_t i = 0; i < value.size(); ++i) {
    if (i) out += ", ";
    out += std::to_string(value[i].raw()) + " (" + value[i].to_decimal() + ")";
  }
  return out + "]";
}

int cmd_check(const CommonOpts& opts) {
  corridor::Instance instance = load_instance(opts);
  std::vector<corridor::Violation> violations = corridor::validate(instance);
  if (violations.empty()) {
    std::cout << "ok: " << instance.junctions.size() << " junctions, "
              << instance.links.size() << " links, horizon " << instance.horizon
              << "\n";
    return kExitOk;
  }
  for (const corridor::Violation& violation : violations)
    std::cout << violation.code << ": " << violation.message << "\n";
  return kExitDomain;
}

int run_simulation(const CommonOpts& opts, const std::optional<std::string>& plan_path,
                   const std::optional<std::string>& trace_out, bool summary,
                   bool csv_to_stdout) {
  corridor::Instance instance = load_instance(opts);
  corridor::SignalPlan plan = load_plan(instance, plan_path);
  if (auto violation = corridor::first_stability_violation(instance, plan)) {
    std::cerr << "error: " << violation->message << "\n";
    return kExitDomain;
  }
  corridor::Trace trace = corridor::simulate(instance, plan);
  if (trace_out) write_file(*trace_out, corridor::trace_to_csv(trace));
  if (csv_to_stdout && !trace_out) std::cout << corridor::trace_to_csv(trace);
  if (summary) {
    const corridor::CorridorState& final_state = trace.final_state();
    std::cout << "final counters (t=" << final_state.t << "):\n";
    if (final_state.counter.empty()) {
      std::cout << "  no counted links\n";
    } else {
      corridor::Pcu total;
      for (const auto& [id, counter] : final_state.counter) {
        std::cout << "  " << corridor::to_string(id) << ": " << counter.raw() << " ("
                  << counter.to_decimal() << ")\n";
        total = total + counter;
      }
      std::cout << "  total: " << total.raw() << " (" << total.to_decimal() << ")\n";
    }
  }
  return kExitOk;
}

int cmd_solve(const CommonOpts& opts, const std::string& mode_name,
              const std::optional<std::string>& objective_spec,
              const std::optional<std::string>& baseline_path,
              const std::string& engine, int beam_width,
              const std::optional<double>& timeout,
              const std::optional<std::string>& plan_out) {
  corridor::Instance instance = load_instance(opts);

  corridor::Objective objective;
  if (objective_spec) objective = corridor::parse_objective(instance, *objective_spec);

  std::optional<std::map<corridor::LinkId, corridor::Pcu>> baseline;
  if (baseline_path) {
    corridor::ParseOptions parse_opts;
    parse_opts.decimal_input = opts.decimal_input;
    baseline = corridor::parse_baseline(read_file(*baseline_path), instance, parse_opts);
  }

  corridor::SearchMode mode = mode_name == "decision" ? corridor::SearchMode::kDecision
                                                      : corridor::SearchMode::kOptimise;
  corridor::SearchProblem problem = corridor::make_problem(
      std::move(instance), std::move(objective), mode, std::move(baseline), timeout);

  corridor::IncumbentCallback on_incumbent =
      [](const corridor::SignalPlan&, const corridor::ObjectiveValue& value,
         long long nodes) {
        std::cout << "incumbent: value=" << format_value(value) << " nodes=" << nodes
                  << "\n";
      };

  corridor::SearchResult result;
  if (engine == "exhaustive")
    result = corridor::enumerate_all(problem);
  else if (engine == "beam")
    result = corridor::beam_search(problem, beam_width, on_incumbent);
  else
    result = corridor::branch_and_bound(problem, on_incumbent);

  std::cout << corridor::result_to_json(problem, result);
  if (plan_out && result.plan)
    write_file(*plan_out, corridor::plan_to_json(problem.instance, *result.plan));

  switch (result.status) {
    case corridor::SearchStatus::kSatisfied:
    case corridor::SearchStatus::kOptimal:
    case corridor::SearchStatus::kBestFound:
      return kExitOk;
    case corridor::SearchStatus::kUnsatisfiable:
      return kExitDomain;
    case corridor::SearchStatus::kTimeoutNoSolution:
      return kExitTimeout;
  }
  return kExitDomain;
}

int cmd_emit_facts(const CommonOpts& opts, const std::optional<std::string>& plan_path) {
  corridor::Instance instance = load_instance(opts);
  std::string out = corridor::emit_facts(instance);
  if (plan_path) {
    corridor::SignalPlan plan = load_plan(instance, plan_path);
    corridor::Trace trace = corridor::simulate(instance, plan);
    std::vector<std::pair<corridor::LinkId, corridor::Pcu>> counters(
        trace.final_state().counter.begin(), trace.final_state().counter.end());
    out += "\n" + corridor::emit_solution_facts(counters);
  }
  std::cout << out;
  return kExitOk;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Fixed-point corridor traffic simulation and signal-plan search"};
  app.require_subcommand(1);

  CommonOpts check_opts;
  CLI::App* check = app.add_subcommand("check", "Validate an instance file");
  add_common(check, check_opts);

  CommonOpts sim_opts;
  std::optional<std::string> sim_plan, sim_trace_out;
  CLI::App* simulate = app.add_subcommand(
      "simulate", "Run one plan second by second and report final counters");
  add_common(simulate, sim_opts);
  simulate->add_option("--plan", sim_plan, "Plan JSON (default: keep initial configurations)");
  simulate->add_option("--trace-out", sim_trace_out, "Write the per-second trace CSV here");

  CommonOpts solve_opts;
  std::string solve_mode = "optimise";
  std::string solve_engine = "bnb";
  int solve_beam_width = 64;
  std::optional<std::string> solve_objective, solve_baseline, solve_plan_out;
  std::optional<double> solve_timeout;
  CLI::App* solve = app.add_subcommand("solve", "Search for a signal plan");
  add_common(solve, solve_opts);
  add_bound(solve, solve_opts);
  solve->add_option("--mode", solve_mode, "decision or optimise")
      ->check(CLI::IsMember({"decision", "optimise"}));
  solve->add_option("--objective", solve_objective,
                    "Objective tiers, e.g. counter_max:link(a,x,b)+link(b,y,c)");
  solve->add_option("--baseline", solve_baseline,
                    "Fact file with pddl_solution/2 counters the plan must beat");
  solve->add_option("--engine", solve_engine, "Search engine")
      ->check(CLI::IsMember({"exhaustive", "bnb", "beam"}));
  solve->add_option("--beam-width", solve_beam_width, "Beam width for --engine beam")
      ->check(CLI::PositiveNumber);
  solve->add_option("--timeout", solve_timeout, "Wall-clock budget in seconds")
      ->check(CLI::PositiveNumber);
  solve->add_option("--plan-out", solve_plan_out, "Write the winning plan JSON here");

  CommonOpts emit_opts;
  std::optional<std::string> emit_plan;
  CLI::App* emit = app.add_subcommand(
      "emit-facts", "Print the instance as a fact file (round-trip safe)");
  add_common(emit, emit_opts);
  add_bound(emit, emit_opts);
  emit->add_option("--plan", emit_plan,
                   "Also emit the plan's final counters as pddl_solution/2 facts");

  CommonOpts plot_opts;
  std::optional<std::string> plot_plan, plot_trace_out;
  CLI::App* plot = app.add_subcommand(
      "plot-data", "Emit plot-ready CSV of occupancies and counters over time");
  add_common(plot, plot_opts);
  plot->add_option("--plan", plot_plan, "Plan JSON (default: keep initial configurations)");
  plot->add_option("--trace-out", plot_trace_out, "Write the CSV here instead of stdout");

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return kExitUsage;
  }

  try {
    if (*check) return cmd_check(check_opts);
    if (*simulate)
      return run_simulation(sim_opts, sim_plan, sim_trace_out, /*summary=*/true,
                            /*csv_to_stdout=*/false);
    if (*solve)
      return cmd_solve(solve_opts, solve_mode, solve_objective, solve_baseline,
                       solve_engine, solve_beam_width, solve_timeout, solve_plan_out);
    if (*emit) return cmd_emit_facts(emit_opts, emit_plan);
    if (*plot)
      return run_simulation(plot_opts, plot_plan, plot_trace_out, /*summary=*/false,
                            /*csv_to_stdout=*/true);
  } catch (const io_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const corridor::fact_error& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitUsage;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kExitDomain;
  }
  return kExitUsage;
}
