#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "corridor/model.hpp"
#include "corridor/plan.hpp"

namespace corridor {

// Index-compiled instance for fast repeated plan evaluation: string keys are
// resolved to dense indices once, phase lookup becomes a table read, and the
// per-link flow lists are flattened. Construction validates the instance.
//
// Plans are flat choice vectors: one configuration index per decision point,
// decision points globally ordered by (time, junction id). A prefix of that
// vector is a partial plan; advance() only ever consumes the choices whose
// decision time has been reached.
class Simulator {
 public:
  struct Decision {
    int junction = 0;     // junction index
    int cycle_index = 0;  // 1-based cycle count of that junction
    int time = 0;         // absolute second
  };

  struct State {
    int t = 0;
    int next_decision = 0;               // count of decisions already applied
    std::vector<std::int64_t> occ;        // by link index
    std::vector<std::int64_t> counter;    // by goal index
    std::vector<std::int64_t> increments; // by tracked index
    std::vector<int> config;              // active config index by junction
  };

  // tracked: links that carry increment accounting. Throws
  // std::invalid_argument on validation violations or unknown tracked links.
  explicit Simulator(const Instance& instance, std::vector<LinkId> tracked = {});

  int horizon() const { return horizon_; }
  int junction_count() const { return static_cast<int>(junction_ids_.size()); }
  int link_count() const { return static_cast<int>(link_ids_.size()); }
  int goal_count() const { return static_cast<int>(goal_links_.size()); }
  int tracked_count() const { return static_cast<int>(tracked_links_.size()); }

  const std::vector<Decision>& decisions() const { return decisions_; }
  const std::string& junction_id(int junction) const { return junction_ids_.at(junction); }
  const LinkId& link_id(int link) const { return link_ids_.at(link); }
  const LinkId& goal_link(int goal) const { return goal_links_.at(goal); }
  const LinkId& tracked_link(int tracked) const { return tracked_links_.at(tracked); }

  // All index lookups throw std::out_of_range on unknown names.
  int junction_index(const std::string& id) const;
  int link_index(const LinkId& id) const;
  int goal_index(const LinkId& id) const;
  int tracked_index(const LinkId& id) const;
  int config_count(int junction) const;
  int config_index(int junction, const std::string& config_id) const;
  const std::string& config_id(int junction, int config) const;
  int initial_config(int junction) const;
  int stability(int junction) const;        // that junction's k
  int initial_cycles(int junction) const;   // completed cycles at time 0

  State initial_state() const;

  // Runs the dynamics tick by tick up to `to_t` (inclusive), consuming
  // choices for every decision point whose time falls in the advanced span.
  // Throws std::out_of_range when a needed choice is missing and
  // std::overflow_error on fixed-point overflow.
  void advance(State& state, std::span<const int> choices, int to_t) const;

  // Per-second flow ceilings used by the search relaxation: the largest
  // ungated stage-sum of turn rates into / out of a link.
  std::int64_t max_in_rate(int link) const { return links_[link].max_in_rate; }
  std::int64_t max_out_rate(int link) const { return links_[link].max_out_rate; }

  std::vector<int> encode_plan(const SignalPlan& plan) const;
  SignalPlan decode_plan(std::span<const int> choices) const;

 private:
  struct Flow {
    int other = 0;     // counterpart link index
    int junction = 0;  // junction whose stage gates this movement
    int phase_pos = 0; // position of that stage in the junction's cycle
    std::int64_t rate = 0;
  };

  struct CompiledLink {
    bool bounded = false;
    std::int64_t capacity = 0;
    std::int64_t initial_occ = 0;
    int goal = -1;
    int tracked = -1;
    std::vector<Flow> in;   // movements into this link
    std::vector<Flow> out;  // movements out of this link
    std::int64_t max_in_rate = 0;
    std::int64_t max_out_rate = 0;
  };

  struct CompiledJunction {
    std::string id;
    int duration = 0;
    int start_offset = 0;  // seconds of the cycle already spent at time 0
    bool controllable = false;
    int initial_config = 0;
    int stability = 4;
    int initial_cycles = 0;
    std::vector<std::string> config_ids;
    // config * duration + rel -> phase position in the cycle
    std::vector<int> phase_pos_at_rel;
  };

  int horizon_ = 0;
  std::vector<std::string> junction_ids_;
  std::vector<CompiledJunction> junctions_;
  std::vector<LinkId> link_ids_;
  std::vector<CompiledLink> links_;
  std::vector<LinkId> goal_links_;
  std::vector<std::int64_t> goal_initial_;
  std::vector<LinkId> tracked_links_;
  std::vector<Decision> decisions_;
};

}  // namespace corridor
