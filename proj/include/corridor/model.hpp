#pragma once

#include <compare>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "corridor/pcu.hpp"

namespace corridor {

enum class PhaseKind { kStage, kIntergreen };

// One slot of a junction cycle: either a traffic-light stage or the all-red
// intergreen that follows it. Rendered in fact files as stage(j,n) / inter(j,n).
struct PhaseId {
  std::string junction;
  PhaseKind kind = PhaseKind::kStage;
  int index = 0;

  friend auto operator<=>(const PhaseId&, const PhaseId&) = default;
};

std::string to_string(const PhaseId& phase);

struct PhaseDuration {
  PhaseId phase;
  int seconds = 0;  // >= 1 in a valid configuration

  friend auto operator<=>(const PhaseDuration&, const PhaseDuration&) = default;
};

// A full assignment of durations to every phase of a junction's cycle. All
// configurations of one junction share the phase sequence and total length;
// they differ only in how the seconds are split.
struct Configuration {
  std::string id;
  std::string junction;
  std::vector<PhaseDuration> phases;  // cycle order, ends with the final intergreen

  friend auto operator<=>(const Configuration&, const Configuration&) = default;
};

// Directed road link. Endpoints that are not modelled junctions are corridor
// boundaries; traffic appears from / disappears into them freely.
struct LinkId {
  std::string from;
  std::string label;
  std::string to;

  friend auto operator<=>(const LinkId&, const LinkId&) = default;
};

std::string to_string(const LinkId& link);

struct Link {
  LinkId id;
  std::optional<Pcu> capacity;       // nullopt: never fills up
  Pcu initial_occ;
  std::optional<Pcu> initial_counter;  // engaged exactly for goal links

  bool is_goal() const { return initial_counter.has_value(); }

  friend auto operator<=>(const Link&, const Link&) = default;
};

struct Junction {
  std::string id;
  bool controllable = false;
  std::vector<Configuration> configs;  // sorted by id
  PhaseId initial_phase;
  int initial_elapsed = 0;             // seconds the initial phase has been active
  std::string initial_config;
  int cycles_since_change = 0;         // completed cycles at time 0 with this config
  int min_cycles_between_changes = 4;  // the per-junction stability constant k

  const Configuration* find_config(const std::string& config_id) const;

  friend auto operator<=>(const Junction&, const Junction&) = default;
};

// Flow rates between links while a given stage is green. Absent keys (and any
// intergreen phase) read as exactly zero.
class TurnRateTable {
 public:
  struct Entry {
    PhaseId stage;
    LinkId from;
    LinkId to;
    Pcu rate_per_second;

    friend auto operator<=>(const Entry&, const Entry&) = default;
  };

  void set(const PhaseId& stage, const LinkId& from, const LinkId& to, Pcu rate);
  Pcu rate_or_zero(const PhaseId& phase, const LinkId& from, const LinkId& to) const;
  // The stored value regardless of phase kind; nullopt when no entry exists.
  std::optional<Pcu> rate(const PhaseId& stage, const LinkId& from, const LinkId& to) const;
  const std::vector<Entry>& entries() const { return entries_; }
  bool contains(const PhaseId& stage, const LinkId& from, const LinkId& to) const;

  friend auto operator<=>(const TurnRateTable&, const TurnRateTable&) = default;

 private:
  std::vector<Entry> entries_;  // kept sorted by (stage, from, to)
};

// The whole corridor description plus the run parameters that sit outside the
// fact vocabulary (horizon, bound; k lives on each junction).
struct Instance {
  std::vector<Junction> junctions;  // sorted by id
  std::vector<Link> links;          // sorted by id
  TurnRateTable turn_rates;
  int horizon = 0;     // seconds; simulation covers t = 0..horizon
  Pcu bound;           // per-goal-link lower bound on the final counter

  const Junction* find_junction(const std::string& id) const;
  const Link* find_link(const LinkId& id) const;
  std::vector<LinkId> goal_links() const;

  friend auto operator<=>(const Instance&, const Instance&) = default;
};

struct Violation {
  std::string code;     // stable machine-readable tag, e.g. "cycle-length-mismatch"
  std::string message;

  friend auto operator<=>(const Violation&, const Violation&) = default;
};

// Structural validation. Violations are data, not failures: the result is the
// complete sorted list, empty when the instance is well-formed. Deterministic
// and independent of construction order.
std::vector<Violation> validate(const Instance& instance);

}  // namespace corridor
