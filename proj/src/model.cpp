#include "corridor/model.hpp"

#include <algorithm>
#include <set>
#include <sstream>

namespace corridor {

std::string to_string(const PhaseId& phase) {
  std::string out = phase.kind == PhaseKind::kStage ? "stage(" : "inter(";
  out += phase.junction;
  out.push_back(',');
  out += std::to_string(phase.index);
  out.push_back(')');
  return out;
}

std::string to_string(const LinkId& link) {
  return "link(" + link.from + "," + link.label + "," + link.to + ")";
}

const Configuration* Junction::find_config(const std::string& config_id) const {
  for (const auto& config : configs) {
    if (config.id == config_id) return &config;
  }
  return nullptr;
}

void TurnRateTable::set(const PhaseId& stage, const LinkId& from,
                        const LinkId& to, Pcu rate) {
  Entry entry{stage, from, to, rate};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), entry,
                             [](const Entry& a, const Entry& b) {
                               return std::tie(a.stage, a.from, a.to) <
                                      std::tie(b.stage, b.from, b.to);
                             });
  if (it != entries_.end() && it->stage == stage && it->from == from && it->to == to) {
    it->rate_per_second = rate;
    return;
  }
  entries_.insert(it, std::move(entry));
}

Pcu TurnRateTable::rate_or_zero(const PhaseId& phase, const LinkId& from,
                                const LinkId& to) const {
  if (phase.kind != PhaseKind::kStage) return Pcu{};
  Entry probe{phase, from, to, Pcu{}};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                             [](const Entry& a, const Entry& b) {
                               return std::tie(a.stage, a.from, a.to) <
                                      std::tie(b.stage, b.from, b.to);
                             });
  if (it != entries_.end() && it->stage == phase && it->from == from && it->to == to) {
    return it->rate_per_second;
  }
  return Pcu{};
}

std::optional<Pcu> TurnRateTable::rate(const PhaseId& stage, const LinkId& from,
                                       const LinkId& to) const {
  Entry probe{stage, from, to, Pcu{}};
  auto it = std::lower_bound(entries_.begin(), entries_.end(), probe,
                             [](const Entry& a, const Entry& b) {
                               return std::tie(a.stage, a.from, a.to) <
                                      std::tie(b.stage, b.from, b.to);
                             });
  if (it != entries_.end() && it->stage == stage && it->from == from && it->to == to) {
    return it->rate_per_second;
  }
  return std::nullopt;
}

bool TurnRateTable::contains(const PhaseId& stage, const LinkId& from,
                             const LinkId& to) const {
  return rate(stage, from, to).has_value();
}

const Junction* Instance::find_junction(const std::string& id) const {
  for (const auto& junction : junctions) {
    if (junction.id == id) return &junction;
  }
  return nullptr;
}

const Link* Instance::find_link(const LinkId& id) const {
  for (const auto& link : links) {
    if (link.id == id) return &link;
  }
  return nullptr;
}

std::vector<LinkId> Instance::goal_links() const {
  std::vector<LinkId> out;
  for (const auto& link : links) {
    if (link.is_goal()) out.push_back(link.id);
  }
  return out;
}

namespace {

int config_duration(const Configuration& config) {
  int total = 0;
  for (const auto& pd : config.phases) total += pd.seconds;
  return total;
}

void check_configuration(const Junction& junction, const Configuration& config,
                         std::vector<Violation>& out) {
  if (config.phases.empty()) {
    out.push_back({"phase-order", "configuration " + config.id + ": no phases"});
    return;
  }
  for (std::size_t i = 0; i < config.phases.size(); ++i) {
    const auto& pd = config.phases[i];
    if (pd.seconds < 1) {
      out.push_back({"phase-duration",
                     "configuration " + config.id + ": phase " + to_string(pd.phase) +
                         " has duration " + std::to_string(pd.seconds)});
    }
    if (pd.phase.junction != junction.id) {
      out.push_back({"phase-wrong-junction",
                     "configuration " + config.id + ": phase " + to_string(pd.phase) +
                         " does not belong to junction " + junction.id});
    }
    const PhaseKind expected =
        i % 2 == 0 ? PhaseKind::kStage : PhaseKind::kIntergreen;
    if (pd.phase.kind != expected) {
      out.push_back({"phase-order",
                     "configuration " + config.id +
                         ": stages and intergreens must alternate, position " +
                         std::to_string(i) + " is " + to_string(pd.phase)});
    }
  }
  if (config.phases.back().phase.kind != PhaseKind::kIntergreen) {
    out.push_back({"phase-order", "configuration " + config.id +
                                      ": cycle must end with an intergreen"});
  }
}

void check_junction(const Instance& instance, const Junction& junction,
                    std::vector<Violation>& out) {
  if (junction.configs.empty()) {
    out.push_back({"no-configuration",
                   "junction " + junction.id + ": no available configuration"});
    return;
  }
  for (const auto& config : junction.configs) {
    check_configuration(junction, config, out);
  }

  const int reference = config_duration(junction.configs.front());
  for (std::size_t i = 1; i < junction.configs.size(); ++i) {
    const int length = config_duration(junction.configs[i]);
    if (length != reference) {
      out.push_back({"cycle-length-mismatch",
                     "junction " + junction.id + ": cycle lengths differ: " +
                         std::to_string(reference) + " vs " + std::to_string(length) +
                         " (" + junction.configs.front().id + " vs " +
                         junction.configs[i].id + ")"});
    }
  }
  for (std::size_t i = 1; i < junction.configs.size(); ++i) {
    const auto& a = junction.configs.front().phases;
    const auto& b = junction.configs[i].phases;
    bool same = a.size() == b.size();
    for (std::size_t p = 0; same && p < a.size(); ++p) same = a[p].phase == b[p].phase;
    if (!same) {
      out.push_back({"phase-chain-mismatch",
                     "junction " + junction.id + ": configurations " +
                         junction.configs.front().id + " and " + junction.configs[i].id +
                         " do not share the same phase sequence"});
    }
  }

  const Configuration* active = junction.find_config(junction.initial_config);
  if (active == nullptr) {
    out.push_back({"initial-config-unknown",
                   "junction " + junction.id + ": initial configuration " +
                       junction.initial_config + " is not available"});
  } else {
    const PhaseDuration* initial = nullptr;
    for (const auto& pd : active->phases) {
      if (pd.phase == junction.initial_phase) initial = &pd;
    }
    if (initial == nullptr) {
      out.push_back({"initial-phase-not-in-config",
                     "junction " + junction.id + ": initial phase " +
                         to_string(junction.initial_phase) +
                         " is not part of configuration " + active->id});
    } else if (junction.initial_elapsed < 0 ||
               junction.initial_elapsed >= initial->seconds) {
      out.push_back({"initial-elapsed-range",
                     "junction " + junction.id + ": elapsed " +
                         std::to_string(junction.initial_elapsed) +
                         " not within phase " + to_string(junction.initial_phase) +
                         " of duration " + std::to_string(initial->seconds)});
    }
  }
  if (junction.cycles_since_change < 0) {
    out.push_back({"cycle-count-negative",
                   "junction " + junction.id + ": completed-cycle count " +
                       std::to_string(junction.cycles_since_change) + " is negative"});
  }
  if (junction.min_cycles_between_changes < 1) {
    out.push_back({"stability-range",
                   "junction " + junction.id + ": cycle stability constant " +
                       std::to_string(junction.min_cycles_between_changes) +
                       " must be at least 1"});
  }
  (void)instance;
}

void check_link(const Link& link, std::vector<Violation>& out) {
  if (link.initial_occ < Pcu{}) {
    out.push_back({"occupancy-negative",
                   to_string(link.id) + ": initial occupancy " +
                       link.initial_occ.to_decimal() + " is negative"});
  }
  if (link.capacity.has_value()) {
    if (*link.capacity < Pcu{}) {
      out.push_back({"capacity-negative",
                     to_string(link.id) + ": capacity " + link.capacity->to_decimal() +
                         " is negative"});
    } else if (link.initial_occ > *link.capacity) {
      out.push_back({"occupancy-exceeds-capacity",
                     to_string(link.id) + ": initial occupancy " +
                         link.initial_occ.to_decimal() + " exceeds capacity " +
                         link.capacity->to_decimal()});
    }
  }
}

void check_turn_rate(const Instance& instance, const TurnRateTable::Entry& entry,
                     std::vector<Violation>& out) {
  if (entry.rate_per_second < Pcu{}) {
    out.push_back({"rate-negative",
                   "turn rate " + to_string(entry.stage) + " " + to_string(entry.from) +
                       " -> " + to_string(entry.to) + " is negative: " +
                       entry.rate_per_second.to_decimal()});
  }
  if (entry.stage.kind != PhaseKind::kStage) {
    out.push_back({"rate-on-intergreen",
                   "turn rate declared on intergreen " + to_string(entry.stage)});
    return;
  }
  const Junction* junction = instance.find_junction(entry.stage.junction);
  if (junction == nullptr) {
    out.push_back({"rate-unknown-stage",
                   "turn rate stage " + to_string(entry.stage) +
                       " references unknown junction " + entry.stage.junction});
    return;
  }
  bool phase_known = false;
  if (!junction->configs.empty()) {
    for (const auto& pd : junction->configs.front().phases) {
      if (pd.phase == entry.stage) phase_known = true;
    }
  }
  if (!phase_known) {
    out.push_back({"rate-unknown-stage",
                   "turn rate stage " + to_string(entry.stage) +
                       " is not a phase of junction " + junction->id});
  }
  const Link* from = instance.find_link(entry.from);
  const Link* to = instance.find_link(entry.to);
  if (from == nullptr) {
    out.push_back({"rate-unknown-link",
                   "turn rate references unknown link " + to_string(entry.from)});
  }
  if (to == nullptr) {
    out.push_back({"rate-unknown-link",
                   "turn rate references unknown link " + to_string(entry.to)});
  }
  if (from != nullptr && from->id.to != entry.stage.junction) {
    out.push_back({"rate-wrong-topology",
                   "turn rate " + to_string(entry.from) + " -> " + to_string(entry.to) +
                       " at " + to_string(entry.stage) + ": source link does not enter " +
                       entry.stage.junction});
  }
  if (to != nullptr && to->id.from != entry.stage.junction) {
    out.push_back({"rate-wrong-topology",
                   "turn rate " + to_string(entry.from) + " -> " + to_string(entry.to) +
                       " at " + to_string(entry.stage) +
                       ": destination link does not leave " + entry.stage.junction});
  }
}

}  // namespace

std::vector<Violation> validate(const Instance& instance) {
  std::vector<Violation> out;

  if (instance.horizon < 0) {
    out.push_back({"horizon-negative",
                   "horizon " + std::to_string(instance.horizon) + " is negative"});
  }

  std::set<std::string> junction_ids;
  for (const auto& junction : instance.junctions) {
    if (!junction_ids.insert(junction.id).second) {
      out.push_back({"duplicate-junction", "junction " + junction.id + " declared twice"});
      continue;
    }
    check_junction(instance, junction, out);
  }

  std::set<LinkId> link_ids;
  for (const auto& link : instance.links) {
    if (!link_ids.insert(link.id).second) {
      out.push_back({"duplicate-link", to_string(link.id) + " declared twice"});
      continue;
    }
    check_link(link, out);
  }

  for (const auto& entry : instance.turn_rates.entries()) {
    check_turn_rate(instance, entry, out);
  }

  std::sort(out.begin(), out.end());
  out.erase(std::unique(out.begin(), out.end()), out.end());
  return out;
}

}  // namespace corridor
