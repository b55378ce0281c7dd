#include "corridor/objective.hpp"

#include <algorithm>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>

namespace corridor {

namespace {

std::string tier_name(const ObjectiveTier& tier) {
  std::string name = tier.quantity == Quantity::kCounter ? "counter" : "increments";
  name += tier.sense == Sense::kMaximize ? "_max" : "_min";
  return name;
}

std::string strip(const std::string& text) {
  auto begin = text.find_first_not_of(" \t");
  if (begin == std::string::npos) return "";
  auto end = text.find_last_not_of(" \t");
  return text.substr(begin, end - begin + 1);
}

LinkId parse_link_term(const std::string& raw) {
  std::string text = strip(raw);
  if (text.rfind("link(", 0) != 0 || text.back() != ')')
    throw std::invalid_argument("objective: expected link(From,Id,To), got '" + raw + "'");
  std::string inner = text.substr(5, text.size() - 6);
  std::vector<std::string> parts;
  std::stringstream stream(inner);
  std::string part;
  while (std::getline(stream, part, ',')) parts.push_back(strip(part));
  if (parts.size() != 3 || parts[0].empty() || parts[1].empty() || parts[2].empty())
    throw std::invalid_argument("objective: expected link(From,Id,To), got '" + raw + "'");
  return LinkId{parts[0], parts[1], parts[2]};
}

}  // namespace

Objective default_objective(const Instance& instance) {
  Objective objective;
  ObjectiveTier tier;
  tier.quantity = Quantity::kCounter;
  tier.sense = Sense::kMaximize;
  tier.links = instance.goal_links();
  objective.tiers.push_back(std::move(tier));
  return objective;
}

void check_objective(const Instance& instance, const Objective& objective) {
  if (objective.tiers.empty()) throw std::invalid_argument("objective has no tiers");

  std::map<std::pair<Quantity, LinkId>, Sense> senses;
  for (const ObjectiveTier& tier : objective.tiers) {
    if (tier.links.empty())
      throw std::invalid_argument("objective tier " + tier_name(tier) + " names no links");
    std::set<LinkId> in_tier;
    for (const LinkId& id : tier.links) {
      const Link* link = instance.find_link(id);
      if (!link)
        throw std::invalid_argument("objective names unknown link " + to_string(id));
      if (tier.quantity == Quantity::kCounter && !link->is_goal())
        throw std::invalid_argument("objective counts " + to_string(id) +
                                    " which is not a goal link (no initial_count)");
      if (!in_tier.insert(id).second)
        throw std::invalid_argument("objective tier " + tier_name(tier) + " repeats " +
                                    to_string(id));
      auto key = std::make_pair(tier.quantity, id);
      auto [it, inserted] = senses.emplace(key, tier.sense);
      if (!inserted && it->second != tier.sense)
        throw std::invalid_argument("contrasting objectives for " + to_string(id) +
                                    ": the same quantity is both maximised and minimised");
    }
  }
}

Objective parse_objective(const Instance& instance, const std::string& text) {
  Objective objective;
  std::stringstream tiers(text);
  std::string tier_text;
  while (std::getline(tiers, tier_text, ';')) {
    tier_text = strip(tier_text);
    if (tier_text.empty())
      throw std::invalid_argument("objective: empty tier in '" + text + "'");

    std::string name = tier_text;
    std::string links_text;
    if (auto colon = tier_text.find(':'); colon != std::string::npos) {
      name = strip(tier_text.substr(0, colon));
      links_text = tier_text.substr(colon + 1);
    }

    ObjectiveTier tier;
    if (name == "counter_max") {
      tier.quantity = Quantity::kCounter;
      tier.sense = Sense::kMaximize;
    } else if (name == "counter_min") {
      tier.quantity = Quantity::kCounter;
      tier.sense = Sense::kMinimize;
    } else if (name == "increments_max") {
      tier.quantity = Quantity::kIncrements;
      tier.sense = Sense::kMaximize;
    } else if (name == "increments_min") {
      tier.quantity = Quantity::kIncrements;
      tier.sense = Sense::kMinimize;
    } else {
      throw std::invalid_argument(
          "objective: unknown tier '" + name +
          "' (expected counter_max, counter_min, increments_max or increments_min)");
    }

    if (links_text.empty()) {
      tier.links = instance.goal_links();
    } else {
      std::stringstream links(links_text);
      std::string link_text;
      while (std::getline(links, link_text, '+'))
        tier.links.push_back(parse_link_term(link_text));
    }
    objective.tiers.push_back(std::move(tier));
  }
  if (objective.tiers.empty())
    throw std::invalid_argument("objective: no tiers in '" + text + "'");
  check_objective(instance, objective);
  return objective;
}

std::string objective_to_string(const Objective& objective) {
  std::string out;
  for (const ObjectiveTier& tier : objective.tiers) {
    if (!out.empty()) out.push_back(';');
    out += tier_name(tier);
    out.push_back(':');
    for (std::size_t i = 0; i < tier.links.size(); ++i) {
      if (i) out.push_back('+');
      out += to_string(tier.links[i]);
    }
  }
  return out;
}

std::vector<LinkId> tracked_links(const Objective& objective) {
  std::set<LinkId> seen;
  std::vector<LinkId> out;
  for (const ObjectiveTier& tier : objective.tiers) {
    if (tier.quantity != Quantity::kIncrements) continue;
    for (const LinkId& id : tier.links)
      if (seen.insert(id).second) out.push_back(id);
  }
  return out;
}

}  // namespace corridor
