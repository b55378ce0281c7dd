#include "corridor/facts.hpp"

#include <algorithm>
#include <cctype>
#include <cerrno>
#include <cstdint>
#include <cstdlib>
#include <limits>
#include <optional>
#include <set>
#include <sstream>

namespace corridor {

namespace {

struct Term {
  std::string name;            // functor or symbolic constant; empty for numbers
  bool is_number = false;
  std::string literal;         // verbatim number text, e.g. "-3" or "0.5"
  std::vector<Term> args;
  int line = 0;
  int column = 0;

  bool is_atom() const { return !is_number && args.empty(); }
};

struct Fact {
  std::string predicate;
  std::vector<Term> args;
  int line = 0;
  int column = 0;

  std::string signature() const {
    return predicate + "/" + std::to_string(args.size());
  }
};

enum class TokenKind { Ident, Number, LParen, RParen, Comma, Period, Hash, Equals, Eof };

struct Token {
  TokenKind kind;
  std::string text;
  int line;
  int column;
};

class Lexer {
 public:
  Lexer(std::string_view text, bool decimal_numbers)
      : text_(text), decimal_(decimal_numbers) {}

  Token next() {
    skip_trivia();
    int line = line_, column = column_;
    if (pos_ >= text_.size()) return {TokenKind::Eof, "", line, column};
    char c = text_[pos_];
    if (c == '(') return advance({TokenKind::LParen, "(", line, column});
    if (c == ')') return advance({TokenKind::RParen, ")", line, column});
    if (c == ',') return advance({TokenKind::Comma, ",", line, column});
    if (c == '.') return advance({TokenKind::Period, ".", line, column});
    if (c == '#') return advance({TokenKind::Hash, "#", line, column});
    if (c == '=') return advance({TokenKind::Equals, "=", line, column});
    if (c == '-' || std::isdigit(static_cast<unsigned char>(c))) return lex_number(line, column);
    if (c == '_' || std::isalpha(static_cast<unsigned char>(c))) return lex_ident(line, column);
    throw fact_error(std::string("unexpected character '") + c + "'", line, column);
  }

 private:
  Token advance(Token t) {
    bump();
    return t;
  }

  void bump() {
    if (text_[pos_] == '\n') {
      ++line_;
      column_ = 1;
    } else {
      ++column_;
    }
    ++pos_;
  }

  void skip_trivia() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '%') {
        while (pos_ < text_.size() && text_[pos_] != '\n') bump();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        bump();
      } else {
        return;
      }
    }
  }

  Token lex_number(int line, int column) {
    std::string text;
    if (text_[pos_] == '-') {
      text.push_back('-');
      bump();
      if (pos_ >= text_.size() || !std::isdigit(static_cast<unsigned char>(text_[pos_])))
        throw fact_error("expected digit after '-'", line, column);
    }
    while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
      text.push_back(text_[pos_]);
      bump();
    }
    // A '.' normally terminates the fact; in decimal mode it belongs to the
    // number when a digit follows immediately.
    if (decimal_ && pos_ + 1 < text_.size() && text_[pos_] == '.' &&
        std::isdigit(static_cast<unsigned char>(text_[pos_ + 1]))) {
      text.push_back('.');
      bump();
      while (pos_ < text_.size() && std::isdigit(static_cast<unsigned char>(text_[pos_]))) {
        text.push_back(text_[pos_]);
        bump();
      }
    }
    return {TokenKind::Number, text, line, column};
  }

  Token lex_ident(int line, int column) {
    if (std::isupper(static_cast<unsigned char>(text_[pos_])))
      throw fact_error("variables are not allowed; facts must be ground", line, column);
    std::string text;
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == '_' || c == '\'' || std::isalnum(static_cast<unsigned char>(c))) {
        text.push_back(c);
        bump();
      } else {
        break;
      }
    }
    return {TokenKind::Ident, text, line, column};
  }

  std::string_view text_;
  bool decimal_;
  std::size_t pos_ = 0;
  int line_ = 1;
  int column_ = 1;
};

class Parser {
 public:
  Parser(std::string_view text, bool decimal_numbers) : lexer_(text, decimal_numbers) {
    shift();
  }

  struct File {
    std::vector<Fact> facts;
    std::map<std::string, std::pair<std::int64_t, Token>> consts;
  };

  File parse_file() {
    File file;
    while (current_.kind != TokenKind::Eof) {
      if (current_.kind == TokenKind::Hash) {
        parse_const(file);
        continue;
      }
      file.facts.push_back(parse_fact());
    }
    return file;
  }

 private:
  void shift() { current_ = lexer_.next(); }

  Token expect(TokenKind kind, const std::string& what) {
    if (current_.kind != kind)
      throw fact_error("expected " + what + ", got '" + describe(current_) + "'",
                       current_.line, current_.column);
    Token t = current_;
    shift();
    return t;
  }

  static std::string describe(const Token& t) {
    return t.kind == TokenKind::Eof ? "end of file" : t.text;
  }

  void parse_const(File& file) {
    Token hash = current_;
    shift();
    Token keyword = expect(TokenKind::Ident, "'const'");
    if (keyword.text != "const")
      throw fact_error("unknown directive '#" + keyword.text + "'", hash.line, hash.column);
    Token name = expect(TokenKind::Ident, "constant name");
    expect(TokenKind::Equals, "'='");
    Token value = expect(TokenKind::Number, "integer value");
    expect(TokenKind::Period, "'.'");
    if (value.text.find('.') != std::string::npos)
      throw fact_error("constant '" + name.text + "' must be an integer", value.line,
                       value.column);
    if (file.consts.count(name.text))
      throw fact_error("constant '" + name.text + "' defined twice", name.line, name.column);
    file.consts.emplace(name.text, std::make_pair(to_int(value), name));
  }

  static std::int64_t to_int(const Token& t) {
    errno = 0;
    char* end = nullptr;
    long long v = std::strtoll(t.text.c_str(), &end, 10);
    if (errno == ERANGE || end != t.text.c_str() + t.text.size())
      throw fact_error("integer '" + t.text + "' out of range", t.line, t.column);
    return v;
  }

  Fact parse_fact() {
    Token head = expect(TokenKind::Ident, "predicate name");
    Fact fact;
    fact.predicate = head.text;
    fact.line = head.line;
    fact.column = head.column;
    if (current_.kind == TokenKind::LParen) {
      shift();
      fact.args.push_back(parse_term());
      while (current_.kind == TokenKind::Comma) {
        shift();
        fact.args.push_back(parse_term());
      }
      expect(TokenKind::RParen, "')'");
    }
    expect(TokenKind::Period, "'.'");
    return fact;
  }

  Term parse_term() {
    if (current_.kind == TokenKind::Number) {
      Term t;
      t.is_number = true;
      t.literal = current_.text;
      t.line = current_.line;
      t.column = current_.column;
      shift();
      return t;
    }
    Token head = expect(TokenKind::Ident, "term");
    Term t;
    t.name = head.text;
    t.line = head.line;
    t.column = head.column;
    if (current_.kind == TokenKind::LParen) {
      shift();
      t.args.push_back(parse_term());
      while (current_.kind == TokenKind::Comma) {
        shift();
        t.args.push_back(parse_term());
      }
      expect(TokenKind::RParen, "')'");
    }
    return t;
  }

  Lexer lexer_;
  Token current_;
};

[[noreturn]] void fail(const Fact& fact, const std::string& message) {
  throw fact_error(message, fact.line, fact.column);
}

[[noreturn]] void fail(const Term& term, const std::string& message) {
  throw fact_error(message, term.line, term.column);
}

std::int64_t term_int(const Term& t, const std::string& what) {
  if (!t.is_number || t.literal.find('.') != std::string::npos)
    fail(t, what + " must be an integer");
  errno = 0;
  char* end = nullptr;
  long long v = std::strtoll(t.literal.c_str(), &end, 10);
  if (errno == ERANGE || end != t.literal.c_str() + t.literal.size())
    fail(t, what + " '" + t.literal + "' out of range");
  return v;
}

Pcu term_pcu(const Term& t, const std::string& what, const ParseOptions& options) {
  if (!t.is_number) fail(t, what + " must be a number");
  try {
    if (options.decimal_input) return pcu_from_decimal(t.literal);
    return Pcu::from_raw(term_int(t, what));
  } catch (const fact_error&) {
    throw;
  } catch (const std::exception& e) {
    fail(t, what + ": " + e.what());
  }
}

std::string term_atom(const Term& t, const std::string& what) {
  if (!t.is_atom()) fail(t, what + " must be a plain name");
  return t.name;
}

PhaseId term_phase(const Term& t) {
  if (t.is_number || t.args.size() != 2 || (t.name != "stage" && t.name != "inter"))
    fail(t, "expected a phase term stage(J,N) or inter(J,N)");
  PhaseId p;
  p.kind = t.name == "stage" ? PhaseKind::kStage : PhaseKind::kIntergreen;
  p.junction = term_atom(t.args[0], "phase junction");
  std::int64_t n = term_int(t.args[1], "phase index");
  if (n < 1 || n > std::numeric_limits<int>::max()) fail(t.args[1], "phase index out of range");
  p.index = static_cast<int>(n);
  return p;
}

LinkId term_link(const Term& t) {
  if (t.is_number || t.name != "link" || t.args.size() != 3)
    fail(t, "expected a link term link(From,Id,To)");
  LinkId id;
  id.from = term_atom(t.args[0], "link origin");
  id.label = term_atom(t.args[1], "link id");
  id.to = term_atom(t.args[2], "link destination");
  return id;
}

class Assembler {
 public:
  Assembler(const Parser::File& file, const ParseOptions& options,
            std::vector<std::string>& warnings)
      : file_(file), options_(options), warnings_(warnings) {}

  Instance build() {
    index();

    Instance instance;
    instance.horizon = read_horizon();
    if (auto b = constant("bound")) instance.bound = Pcu::from_raw(*b);
    std::int64_t stability = constant("k").value_or(4);
    if (stability < std::numeric_limits<int>::min() || stability > std::numeric_limits<int>::max())
      throw fact_error("constant 'k' out of range", 1, 1);

    collect_junctions(static_cast<int>(stability));
    collect_configs();
    collect_links();
    collect_rates();
    collect_initial_state();

    if (junctions_.empty()) throw fact_error("no junctions declared", 1, 1);

    for (auto& [id, junction] : junctions_) instance.junctions.push_back(std::move(junction));
    for (auto& [id, link] : links_) instance.links.push_back(std::move(link));
    instance.turn_rates = std::move(rates_);
    return instance;
  }

 private:
  void index() {
    static const std::set<std::string> known = {
        "controllable/1", "available_conf/2", "phase_limit/3", "status/2",
        "next/2",         "end/1",            "link/3",        "precedes/2",
        "follows/2",      "capacity/2",       "initial_occ/2", "turnrate/4",
        "active_p/2",     "active_t/3",       "active_c/3",    "initial_count/2",
        "count_c/2"};
    for (const Fact& f : file_.facts) {
      std::string sig = f.signature();
      if (!known.count(sig)) {
        warnings_.push_back("line " + std::to_string(f.line) + ": unknown predicate " + sig +
                            " ignored");
        continue;
      }
      by_signature_[sig].push_back(&f);
    }
    for (const auto& [name, value] : file_.consts) {
      if (name != "horizon" && name != "k" && name != "bound")
        warnings_.push_back("line " + std::to_string(value.second.line) +
                            ": unknown constant '" + name + "' ignored");
    }
  }

  const std::vector<const Fact*>& facts(const std::string& sig) { return by_signature_[sig]; }

  std::optional<std::int64_t> constant(const std::string& name) const {
    auto it = file_.consts.find(name);
    if (it == file_.consts.end()) return std::nullopt;
    return it->second.first;
  }

  int read_horizon() const {
    std::int64_t h = constant("horizon").value_or(0);
    if (h < std::numeric_limits<int>::min() || h > std::numeric_limits<int>::max())
      throw fact_error("constant 'horizon' out of range", 1, 1);
    return static_cast<int>(h);
  }

  // Junctions are everything that owns phases or configurations; endpoints
  // that only ever appear inside link terms stay boundary nodes.
  void collect_junctions(int stability) {
    std::map<std::string, const Fact*> seen;
    auto note = [&](const std::string& id, const Fact* f) { seen.emplace(id, f); };
    for (const Fact* f : facts("controllable/1")) note(term_atom(f->args[0], "junction"), f);
    for (const Fact* f : facts("available_conf/2")) note(term_atom(f->args[0], "junction"), f);
    for (const Fact* f : facts("status/2")) note(term_phase(f->args[1]).junction, f);
    for (const Fact* f : facts("next/2")) note(term_phase(f->args[0]).junction, f);
    for (const Fact* f : facts("end/1")) note(term_phase(f->args[0]).junction, f);
    for (const Fact* f : facts("phase_limit/3")) note(term_phase(f->args[0]).junction, f);

    for (const auto& [id, origin] : seen) {
      Junction junction;
      junction.id = id;
      junction.min_cycles_between_changes = stability;
      chains_.emplace(id, phase_chain(id, *origin));
      junctions_.emplace(id, std::move(junction));
    }

    for (const Fact* f : facts("controllable/1"))
      junctions_.at(term_atom(f->args[0], "junction")).controllable = true;

    for (const Fact* f : facts("status/2")) {
      std::string id = term_atom(f->args[0], "junction");
      PhaseId phase = term_phase(f->args[1]);
      if (phase.junction != id)
        fail(*f, "phase " + to_string(phase) + " declared under junction " + id);
      const std::vector<PhaseId>& chain = chains_.at(id);
      if (std::find(chain.begin(), chain.end(), phase) == chain.end())
        fail(*f, "phase " + to_string(phase) + " is not part of the cycle of " + id);
    }
  }

  // The cycle is reconstructed from next/2 and end/1: start at the unique
  // phase that never appears as a successor, then follow next links.
  std::vector<PhaseId> phase_chain(const std::string& junction, const Fact& origin) {
    std::set<PhaseId> phases;
    std::map<PhaseId, PhaseId> successor;
    std::set<PhaseId> is_successor;
    std::optional<PhaseId> last;

    auto note = [&](const PhaseId& p) {
      if (p.junction == junction) phases.insert(p);
    };
    for (const Fact* f : facts("status/2")) note(term_phase(f->args[1]));
    for (const Fact* f : facts("phase_limit/3")) note(term_phase(f->args[0]));
    for (const Fact* f : facts("next/2")) {
      PhaseId a = term_phase(f->args[0]);
      PhaseId b = term_phase(f->args[1]);
      if (a.junction != junction) continue;
      if (b.junction != junction)
        fail(*f, "next/2 crosses junctions: " + to_string(a) + " -> " + to_string(b));
      note(a);
      note(b);
      auto [it, inserted] = successor.emplace(a, b);
      if (!inserted && !(it->second == b))
        fail(*f, "contradictory next/2 facts for " + to_string(a));
      is_successor.insert(b);
    }
    for (const Fact* f : facts("end/1")) {
      PhaseId p = term_phase(f->args[0]);
      if (p.junction != junction) continue;
      note(p);
      if (last && !(*last == p)) fail(*f, "two end/1 phases for junction " + junction);
      last = p;
    }

    if (phases.empty()) fail(origin, "junction " + junction + " has no phases");

    std::optional<PhaseId> first;
    for (const PhaseId& p : phases) {
      if (is_successor.count(p)) continue;
      if (first)
        throw fact_error("junction " + junction + " has no unique first phase (" +
                             to_string(*first) + " and " + to_string(p) +
                             " both lack a predecessor)",
                         origin.line, origin.column);
      first = p;
    }
    if (!first)
      fail(origin, "phase order of junction " + junction + " is cyclic; no first phase");

    std::vector<PhaseId> chain;
    std::set<PhaseId> visited;
    PhaseId current = *first;
    while (true) {
      if (!visited.insert(current).second)
        fail(origin, "phase order of junction " + junction + " revisits " + to_string(current));
      chain.push_back(current);
      auto it = successor.find(current);
      if (it == successor.end()) break;
      current = it->second;
    }
    if (chain.size() != phases.size())
      fail(origin, "phase order of junction " + junction + " does not cover all phases");
    if (!last) fail(origin, "junction " + junction + " has no end/1 phase");
    if (!(chain.back() == *last))
      fail(origin, "end/1 names " + to_string(*last) + " but the phase order of " + junction +
                       " finishes at " + to_string(chain.back()));
    return chain;
  }

  void collect_configs() {
    std::map<std::pair<std::string, std::string>, const Fact*> origins;
    for (const Fact* f : facts("available_conf/2")) {
      std::string junction_id = term_atom(f->args[0], "junction");
      std::string config_id = term_atom(f->args[1], "configuration");
      Junction& junction = junctions_.at(junction_id);
      origins.emplace(std::make_pair(junction_id, config_id), f);
      if (junction.find_config(config_id)) continue;  // exact duplicate fact
      Configuration config;
      config.id = config_id;
      config.junction = junction_id;
      junction.configs.push_back(std::move(config));
    }

    std::map<std::pair<PhaseId, std::string>, std::pair<int, const Fact*>> durations;
    for (const Fact* f : facts("phase_limit/3")) {
      PhaseId phase = term_phase(f->args[0]);
      std::string config_id = term_atom(f->args[1], "configuration");
      std::int64_t seconds = term_int(f->args[2], "phase duration");
      if (seconds < 0 || seconds > std::numeric_limits<int>::max())
        fail(f->args[2], "phase duration out of range");
      auto key = std::make_pair(phase, config_id);
      auto [it, inserted] = durations.emplace(key, std::make_pair(static_cast<int>(seconds), f));
      if (!inserted && it->second.first != seconds)
        fail(*f, "contradictory durations for " + to_string(phase) + " in " + config_id);
      const Junction& junction = junctions_.at(phase.junction);
      if (!junction.find_config(config_id))
        fail(*f, "configuration " + config_id + " is not declared by available_conf/2 for " +
                     phase.junction);
    }

    for (auto& [id, junction] : junctions_) {
      const std::vector<PhaseId>& chain = chains_.at(id);
      for (Configuration& config : junction.configs) {
        const Fact* origin = origins.at(std::make_pair(id, config.id));
        for (const PhaseId& phase : chain) {
          auto it = durations.find(std::make_pair(phase, config.id));
          if (it == durations.end())
            fail(*origin,
                 "configuration " + config.id + " has no duration for " + to_string(phase));
          config.phases.push_back(PhaseDuration{phase, it->second.first});
        }
      }
    }
  }

  Link* resolve_link(const Term& t) {
    LinkId id = term_link(t);
    auto it = links_.find(id);
    if (it == links_.end()) fail(t, "unknown link " + to_string(id));
    return &it->second;
  }

  void collect_links() {
    for (const Fact* f : facts("link/3")) {
      LinkId id;
      id.from = term_atom(f->args[0], "link origin");
      id.label = term_atom(f->args[1], "link id");
      id.to = term_atom(f->args[2], "link destination");
      Link link;
      link.id = id;
      links_.emplace(id, std::move(link));  // exact duplicate facts collapse
    }

    for (const Fact* f : facts("precedes/2")) {
      std::string junction = term_atom(f->args[0], "junction");
      Link* link = resolve_link(f->args[1]);
      if (link->id.from != junction)
        fail(*f, "precedes/2 disagrees with link origin " + link->id.from);
      if (!junctions_.count(junction))
        fail(*f, "precedes/2 names unknown junction " + junction);
    }
    for (const Fact* f : facts("follows/2")) {
      std::string junction = term_atom(f->args[0], "junction");
      Link* link = resolve_link(f->args[1]);
      if (link->id.to != junction)
        fail(*f, "follows/2 disagrees with link destination " + link->id.to);
      if (!junctions_.count(junction))
        fail(*f, "follows/2 names unknown junction " + junction);
    }

    for (const Fact* f : facts("capacity/2")) {
      Link* link = resolve_link(f->args[0]);
      Pcu value = term_pcu(f->args[1], "capacity", options_);
      if (link->capacity && !(*link->capacity == value))
        fail(*f, "contradictory capacities for " + to_string(link->id));
      link->capacity = value;
    }
    std::set<LinkId> occ_seen;
    for (const Fact* f : facts("initial_occ/2")) {
      Link* link = resolve_link(f->args[0]);
      Pcu value = term_pcu(f->args[1], "initial occupancy", options_);
      if (!occ_seen.insert(link->id).second && !(link->initial_occ == value))
        fail(*f, "contradictory initial occupancies for " + to_string(link->id));
      link->initial_occ = value;
    }
    for (const Fact* f : facts("initial_count/2")) {
      Link* link = resolve_link(f->args[0]);
      Pcu value = term_pcu(f->args[1], "initial counter", options_);
      if (link->initial_counter && !(*link->initial_counter == value))
        fail(*f, "contradictory initial counters for " + to_string(link->id));
      link->initial_counter = value;
    }
  }

  void collect_rates() {
    for (const Fact* f : facts("turnrate/4")) {
      PhaseId phase = term_phase(f->args[0]);
      LinkId from = term_link(f->args[1]);
      LinkId to = term_link(f->args[2]);
      Pcu rate = term_pcu(f->args[3], "turn rate", options_);
      if (!junctions_.count(phase.junction))
        fail(f->args[0], "turnrate/4 names unknown junction " + phase.junction);
      if (!links_.count(from)) fail(f->args[1], "unknown link " + to_string(from));
      if (!links_.count(to)) fail(f->args[2], "unknown link " + to_string(to));
      if (auto existing = rates_.rate(phase, from, to); existing && !(*existing == rate))
        fail(*f, "contradictory turn rates for " + to_string(from) + " -> " + to_string(to) +
                     " during " + to_string(phase));
      rates_.set(phase, from, to, rate);
    }
  }

  void collect_initial_state() {
    auto initial_time = [&](const Term& t) {
      if (term_int(t, "time") != 0) fail(t, "initial facts must be stated at time 0");
    };

    std::set<std::string> phase_seen, elapsed_seen, config_seen, count_seen;
    for (const Fact* f : facts("active_p/2")) {
      initial_time(f->args[0]);
      PhaseId phase = term_phase(f->args[1]);
      auto it = junctions_.find(phase.junction);
      if (it == junctions_.end())
        fail(f->args[1], "active_p/2 names unknown junction " + phase.junction);
      Junction& junction = it->second;
      if (!phase_seen.insert(phase.junction).second && !(junction.initial_phase == phase))
        fail(*f, "contradictory active_p/2 facts for junction " + phase.junction);
      junction.initial_phase = phase;
    }
    for (const Fact* f : facts("active_t/3")) {
      initial_time(f->args[0]);
      std::string id = term_atom(f->args[1], "junction");
      auto it = junctions_.find(id);
      if (it == junctions_.end()) fail(f->args[1], "active_t/3 names unknown junction " + id);
      std::int64_t elapsed = term_int(f->args[2], "elapsed time");
      if (elapsed < std::numeric_limits<int>::min() || elapsed > std::numeric_limits<int>::max())
        fail(f->args[2], "elapsed time out of range");
      if (!elapsed_seen.insert(id).second && it->second.initial_elapsed != elapsed)
        fail(*f, "contradictory active_t/3 facts for junction " + id);
      it->second.initial_elapsed = static_cast<int>(elapsed);
    }
    for (const Fact* f : facts("active_c/3")) {
      initial_time(f->args[0]);
      std::string id = term_atom(f->args[1], "junction");
      std::string config = term_atom(f->args[2], "configuration");
      auto it = junctions_.find(id);
      if (it == junctions_.end()) fail(f->args[1], "active_c/3 names unknown junction " + id);
      if (!it->second.find_config(config))
        fail(f->args[2], "configuration " + config + " is not available at " + id);
      if (!config_seen.insert(id).second && it->second.initial_config != config)
        fail(*f, "contradictory active_c/3 facts for junction " + id);
      it->second.initial_config = config;
    }
    for (const Fact* f : facts("count_c/2")) {
      std::string id = term_atom(f->args[0], "junction");
      auto it = junctions_.find(id);
      if (it == junctions_.end()) fail(f->args[0], "count_c/2 names unknown junction " + id);
      std::int64_t cycles = term_int(f->args[1], "cycle count");
      if (cycles < std::numeric_limits<int>::min() || cycles > std::numeric_limits<int>::max())
        fail(f->args[1], "cycle count out of range");
      if (!count_seen.insert(id).second && it->second.cycles_since_change != cycles)
        fail(*f, "contradictory count_c/2 facts for junction " + id);
      it->second.cycles_since_change = static_cast<int>(cycles);
    }

    for (const auto& [id, junction] : junctions_) {
      if (!phase_seen.count(id))
        throw fact_error("junction " + id + " has no active_p/2 fact", 1, 1);
      if (!elapsed_seen.count(id))
        throw fact_error("junction " + id + " has no active_t/3 fact", 1, 1);
      if (!config_seen.count(id))
        throw fact_error("junction " + id + " has no active_c/3 fact", 1, 1);
    }
  }

  const Parser::File& file_;
  const ParseOptions& options_;
  std::vector<std::string>& warnings_;
  std::map<std::string, std::vector<const Fact*>> by_signature_;
  std::map<std::string, Junction> junctions_;
  std::map<std::string, std::vector<PhaseId>> chains_;
  std::map<LinkId, Link> links_;
  TurnRateTable rates_;
};

}  // namespace

ParseResult parse_instance(std::string_view text, const ParseOptions& options) {
  Parser parser(text, options.decimal_input);
  Parser::File file = parser.parse_file();
  ParseResult result;
  Assembler assembler(file, options, result.warnings);
  result.instance = assembler.build();
  return result;
}

std::string emit_facts(const Instance& instance) {
  std::ostringstream out;
  out << "% corridor network instance\n";
  out << "#const horizon=" << instance.horizon << ".\n";

  if (!instance.junctions.empty()) {
    int k = instance.junctions.front().min_cycles_between_changes;
    for (const Junction& junction : instance.junctions) {
      if (junction.min_cycles_between_changes != k)
        throw std::invalid_argument(
            "fact files carry a single stability constant; instance has per-junction values");
    }
    out << "#const k=" << k << ".\n";
  }
  out << "#const bound=" << instance.bound.raw() << ".\n";

  out << "\n% junctions\n";
  for (const Junction& junction : instance.junctions)
    if (junction.controllable) out << "controllable(" << junction.id << ").\n";
  for (const Junction& junction : instance.junctions)
    for (const Configuration& config : junction.configs)
      out << "available_conf(" << junction.id << "," << config.id << ").\n";

  out << "\n% phase cycles\n";
  for (const Junction& junction : instance.junctions) {
    if (junction.configs.empty())
      throw std::invalid_argument("junction " + junction.id +
                                  " has no configuration; cannot emit its phase cycle");
    const std::vector<PhaseDuration>& chain = junction.configs.front().phases;
    for (const PhaseDuration& pd : chain)
      out << "status(" << junction.id << "," << to_string(pd.phase) << ").\n";
    for (std::size_t i = 0; i + 1 < chain.size(); ++i)
      out << "next(" << to_string(chain[i].phase) << "," << to_string(chain[i + 1].phase)
          << ").\n";
    if (!chain.empty()) out << "end(" << to_string(chain.back().phase) << ").\n";
  }

  out << "\n% configurations\n";
  for (const Junction& junction : instance.junctions)
    for (const Configuration& config : junction.configs)
      for (const PhaseDuration& pd : config.phases)
        out << "phase_limit(" << to_string(pd.phase) << "," << config.id << "," << pd.seconds
            << ").\n";

  out << "\n% network\n";
  std::vector<const Link*> links;
  for (const Link& link : instance.links) links.push_back(&link);
  std::sort(links.begin(), links.end(),
            [](const Link* a, const Link* b) { return a->id < b->id; });
  for (const Link* link : links)
    out << "link(" << link->id.from << "," << link->id.label << "," << link->id.to << ").\n";
  for (const Link* link : links) {
    if (instance.find_junction(link->id.from))
      out << "precedes(" << link->id.from << "," << to_string(link->id) << ").\n";
    if (instance.find_junction(link->id.to))
      out << "follows(" << link->id.to << "," << to_string(link->id) << ").\n";
  }
  for (const Link* link : links)
    if (link->capacity)
      out << "capacity(" << to_string(link->id) << "," << link->capacity->raw() << ").\n";
  for (const Link* link : links)
    out << "initial_occ(" << to_string(link->id) << "," << link->initial_occ.raw() << ").\n";

  out << "\n% turn rates\n";
  for (const auto& entry : instance.turn_rates.entries())
    out << "turnrate(" << to_string(entry.stage) << "," << to_string(entry.from) << ","
        << to_string(entry.to) << "," << entry.rate_per_second.raw() << ").\n";

  out << "\n% initial signal state\n";
  for (const Junction& junction : instance.junctions) {
    out << "active_p(0," << to_string(junction.initial_phase) << ").\n";
    out << "active_t(0," << junction.id << "," << junction.initial_elapsed << ").\n";
    out << "active_c(0," << junction.id << "," << junction.initial_config << ").\n";
    out << "count_c(" << junction.id << "," << junction.cycles_since_change << ").\n";
  }

  bool any_goal = false;
  for (const Link* link : links) any_goal = any_goal || link->initial_counter.has_value();
  if (any_goal) {
    out << "\n% counted links\n";
    for (const Link* link : links)
      if (link->initial_counter)
        out << "initial_count(" << to_string(link->id) << "," << link->initial_counter->raw()
            << ").\n";
  }
  return out.str();
}

std::map<LinkId, Pcu> parse_baseline(std::string_view text, const Instance& instance,
                                     const ParseOptions& options) {
  Parser parser(text, options.decimal_input);
  Parser::File file = parser.parse_file();
  for (const auto& [name, value] : file.consts)
    throw fact_error("unexpected constant '" + name + "' in solution facts", value.second.line,
                     value.second.column);

  std::map<LinkId, Pcu> counters;
  for (const Fact& fact : file.facts) {
    if (fact.signature() != "pddl_solution/2")
      throw fact_error("expected pddl_solution/2 facts, got " + fact.signature(), fact.line,
                       fact.column);
    LinkId id = term_link(fact.args[0]);
    if (!instance.find_link(id))
      throw fact_error("unknown link " + to_string(id), fact.line, fact.column);
    Pcu value = term_pcu(fact.args[1], "counter", options);
    auto [it, inserted] = counters.emplace(id, value);
    if (!inserted && !(it->second == value))
      throw fact_error("contradictory counters for " + to_string(id), fact.line, fact.column);
  }
  return counters;
}

std::string emit_solution_facts(const std::vector<std::pair<LinkId, Pcu>>& counters) {
  std::vector<std::pair<LinkId, Pcu>> sorted = counters;
  std::sort(sorted.begin(), sorted.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });
  std::ostringstream out;
  out << "% final counter values per counted link\n";
  for (const auto& [id, value] : sorted)
    out << "pddl_solution(" << to_string(id) << "," << value.raw() << ").\n";
  return out.str();
}

}  // namespace corridor
