#include "regverify/semantics.hpp"

#include <sstream>

#include "regverify/error.hpp"

namespace regverify {

Location move_source(const Protocol& p, const Move& m) {
  return {p.transitions.at(m.transition).source, m.round};
}

Location move_destination(const Protocol& p, const Move& m) {
  const auto& t = p.transitions.at(m.transition);
  return {t.destination, t.action.kind == ActionKind::Increment ? m.round + 1 : m.round};
}

int register_round(const Protocol& p, const Move& m) {
  const auto& a = p.transitions.at(m.transition).action;
  if (a.kind == ActionKind::Increment) return -1;
  return a.kind == ActionKind::Read ? m.round - a.depth : m.round;
}

AbstractConfiguration initial_configuration(const Protocol& p, const StateSet& support) {
  if (support.none()) throw Error(ErrorCode::EmptySupport, "initial support is empty");
  AbstractConfiguration c(p.register_count);
  for (std::size_t q = 0; q < p.states.size(); ++q) {
    if (!support.test(q)) continue;
    if (!p.initial.test(q)) throw Error(ErrorCode::NotInitialState, p.states[q] + " is not an initial state");
    c.set({static_cast<StateId>(q), 0}, true);
  }
  for (std::size_t q = p.states.size(); q < kMaxStates; ++q)
    if (support.test(q)) throw Error(ErrorCode::NotInitialState, "unknown state in support");
  return c;
}

ConcreteConfiguration initial_concrete(const Protocol& p,
                                       const std::vector<std::pair<StateId, std::uint32_t>>& population) {
  ConcreteConfiguration c(p.register_count);
  for (auto [q, n] : population) {
    if (q >= p.states.size() || !p.initial.test(q))
      throw Error(ErrorCode::NotInitialState, "population outside the initial states");
    c.add({q, 0}, n);
  }
  if (c.total() == 0) throw Error(ErrorCode::EmptySupport, "initial population is empty");
  return c;
}

namespace {

// Shared enabledness check; `populated` and `content` abstract the two configuration kinds.
template <class Config>
bool enabled(const Protocol& p, const Config& c, const Move& m, bool populated, std::string* why) {
  auto fail = [&](const std::string& msg) {
    if (why) *why = msg;
    return false;
  };
  if (m.transition >= p.transitions.size()) return fail("unknown transition");
  const auto& t = p.transitions[m.transition];
  if (m.round < 0) return fail("negative round");
  if (!p.round_based() && m.round != 0) return fail("roundless move with a round");
  if (!populated) return fail("source " + p.states[t.source] + " not populated");
  if (t.action.kind == ActionKind::Read) {
    int r = m.round - t.action.depth;
    if (r < 0) return fail("read depth exceeds process round");
    SymbolId have = c.symbol(r, t.action.reg);
    if (have != t.action.symbol)
      return fail("register " + std::to_string(t.action.reg + 1) + " holds " + p.alphabet[have] + ", not " +
                  p.alphabet[t.action.symbol]);
  }
  return true;
}

}  // namespace

std::optional<AbstractConfiguration> try_abstract_step(const Protocol& p, const AbstractConfiguration& c,
                                                       const Move& m, std::string* why) {
  bool populated = m.transition < p.transitions.size() && c.has(move_source(p, m));
  if (!enabled(p, c, m, populated, why)) return std::nullopt;
  const auto& t = p.transitions[m.transition];
  AbstractConfiguration next = c;
  if (t.action.kind == ActionKind::Write) next.set_symbol(m.round, t.action.reg, t.action.symbol);
  if (m.deserting) next.set(move_source(p, m), false);
  next.set(move_destination(p, m), true);
  next.trim();
  return next;
}

std::optional<ConcreteConfiguration> try_concrete_step(const Protocol& p, const ConcreteConfiguration& c,
                                                       const Move& m, std::string* why) {
  bool populated = m.transition < p.transitions.size() && c.count(move_source(p, m)) > 0;
  if (!enabled(p, c, m, populated, why)) return std::nullopt;
  const auto& t = p.transitions[m.transition];
  ConcreteConfiguration next = c;
  if (t.action.kind == ActionKind::Write) next.set_symbol(m.round, t.action.reg, t.action.symbol);
  next.remove(move_source(p, m));
  next.add(move_destination(p, m));
  next.trim();
  return next;
}

AbstractConfiguration abstract_step(const Protocol& p, const AbstractConfiguration& c, const Move& m) {
  std::string why;
  auto next = try_abstract_step(p, c, m, &why);
  if (!next) throw NotEnabledError(0, why);
  return *next;
}

ConcreteConfiguration concrete_step(const Protocol& p, const ConcreteConfiguration& c, const Move& m) {
  std::string why;
  auto next = try_concrete_step(p, c, m, &why);
  if (!next) throw NotEnabledError(0, why);
  return *next;
}

std::vector<Successor> abstract_successors(const Protocol& p, const AbstractConfiguration& c,
                                           std::optional<RoundWindow> window) {
  std::vector<Successor> out;
  int lo = 0, hi = 0;
  if (p.round_based()) {
    if (!window) throw Error(ErrorCode::MissingWindow, "round-based successors need a round window");
    lo = std::max(window->lo, 0);
    hi = window->hi;
  }
  for (TransitionId i = 0; i < p.transitions.size(); ++i) {
    const auto& t = p.transitions[i];
    bool inc = t.action.kind == ActionKind::Increment;
    for (int k = lo; k <= hi; ++k) {
      if (inc && k + 1 > hi) continue;
      if (!c.has({t.source, k})) continue;
      Move keep{i, k, false};
      auto a = try_abstract_step(p, c, keep);
      if (!a) continue;
      out.push_back({keep, *a});
      Move desert{i, k, true};
      auto b = try_abstract_step(p, c, desert);
      if (b && !(*b == *a)) out.push_back({desert, *b});
    }
  }
  return out;
}

std::vector<AbstractConfiguration> replay_all(const Protocol& p, const Execution& e) {
  std::vector<AbstractConfiguration> out;
  out.reserve(e.steps.size() + 1);
  out.push_back(e.start);
  out.back().trim();
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    std::string why;
    auto next = try_abstract_step(p, out.back(), e.steps[i], &why);
    if (!next) throw NotEnabledError(i, why);
    out.push_back(std::move(*next));
  }
  return out;
}

AbstractConfiguration replay(const Protocol& p, const Execution& e) {
  AbstractConfiguration c = e.start;
  c.trim();
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    std::string why;
    auto next = try_abstract_step(p, c, e.steps[i], &why);
    if (!next) throw NotEnabledError(i, why);
    c = std::move(*next);
  }
  return c;
}

ConcreteConfiguration replay(const Protocol& p, const ConcreteExecution& e) {
  ConcreteConfiguration c = e.start;
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    std::string why;
    auto next = try_concrete_step(p, c, e.steps[i], &why);
    if (!next) throw NotEnabledError(i, why);
    c = std::move(*next);
  }
  return c;
}

ConcreteExecution copycat_extend(const Protocol& p, const ConcreteExecution& e, Location target) {
  ConcreteConfiguration final_config = replay(p, e);
  if (final_config.count(target) == 0)
    throw Error(ErrorCode::TargetNotPopulated, "copycat target is not populated at the end");

  // Walk backwards: a step whose destination is the tracked location is
  // duplicated and tracking moves to its source.
  std::vector<int> copies(e.steps.size(), 1);
  Location tracked = target;
  for (std::size_t i = e.steps.size(); i-- > 0;) {
    if (move_destination(p, e.steps[i]) == tracked) {
      copies[i] = 2;
      tracked = move_source(p, e.steps[i]);
    }
  }
  ConcreteExecution out;
  out.start = e.start;
  out.start.add(tracked);
  for (std::size_t i = 0; i < e.steps.size(); ++i)
    for (int c = 0; c < copies[i]; ++c) out.steps.push_back(e.steps[i]);
  return out;
}

ConcreteExecution abstract_to_concrete(const Protocol& p, const Execution& e) {
  ConcreteExecution out;
  out.start = ConcreteConfiguration(p.register_count);
  for (int k = 0; k < e.start.rounds(); ++k)
    for (std::size_t q = 0; q < p.states.size(); ++q)
      if (e.start.has({static_cast<StateId>(q), k})) out.start.add({static_cast<StateId>(q), k});
  for (int k = 0; k < e.start.rounds(); ++k)
    for (int j = 0; j < p.register_count; ++j)
      out.start.set_symbol(k, static_cast<RegisterId>(j), e.start.symbol(k, static_cast<RegisterId>(j)));

  ConcreteConfiguration cur = out.start;
  AbstractConfiguration abs = e.start;
  abs.trim();
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    const Move& m = e.steps[i];
    std::string why;
    auto next_abs = try_abstract_step(p, abs, m, &why);
    if (!next_abs) throw Error(ErrorCode::ReplayFailure, "abstract step " + std::to_string(i) + ": " + why);
    Location src = move_source(p, m);
    Location dst = move_destination(p, m);
    if (cur.count(src) == 0) throw Error(ErrorCode::ReplayFailure, "concrete source lost at step " + std::to_string(i));
    std::uint32_t repeat = 1;
    if (src != dst) {
      if (m.deserting) {
        repeat = cur.count(src);
      } else if (cur.count(src) == 1) {
        out = copycat_extend(p, out, src);
        cur = replay(p, out);
      }
    }
    for (std::uint32_t r = 0; r < repeat; ++r) {
      Move concrete = m;
      concrete.deserting = false;
      cur = concrete_step(p, cur, concrete);
      out.steps.push_back(concrete);
    }
    abs = std::move(*next_abs);
  }
  if (!(project(cur) == abs)) throw Error(ErrorCode::ReplayFailure, "concrete run does not match abstract run");
  return out;
}

std::string format_configuration(const Protocol& p, const AbstractConfiguration& c) {
  std::ostringstream os;
  os << "({";
  bool first = true;
  for (int k = 0; k < std::max(c.rounds(), 1); ++k)
    for (std::size_t q = 0; q < p.states.size(); ++q) {
      if (!c.has({static_cast<StateId>(q), k})) continue;
      os << (first ? "" : ", ") << p.states[q];
      if (p.round_based()) os << "@" << k;
      first = false;
    }
  os << "}, ";
  if (!p.round_based()) {
    os << "(";
    for (int j = 0; j < p.register_count; ++j)
      os << (j ? ", " : "") << p.alphabet[c.symbol(0, static_cast<RegisterId>(j))];
    os << ")";
  } else {
    os << "[";
    first = true;
    for (int k = 0; k < c.rounds(); ++k)
      for (int j = 0; j < p.register_count; ++j) {
        SymbolId s = c.symbol(k, static_cast<RegisterId>(j));
        if (s == kInitialSymbol) continue;
        os << (first ? "" : ", ") << j + 1 << "@" << k << "=" << p.alphabet[s];
        first = false;
      }
    os << "]";
  }
  os << ")";
  return os.str();
}

std::string format_configuration(const Protocol& p, const ConcreteConfiguration& c) {
  std::ostringstream os;
  os << "(";
  bool first = true;
  for (const auto& l : c.support()) {
    os << (first ? "" : " + ") << p.states[l.state];
    if (p.round_based()) os << "@" << l.round;
    if (c.count(l) > 1) os << "^" << c.count(l);
    first = false;
  }
  AbstractConfiguration a = project(c);
  std::string tail = format_configuration(p, a);
  // reuse the register part of the abstract rendering
  auto pos = tail.find("}, ");
  os << ", " << tail.substr(pos + 3);
  return os.str();
}

}  // namespace regverify
