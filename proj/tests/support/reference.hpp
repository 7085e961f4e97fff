#pragma once

// Naive re-implementations used as ground truth by the tests. Nothing here
// calls into the library's semantics, oracle or solvers.

#include <algorithm>
#include <array>
#include <cstdlib>
#include <cstdint>
#include <deque>
#include <functional>
#include <map>
#include <optional>
#include <set>
#include <stdexcept>
#include <string>
#include <tuple>
#include <utility>
#include <vector>

#include "regverify/configuration.hpp"
#include "regverify/protocol.hpp"
#include "regverify/reductions.hpp"

namespace regverify::reference {

/// Populated locations and non-d0 registers, both as ordered sets.
struct Snapshot {
  std::set<std::pair<int, StateId>> populated;                    // (round, state)
  std::map<std::pair<int, RegisterId>, SymbolId> registers;       // non-d0 only
  auto operator<=>(const Snapshot&) const = default;
};

inline Snapshot snapshot(const Protocol& p, const AbstractConfiguration& c) {
  Snapshot s;
  for (int k = 0; k < c.rounds(); ++k) {
    for (std::size_t q = 0; q < p.states.size(); ++q)
      if (c.has({static_cast<StateId>(q), k})) s.populated.insert({k, static_cast<StateId>(q)});
    for (int j = 0; j < p.register_count; ++j) {
      SymbolId a = c.symbol(k, static_cast<RegisterId>(j));
      if (a != kInitialSymbol) s.registers[{k, static_cast<RegisterId>(j)}] = a;
    }
  }
  return s;
}

inline SymbolId reg_of(const Snapshot& s, int round, RegisterId j) {
  auto it = s.registers.find({round, j});
  return it == s.registers.end() ? kInitialSymbol : it->second;
}

/// Round of the process after firing `t` from round `k`.
inline int next_round(const Transition& t, int k) { return t.action.kind == ActionKind::Increment ? k + 1 : k; }

/// Checks the register condition of `t` fired by a process on round `k`.
template <class RegFn>
bool register_allows(const Transition& t, int k, RegFn reg) {
  if (t.action.kind != ActionKind::Read) return true;
  int at = k - t.action.depth;
  if (at < 0) return false;
  return reg(at, t.action.reg) == t.action.symbol;
}

/// Abstract successors: every enabled transition in kept and deserting form.
/// Round-based moves are restricted to effects on rounds <= max_round.
inline std::set<Snapshot> abstract_successors(const Protocol& p, const Snapshot& s, int max_round = 0) {
  std::set<Snapshot> out;
  for (const auto& [k, q] : s.populated) {
    for (const auto& t : p.transitions) {
      if (t.source != q) continue;
      int k2 = next_round(t, k);
      if (k2 > max_round) continue;
      if (!register_allows(t, k, [&](int r, RegisterId j) { return reg_of(s, r, j); })) continue;
      Snapshot n = s;
      if (t.action.kind == ActionKind::Write) n.registers[{k, t.action.reg}] = t.action.symbol;
      n.populated.insert({k2, t.destination});
      out.insert(n);
      n.populated.erase({k, q});
      n.populated.insert({k2, t.destination});
      out.insert(n);
    }
  }
  return out;
}

inline std::vector<StateId> initial_states(const Protocol& p) {
  std::vector<StateId> out;
  for (std::size_t q = 0; q < p.states.size(); ++q)
    if (p.initial.test(q)) out.push_back(static_cast<StateId>(q));
  return out;
}

/// Abstract configurations reachable from `starts`.
inline std::set<Snapshot> reach_from(const Protocol& p, const std::set<Snapshot>& starts, int max_round = 0) {
  std::set<Snapshot> seen = starts;
  std::deque<Snapshot> work(starts.begin(), starts.end());
  while (!work.empty()) {
    Snapshot s = work.front();
    work.pop_front();
    for (const auto& n : abstract_successors(p, s, max_round))
      if (seen.insert(n).second) work.push_back(n);
  }
  return seen;
}

/// Abstract reach set from every nonempty subset of initial states.
inline std::set<Snapshot> abstract_reach(const Protocol& p, int max_round = 0) {
  auto init = initial_states(p);
  std::set<Snapshot> starts;
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << init.size()); ++mask) {
    Snapshot s;
    for (std::size_t i = 0; i < init.size(); ++i)
      if (mask >> i & 1) s.populated.insert({0, init[i]});
    starts.insert(s);
  }
  return reach_from(p, starts, max_round);
}

/// Concrete configuration: process count per (round, state).
struct Population {
  std::map<std::pair<int, StateId>, int> counts;
  std::map<std::pair<int, RegisterId>, SymbolId> registers;
  auto operator<=>(const Population&) const = default;
};

inline Snapshot support(const Population& c) {
  Snapshot s;
  for (const auto& [l, n] : c.counts)
    if (n > 0) s.populated.insert(l);
  s.registers = c.registers;
  return s;
}

/// Supports reachable with exactly `processes` processes starting on initial states.
inline std::set<Snapshot> concrete_supports(const Protocol& p, int processes, int max_round = 0) {
  auto init = initial_states(p);
  std::set<Population> seen;
  std::deque<Population> work;
  std::function<void(std::size_t, int, Population&)> start = [&](std::size_t i, int left, Population& c) {
    if (i + 1 == init.size()) {
      if (left > 0) c.counts[{0, init[i]}] = left;
      if (seen.insert(c).second) work.push_back(c);
      c.counts.erase({0, init[i]});
      return;
    }
    for (int n = 0; n <= left; ++n) {
      if (n > 0) c.counts[{0, init[i]}] = n;
      start(i + 1, left - n, c);
      c.counts.erase({0, init[i]});
    }
  };
  Population empty;
  if (!init.empty()) start(0, processes, empty);
  std::set<Snapshot> out;
  while (!work.empty()) {
    Population c = work.front();
    work.pop_front();
    out.insert(support(c));
    for (const auto& [l, n] : c.counts) {
      auto [k, q] = l;
      for (const auto& t : p.transitions) {
        if (t.source != q) continue;
        int k2 = next_round(t, k);
        if (k2 > max_round) continue;
        auto reg = [&](int r, RegisterId j) {
          auto it = c.registers.find({r, j});
          return it == c.registers.end() ? kInitialSymbol : it->second;
        };
        if (!register_allows(t, k, reg)) continue;
        Population d = c;
        if (t.action.kind == ActionKind::Write) d.registers[{k, t.action.reg}] = t.action.symbol;
        if (--d.counts[l] == 0) d.counts.erase(l);
        ++d.counts[{k2, t.destination}];
        if (seen.insert(d).second) work.push_back(d);
      }
    }
  }
  return out;
}

/// Fires `steps` one process at a time; empty when some step is disabled.
inline std::optional<Population> replay(const Protocol& p, Population c, const std::vector<Move>& steps) {
  for (const auto& m : steps) {
    const auto& t = p.transitions[m.transition];
    std::pair<int, StateId> src{m.round, t.source};
    auto it = c.counts.find(src);
    if (it == c.counts.end() || it->second == 0) return std::nullopt;
    auto reg = [&](int r, RegisterId j) {
      auto f = c.registers.find({r, j});
      return f == c.registers.end() ? kInitialSymbol : f->second;
    };
    if (!register_allows(t, m.round, reg)) return std::nullopt;
    if (t.action.kind == ActionKind::Write) c.registers[{m.round, t.action.reg}] = t.action.symbol;
    if (--it->second == 0) c.counts.erase(it);
    ++c.counts[{next_round(t, m.round), t.destination}];
  }
  return c;
}

inline Population population(const ConcreteConfiguration& c, std::size_t states) {
  Population out;
  for (int k = 0; k < c.rounds(); ++k) {
    for (std::size_t q = 0; q < states; ++q)
      if (auto n = c.count({static_cast<StateId>(q), k})) out.counts[{k, static_cast<StateId>(q)}] = static_cast<int>(n);
    for (int j = 0; j < c.register_count(); ++j)
      if (auto a = c.symbol(k, static_cast<RegisterId>(j)); a != kInitialSymbol)
        out.registers[{k, static_cast<RegisterId>(j)}] = a;
  }
  return out;
}

/// Satisfiability by enumerating all assignments.
inline bool truth_table(int variables, const std::vector<std::array<int, 3>>& clauses) {
  for (std::uint64_t a = 0; a < (std::uint64_t{1} << variables); ++a) {
    bool all = true;
    for (const auto& c : clauses) {
      bool any = false;
      for (int lit : c) {
        bool value = a >> (std::abs(lit) - 1) & 1;
        any = any || (lit > 0 ? value : !value);
      }
      all = all && any;
    }
    if (all) return true;
  }
  return false;
}

/// Evaluates a circuit by memoized recursion on wire names.
inline bool circuit_value(const Circuit& c) {
  std::map<std::string, bool> value;
  for (const auto& [name, v] : c.inputs) value[name] = v;
  std::function<bool(const std::string&, int)> eval = [&](const std::string& w, int fuel) -> bool {
    if (auto it = value.find(w); it != value.end()) return it->second;
    if (fuel == 0) throw std::runtime_error("cycle");
    for (const auto& g : c.gates) {
      if (g.out != w) continue;
      bool a = eval(g.in1, fuel - 1);
      bool r = g.kind == Gate::Kind::Not ? !a
               : g.kind == Gate::Kind::And ? a && eval(g.in2, fuel - 1)
                                           : a || eval(g.in2, fuel - 1);
      return value[w] = r;
    }
    throw std::runtime_error("undefined wire " + w);
  };
  return eval(c.output, static_cast<int>(c.gates.size()) + 1);
}

/// Normal-form findings for an abstract execution: every step deserts,
/// populates a location for the first time, or writes a symbol that is read
/// before being overwritten or that remains in the register at the end; no
/// location is populated again after being deserted. Also reports the largest
/// number of steps on one round.
struct NormalFormCheck {
  std::vector<std::string> violations;
  std::size_t max_per_round = 0;
};

inline NormalFormCheck check_normal_form(const Protocol& p, const AbstractConfiguration& start,
                                         const std::vector<Move>& steps) {
  NormalFormCheck out;
  Snapshot s = snapshot(p, start);
  std::set<std::pair<int, StateId>> ever = s.populated;
  std::set<std::pair<int, StateId>> deserted;
  std::map<int, std::size_t> per_round;
  // Write indices that are consumed by a later read before being overwritten.
  std::map<std::pair<int, RegisterId>, std::size_t> last_writer;
  std::set<std::size_t> read_writes;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& t = p.transitions[steps[i].transition];
    int k = steps[i].round;
    if (t.action.kind == ActionKind::Read) {
      auto it = last_writer.find({k - t.action.depth, t.action.reg});
      if (it != last_writer.end()) read_writes.insert(it->second);
    } else if (t.action.kind == ActionKind::Write) {
      last_writer[{k, t.action.reg}] = i;
    }
  }
  std::set<std::size_t> final_writes;
  for (const auto& [_, i] : last_writer) final_writes.insert(i);

  for (std::size_t i = 0; i < steps.size(); ++i) {
    const auto& m = steps[i];
    const auto& t = p.transitions[m.transition];
    int k = m.round;
    std::pair<int, StateId> src{k, t.source};
    std::pair<int, StateId> dst{next_round(t, k), t.destination};
    ++per_round[k];
    bool self = src == dst;
    bool deserts = m.deserting && !self;
    bool fresh = !ever.count(dst);
    bool useful_write = t.action.kind == ActionKind::Write && (read_writes.count(i) || final_writes.count(i));
    if (!deserts && !fresh && !useful_write) out.violations.push_back("step " + std::to_string(i) + " is useless");
    if (deserted.count(dst)) out.violations.push_back("step " + std::to_string(i) + " repopulates a deserted location");
    if (deserts) {
      if (deserted.count(src)) out.violations.push_back("step " + std::to_string(i) + " deserts twice");
      deserted.insert(src);
    }
    ever.insert(dst);
  }
  for (const auto& [_, n] : per_round) out.max_per_round = std::max(out.max_per_round, n);
  return out;
}

}  // namespace regverify::reference
