#include "regverify/roundless.hpp"

#include <algorithm>
#include <chrono>
#include <functional>
#include <unordered_map>

#include "regverify/error.hpp"
#include "regverify/semantics.hpp"

namespace regverify {

namespace {

using Clock = std::chrono::steady_clock;

double elapsed_ms(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

void require_roundless(const Protocol& p, const char* what) {
  if (p.round_based()) throw Error(ErrorCode::InvalidArgument, std::string(what) + " needs a roundless protocol");
}

StateSet all_states(const Protocol& p) {
  StateSet s;
  for (std::size_t q = 0; q < p.states.size(); ++q) s.set(q);
  return s;
}

bool usable(const Transition& t, const StateSet& alive) { return alive.test(t.source) && alive.test(t.destination); }

}  // namespace

std::size_t bounded_search_limit(const Protocol& p) {
  std::size_t q = p.states.size();
  std::size_t r = static_cast<std::size_t>(p.register_count);
  std::size_t base = 4 * q;
  return (q >= 1 && 4 * q - 4 + r > base) ? 4 * q - 4 + r : base;
}

Verdict solve_prp_bounded(const Protocol& p, const RoundlessConstraint& phi, std::optional<std::size_t> limit) {
  require_roundless(p, "bounded search");
  auto t0 = Clock::now();
  const std::size_t bound = limit.value_or(bounded_search_limit(p));
  Verdict v;
  v.algorithm = "bounded";

  std::vector<AbstractConfiguration> roots;
  std::vector<StateId> q0;
  for (StateId q = 0; q < p.states.size(); ++q)
    if (p.initial.test(q)) q0.push_back(q);
  if (q0.size() > 20) throw Error(ErrorCode::CapExceeded, "bounded search: too many initial states");
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q0.size()); ++mask) {
    StateSet s;
    for (std::size_t i = 0; i < q0.size(); ++i)
      if ((mask >> i) & 1U) s.set(q0[i]);
    roots.push_back(initial_configuration(p, s));
  }

  std::vector<Move> path;
  std::unordered_map<AbstractConfiguration, std::size_t> best;  // configuration -> largest remaining depth seen
  std::function<bool(const AbstractConfiguration&, std::size_t)> dfs = [&](const AbstractConfiguration& c,
                                                                          std::size_t remaining) {
    auto it = best.find(c);
    if (it != best.end() && it->second >= remaining) return false;
    best[c] = remaining;
    ++v.stats.explored_nodes;
    if (eval_roundless(c, phi)) return true;
    if (remaining == 0) return false;
    for (const auto& s : abstract_successors(p, c)) {
      path.push_back(s.move);
      if (dfs(s.config, remaining - 1)) return true;
      path.pop_back();
    }
    return false;
  };

  for (std::size_t depth = 0; depth <= bound; ++depth) {
    best.clear();
    for (const auto& root : roots) {
      path.clear();
      if (dfs(root, depth)) {
        v.answer = Answer::Positive;
        v.witness = Execution{root, path};
        v.stats.witness_steps = path.size();
        v.stats.millis = elapsed_ms(t0);
        return v;
      }
    }
  }
  v.answer = Answer::Negative;
  v.stats.millis = elapsed_ms(t0);
  return v;
}

StateSet saturate_uninitialized(const Protocol& p) {
  require_roundless(p, "saturation");
  if (!is_uninitialized(p)) throw Error(ErrorCode::NotUninitialized, "protocol reads the initial symbol");
  StateSet s = p.initial;
  std::vector<std::vector<bool>> writable(static_cast<std::size_t>(p.register_count),
                                          std::vector<bool>(p.alphabet.size(), false));
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : p.transitions) {
      if (!s.test(t.source)) continue;
      const Action& a = t.action;
      if (a.kind == ActionKind::Write && !writable[a.reg][a.symbol]) {
        writable[a.reg][a.symbol] = true;
        changed = true;
      }
      bool fires = a.kind == ActionKind::Write || writable[a.reg][a.symbol];
      if (fires && !s.test(t.destination)) {
        s.set(t.destination);
        changed = true;
      }
    }
  }
  return s;
}

Verdict solve_cover_uninitialized(const Protocol& p, StateId target) {
  auto t0 = Clock::now();
  StateSet s = saturate_uninitialized(p);
  Verdict v;
  v.algorithm = "saturation";
  v.answer = s.test(target) ? Answer::Positive : Answer::Negative;
  v.stats.explored_nodes = s.count();
  v.detail = "coverable " + format_state_set(p, s);
  v.stats.millis = elapsed_ms(t0);
  return v;
}

namespace {

// Phase-i saturation for a first-write order; `written` holds x_1..x_i.
void saturate_phase(const Protocol& p, const std::vector<bool>& written, StateSet& s) {
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : p.transitions) {
      if (!s.test(t.source) || s.test(t.destination)) continue;
      const Action& a = t.action;
      bool fires = false;
      if (a.kind == ActionKind::Write) {
        fires = written[a.reg];
      } else if (a.symbol == kInitialSymbol) {
        fires = !written[a.reg];
      } else if (written[a.reg]) {
        for (const auto& w : p.transitions)
          if (w.action.kind == ActionKind::Write && w.action.reg == a.reg && w.action.symbol == a.symbol &&
              s.test(w.source)) {
            fires = true;
            break;
          }
      }
      if (fires) {
        s.set(t.destination);
        changed = true;
      }
    }
  }
}

bool can_write(const Protocol& p, const StateSet& s, RegisterId reg) {
  for (const auto& t : p.transitions)
    if (t.action.kind == ActionKind::Write && t.action.reg == reg && s.test(t.source)) return true;
  return false;
}

}  // namespace

StateSet saturate_with_order(const Protocol& p, const FirstWriteOrder& order) {
  require_roundless(p, "fixed-r saturation");
  std::vector<bool> written(static_cast<std::size_t>(p.register_count), false);
  StateSet s = p.initial;
  saturate_phase(p, written, s);
  for (RegisterId x : order) {
    if (!can_write(p, s, x)) return StateSet{};
    written[x] = true;
    saturate_phase(p, written, s);
  }
  return s;
}

Verdict solve_cover_fixed_r(const Protocol& p, StateId target) {
  require_roundless(p, "fixed-r");
  auto t0 = Clock::now();
  Verdict v;
  v.algorithm = "fixed-r";
  const auto r = static_cast<RegisterId>(p.register_count);

  // Depth-first over ordered prefixes; prefix order is lexicographic.
  FirstWriteOrder order;
  std::vector<bool> written(r, false);
  std::function<bool(StateSet)> search = [&](StateSet s) {
    ++v.stats.explored_nodes;
    saturate_phase(p, written, s);
    if (s.test(target)) return true;
    for (RegisterId x = 0; x < r; ++x) {
      if (written[x] || !can_write(p, s, x)) continue;
      written[x] = true;
      order.push_back(x);
      if (search(s)) return true;
      order.pop_back();
      written[x] = false;
    }
    return false;
  };
  bool found = search(p.initial);
  v.answer = found ? Answer::Positive : Answer::Negative;
  if (found) {
    v.detail = "first-write order:";
    for (auto x : order) v.detail += " " + std::to_string(x + 1);
  }
  v.stats.millis = elapsed_ms(t0);
  return v;
}

std::pair<Protocol, StateId> reduce_cover_to_target(const Protocol& p, StateId error) {
  require_roundless(p, "cover-to-target reduction");
  if (error >= p.states.size()) throw Error(ErrorCode::InvalidArgument, "unknown error state");
  Protocol out = p;
  std::string joker = "joker";
  for (int i = 1; out.find_symbol(joker); ++i) joker = "joker" + std::to_string(i);
  out.alphabet.push_back(joker);
  auto j = static_cast<SymbolId>(out.alphabet.size() - 1);
  out.transitions.push_back({error, Action::write(0, j), error});
  for (StateId q = 0; q < out.states.size(); ++q) out.transitions.push_back({q, Action::read(0, j), error});
  return {out, error};
}

Protocol reduce_initialized_to_uninit_r1(const Protocol& p) {
  require_roundless(p, "initialized-to-uninitialized reduction");
  if (p.register_count != 1) throw Error(ErrorCode::WrongRegisterCount, "reduction needs exactly one register");
  Protocol out = p;
  auto is_d0_read = [](const Transition& t) {
    return t.action.kind == ActionKind::Read && t.action.symbol == kInitialSymbol;
  };
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : p.transitions)
      if (is_d0_read(t) && out.initial.test(t.source) && !out.initial.test(t.destination)) {
        out.initial.set(t.destination);
        changed = true;
      }
  }
  out.transitions.erase(std::remove_if(out.transitions.begin(), out.transitions.end(), is_d0_read),
                        out.transitions.end());
  return out;
}

namespace {

void require_one_register_uninit(const Protocol& p) {
  require_roundless(p, "one-register analysis");
  if (p.register_count != 1) throw Error(ErrorCode::WrongRegisterCount, "one-register analysis needs r = 1");
  if (!is_uninitialized(p)) throw Error(ErrorCode::NotUninitialized, "protocol reads the initial symbol");
}

StateSet cov_set(const Protocol& p, const StateSet& alive) {
  StateSet s = p.initial & alive;
  std::vector<bool> writable(p.alphabet.size(), false);
  for (bool changed = true; changed;) {
    changed = false;
    for (const auto& t : p.transitions) {
      if (!usable(t, alive) || !s.test(t.source)) continue;
      if (t.action.kind == ActionKind::Write) {
        if (!writable[t.action.symbol]) {
          writable[t.action.symbol] = true;
          changed = true;
        }
        if (!s.test(t.destination)) {
          s.set(t.destination);
          changed = true;
        }
      } else if (writable[t.action.symbol] && !s.test(t.destination)) {
        s.set(t.destination);
        changed = true;
      }
    }
  }
  return s;
}

// Returns false for "Not found".
bool previous_symbol(const Protocol& p, const StateSet& alive, StateSet& s, const std::vector<bool>& symbols) {
  bool found = false;
  for (std::size_t a = 0; a < p.alphabet.size(); ++a) {
    if (!symbols[a]) continue;
    StateSet t = s;
    for (bool changed = true; changed;) {
      changed = false;
      for (const auto& tr : p.transitions)
        if (usable(tr, alive) && tr.action.kind == ActionKind::Read && tr.action.symbol == a &&
            t.test(tr.destination) && !t.test(tr.source)) {
          t.set(tr.source);
          changed = true;
        }
    }
    StateSet writers;
    for (const auto& tr : p.transitions)
      if (usable(tr, alive) && tr.action.kind == ActionKind::Write && tr.action.symbol == a && t.test(tr.destination))
        writers.set(tr.source);
    if (writers.any()) {
      s = t | writers;
      found = true;
    }
  }
  return found;
}

StateSet cocov_set(const Protocol& p, const StateSet& alive, const ClauseDecomposition& clause) {
  StateSet s = alive & ~clause.q_minus;
  if (!previous_symbol(p, alive, s, clause.d_ok.at(0))) return StateSet{};
  std::vector<bool> writable(p.alphabet.size(), true);
  writable[kInitialSymbol] = false;
  for (;;) {
    StateSet before = s;
    previous_symbol(p, alive, s, writable);
    if (s == before) break;
  }
  return s;
}

}  // namespace

StateSet compute_cov_set(const Protocol& p) {
  require_one_register_uninit(p);
  return cov_set(p, all_states(p));
}

StateSet compute_cocov_set(const Protocol& p, const ClauseDecomposition& clause) {
  require_one_register_uninit(p);
  return cocov_set(p, all_states(p), clause);
}

Verdict solve_dnfprp_one_register(const Protocol& p, const RoundlessConstraint& phi) {
  require_roundless(p, "one-register dnfPRP");
  if (p.register_count != 1) throw Error(ErrorCode::WrongRegisterCount, "one-register dnfPRP needs r = 1");
  auto t0 = Clock::now();
  auto clauses = dnf_clauses(p, phi);
  Protocol u = reduce_initialized_to_uninit_r1(p);
  Verdict v;
  v.algorithm = "one-reg";
  v.answer = Answer::Negative;
  for (std::size_t i = 0; i < clauses.size(); ++i) {
    const auto& clause = clauses[i];
    if (!clause.satisfiable) continue;
    ++v.stats.explored_nodes;
    // Executions without any write stay in an initial configuration.
    StateSet idle = u.initial & ~clause.q_minus;
    if (clause.d_ok[0][kInitialSymbol] && idle.any() && (clause.q_plus & ~idle).none()) {
      v.answer = Answer::Positive;
      v.detail = "clause " + std::to_string(i + 1) + " holds initially";
      break;
    }
    StateSet alive = all_states(u);
    for (;;) {
      StateSet next = alive & cov_set(u, alive) & cocov_set(u, alive, clause);
      if (next == alive) break;
      alive = next;
    }
    if (alive.any() && (clause.q_plus & ~alive).none()) {
      v.answer = Answer::Positive;
      v.detail = "clause " + std::to_string(i + 1) + " accepted with " + format_state_set(u, alive);
      break;
    }
  }
  v.stats.millis = elapsed_ms(t0);
  return v;
}

}  // namespace regverify
