#include "regverify/roundbased.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <exception>
#include <functional>
#include <limits>
#include <map>
#include <optional>
#include <set>
#include <string>
#include <thread>
#include <tuple>
#include <unordered_map>
#include <unordered_set>

#include "regverify/error.hpp"
#include "regverify/semantics.hpp"

namespace regverify {

std::size_t default_step_cap(const Protocol& p) {
  std::size_t v = static_cast<std::size_t>(std::max(p.visibility, 1));
  return (v + 1) * p.states.size() * (2 * v + 5);
}

namespace {

int visibility(const Protocol& p) { return std::max(p.visibility, 1); }

void append_int(std::string& out, std::uint32_t x) {
  for (int i = 0; i < 4; ++i) out.push_back(static_cast<char>((x >> (8 * i)) & 0xffU));
}

void append_ints(std::string& out, const std::vector<int>& xs) {
  for (int x : xs) append_int(out, static_cast<std::uint32_t>(x));
}

}  // namespace

std::string Observation::key() const {
  std::string out;
  append_int(out, static_cast<std::uint32_t>(timeline.size()));
  out.append(timeline.begin(), timeline.end());
  for (bool b : pending) out.push_back(b ? '1' : '0');
  append_ints(out, first_seen);
  append_ints(out, arrival);
  return out;
}

bool dominates(const Observation& stronger, const Observation& weaker) {
  const auto& a = stronger;
  const auto& b = weaker;
  if (a.width != b.width || a.first_seen.size() != b.first_seen.size() || a.arrival.size() != b.arrival.size())
    return false;
  std::size_t n = b.entries(), m = a.entries();
  if (n == 0 || m == 0) return n == m;
  for (std::size_t q = 0; q < a.arrival.size(); ++q)
    if ((a.arrival[q] < 0) != (b.arrival[q] < 0)) return false;
  for (std::size_t q = 0; q < a.first_seen.size(); ++q)
    if (b.first_seen[q] >= 0 && a.first_seen[q] < 0) return false;
  auto same = [&](std::size_t i, std::size_t j) {
    return std::equal(b.timeline.begin() + static_cast<std::ptrdiff_t>(i * b.width),
                      b.timeline.begin() + static_cast<std::ptrdiff_t>((i + 1) * b.width),
                      a.timeline.begin() + static_cast<std::ptrdiff_t>(j * a.width));
  };
  // Entry i of the weaker timeline may sit at entry j of the stronger one.
  auto fits = [&](std::size_t i, std::size_t j) {
    if (!same(i, j)) return false;
    if (a.pending[j] && !b.pending[i]) return false;
    for (std::size_t q = 0; q < b.first_seen.size(); ++q)
      if (b.first_seen[q] == static_cast<int>(i) && a.first_seen[q] > static_cast<int>(j)) return false;
    for (std::size_t q = 0; q < b.arrival.size(); ++q)
      if (b.arrival[q] == static_cast<int>(i) && a.arrival[q] > static_cast<int>(j)) return false;
    return true;
  };
  std::vector<char> reach(m, 0);
  reach[0] = fits(0, 0);
  for (std::size_t i = 1; i < n; ++i) {
    std::vector<char> next(m, 0);
    for (std::size_t j = 0; j < m; ++j) {
      if (!reach[j]) continue;
      for (std::size_t j2 = j + 1; j2 < m; ++j2) {
        if (fits(i, j2)) next[j2] = 1;
        if (a.pending[j2]) break;
      }
    }
    reach = std::move(next);
  }
  return reach[m - 1] != 0;
}

namespace {

class BridgeEnumerator {
 public:
  BridgeEnumerator(const Protocol& p, const Footprint& tau, const std::vector<bool>& pending, const StateSet& initial,
                   int k, const BridgeOptions& opts)
      : p_(p), tau_(tau), tau_pending_(pending), k_(k), v_(visibility(p)), opts_(opts) {
    lo_ = std::max(k - v_, 0);
    top_lo_ = std::max(k - v_ + 1, 0);
    cap_ = opts.step_cap ? opts.step_cap : default_step_cap(p);
    if (k > 0 && (tau.lo() != lo_ || tau.hi() != k - 1))
      throw Error(ErrorCode::WindowNotContained, "carried footprint has the wrong window");
    if (tau_pending_.size() < tau.steps.size()) tau_pending_.resize(tau.steps.size(), false);
    start_ = tau.start.widen(lo_, k);
    if (k == 0)
      for (std::size_t q = 0; q < p.states.size(); ++q)
        if (initial.test(q)) start_.set({static_cast<StateId>(q), 0}, true);
    for (const auto& t : p.transitions)
      if (t.action.kind == ActionKind::Increment) inc_sources_.set(t.source);
    observed_ = opts.observed ? *opts.observed : ~StateSet{};
    count_readers();
    mark_visible_steps();
  }

  std::vector<Bridge> run_normal() {
    normal_ = true;
    State s = initial_state();
    explore(s);
    return std::move(bridges_);
  }

  std::vector<Footprint> run_all() {
    normal_ = false;
    State s = initial_state();
    explore(s);
    return std::move(footprints_);
  }

 private:
  struct State {
    std::size_t pos = 0;
    LocalConfiguration cfg;
    std::vector<Move> steps;
    std::vector<char> pend;        // per bridge step
    std::vector<int> tau_index;    // per bridge step, -1 for added moves
    std::vector<int> step_entry;   // per bridge step, register timeline entry it created or -1
    std::vector<char> tau_pend;    // per carried step
    std::vector<int> writer;       // per window register, bridge step index or -1
    StateSet ever;                 // round-k locations populated so far
    StateSet deserted;             // round-k locations deserted so far
    std::vector<SymbolId> timeline;  // register vectors of [top_lo, k], one entry per change
    std::vector<char> entry_pend;    // per timeline entry
    std::vector<int> first_seen;     // per state, timeline entry where (q, k) got populated
    std::vector<int> arrival;        // per state, timeline entry where a process reached (q, k+1)
    std::size_t extra = 0;
    bool mid_block = false;
    std::vector<std::uint8_t> stale;  // per window round, register and symbol: overwritten pending writes
  };

  /// Per register and symbol: read sources plus read destinations at depth
  /// at least one. In normal form every read deserts its source or reaches a
  /// fresh location, so this bounds the reads of one round's register by a
  /// later round.
  void count_readers() {
    readers_.assign(static_cast<std::size_t>(p_.register_count) * p_.alphabet.size(), 0);
    std::vector<StateSet> sources(readers_.size()), dests(readers_.size());
    for (const auto& t : p_.transitions) {
      if (t.action.kind != ActionKind::Read || t.action.depth < 1) continue;
      std::size_t i = t.action.reg * p_.alphabet.size() + t.action.symbol;
      sources[i].set(t.source);
      dests[i].set(t.destination);
    }
    for (std::size_t i = 0; i < readers_.size(); ++i) readers_[i] = sources[i].count() + dests[i].count();
  }

  /// A carried step is visible to added moves when it writes, moves a process
  /// to round k, or first populates an increment source on round k-1. Added
  /// moves only go after visible steps; the other steps commute with them.
  void mark_visible_steps() {
    visible_.assign(tau_.steps.size(), false);
    tail_ = 0;
    if (tau_.steps.empty()) return;
    auto configs = footprint_configurations(p_, tau_);
    for (std::size_t i = 0; i < tau_.steps.size(); ++i) {
      const auto& m = tau_.steps[i];
      Location dest = move_destination(p_, m);
      bool vis = p_.transitions[m.transition].action.kind == ActionKind::Write || dest.round == k_;
      if (!vis && dest.round == k_ - 1 && inc_sources_.test(dest.state)) vis = !configs[i].has(dest);
      visible_[i] = vis;
      if (vis) tail_ = i + 1;
    }
  }

  std::size_t width() const {
    return static_cast<std::size_t>(k_ - top_lo_ + 1) * static_cast<std::size_t>(p_.register_count);
  }

  std::vector<SymbolId> top_registers(const LocalConfiguration& c) const {
    std::vector<SymbolId> out;
    out.reserve(width());
    for (int round = top_lo_; round <= k_; ++round)
      for (int j = 0; j < p_.register_count; ++j) out.push_back(c.symbol(round, static_cast<RegisterId>(j)));
    return out;
  }

  State initial_state() {
    State s;
    s.cfg = start_;
    s.tau_pend.assign(tau_pending_.begin(), tau_pending_.end());
    s.stale.assign(static_cast<std::size_t>(k_ - lo_ + 1) * p_.register_count * p_.alphabet.size(), 0);
    s.writer.assign(static_cast<std::size_t>(k_ - lo_ + 1) * static_cast<std::size_t>(p_.register_count), -1);
    s.ever = start_.round_set(k_);
    s.timeline = top_registers(start_);
    s.entry_pend.push_back(0);
    s.first_seen.assign(p_.states.size(), -1);
    s.arrival.assign(p_.states.size(), -1);
    for (std::size_t q = 0; q < p_.states.size(); ++q)
      if (s.ever.test(q)) s.first_seen[q] = 0;
    return s;
  }

  int& writer(State& s, int round, RegisterId reg) {
    return s.writer[static_cast<std::size_t>(round - lo_) * static_cast<std::size_t>(p_.register_count) + reg];
  }

  void tick() {
    if (!opts_.work) return;
    ++*opts_.work;
    if (opts_.budget && *opts_.work > opts_.budget) throw BudgetExhausted{};
  }

  /// Applies a move; returns false when it is pruned.
  bool apply(State& s, const Move& m, int tau_idx, const LocalConfiguration& next) {
    const auto& t = p_.transitions[m.transition];
    StateSet before = s.cfg.round_set(k_);
    StateSet after = next.round_set(k_);
    if (normal_) {
      StateSet added = after & ~before;
      if ((added & s.deserted).any()) return false;
    }
    if (t.action.kind == ActionKind::Read && tau_idx < 0) {
      int round = m.round - t.action.depth;
      if (round >= lo_) {
        int w = writer(s, round, t.action.reg);
        if (w >= 0 && s.pend[static_cast<std::size_t>(w)]) {
          s.pend[static_cast<std::size_t>(w)] = 0;
          int ti = s.tau_index[static_cast<std::size_t>(w)];
          if (ti >= 0) s.tau_pend[static_cast<std::size_t>(ti)] = 0;
          int entry = s.step_entry[static_cast<std::size_t>(w)];
          if (entry >= 0) s.entry_pend[static_cast<std::size_t>(entry)] = 0;
        }
      }
    }
    char pending = 0;
    int entry = -1;
    if (normal_ && t.action.kind == ActionKind::Write) {
      // An overwritten pending symbol can only be read by later bridges.
      int w = writer(s, m.round, t.action.reg);
      if (w >= 0 && s.pend[static_cast<std::size_t>(w)]) {
        if (m.round < top_lo_) return false;
        SymbolId d = p_.transitions[s.steps[static_cast<std::size_t>(w)].transition].action.symbol;
        std::size_t slot = (static_cast<std::size_t>(m.round - lo_) * p_.register_count + t.action.reg) *
                               p_.alphabet.size() + d;
        std::size_t rounds = static_cast<std::size_t>(m.round + v_ - k_);
        if (++s.stale[slot] > rounds * readers_[t.action.reg * p_.alphabet.size() + d]) return false;
      }
    }
    if (t.action.kind == ActionKind::Write) {
      if (tau_idx >= 0) {
        pending = s.tau_pend[static_cast<std::size_t>(tau_idx)];
      } else {
        bool fresh = !s.ever.test(t.destination);
        pending = (!m.deserting && !fresh) ? 1 : 0;
      }
      writer(s, m.round, t.action.reg) = static_cast<int>(s.steps.size());
      if (m.round >= top_lo_) {
        auto regs = top_registers(next);
        if (!std::equal(regs.begin(), regs.end(), s.timeline.end() - static_cast<std::ptrdiff_t>(width()))) {
          s.timeline.insert(s.timeline.end(), regs.begin(), regs.end());
          s.entry_pend.push_back(pending);
          entry = static_cast<int>(s.entry_pend.size()) - 1;
        }
      }
    }
    int now = static_cast<int>(s.entry_pend.size()) - 1;
    StateSet added = after & ~before;
    for (std::size_t q = 0; q < p_.states.size(); ++q)
      if (added.test(q) && s.first_seen[q] < 0) s.first_seen[q] = now;
    if (t.action.kind == ActionKind::Increment && m.round == k_ && s.arrival[t.destination] < 0)
      s.arrival[t.destination] = now;
    s.deserted |= before & ~after;
    s.ever |= after;
    s.steps.push_back(m);
    s.pend.push_back(pending);
    s.tau_index.push_back(tau_idx);
    s.step_entry.push_back(entry);
    s.cfg = next;
    if (tau_idx >= 0) ++s.pos;
    else ++s.extra;
    return true;
  }

  Observation observe(const State& s, const std::vector<char>& entry_pend) const {
    Observation o;
    o.width = width();
    o.timeline = s.timeline;
    o.pending.assign(entry_pend.begin(), entry_pend.end());
    for (std::size_t q = 0; q < p_.states.size(); ++q)
      o.first_seen.push_back(inc_sources_.test(q) ? s.first_seen[q] : -1);
    o.arrival = s.arrival;
    return o;
  }

  std::string memo_key(const State& s) const {
    std::string key = observe(s, s.entry_pend).key();
    append_int(key, static_cast<std::uint32_t>(s.pos));
    key += s.cfg.restrict(k_, k_).key();
    for (std::size_t q = 0; q < p_.states.size(); ++q) {
      key.push_back(s.ever.test(q) ? '1' : '0');
      key.push_back(s.deserted.test(q) ? '1' : '0');
    }
    key.append(s.tau_pend.begin(), s.tau_pend.end());
    key.push_back(s.mid_block ? '1' : '0');
    key.append(s.stale.begin(), s.stale.end());
    for (int w : s.writer) key.push_back(w >= 0 && s.pend[static_cast<std::size_t>(w)] ? '1' : '0');
    return key;
  }

  void explore(State& s) {
    tick();
    if (normal_ && !visited_.insert(memo_key(s)).second) return;
    if (s.pos == tau_.steps.size()) finish(s);
    if (normal_ && s.pos == tail_ && tail_ < tau_.steps.size()) {
      State t = s;
      for (std::size_t i = tail_; i < tau_.steps.size(); ++i) {
        auto next = try_local_step(p_, t.cfg, tau_.steps[i]);
        if (!next || !apply(t, tau_.steps[i], static_cast<int>(i), *next)) break;
      }
      if (t.pos == tau_.steps.size()) finish(t);
    } else if (s.pos < tau_.steps.size()) {
      const Move& m = tau_.steps[s.pos];
      auto next = try_local_step(p_, s.cfg, m);
      if (next) {
        State t = s;
        t.mid_block = normal_ && !visible_[s.pos];
        if (apply(t, m, static_cast<int>(s.pos), *next)) explore(t);
      }
    }
    if (s.extra >= cap_ || s.mid_block) return;
    for (TransitionId i = 0; i < p_.transitions.size(); ++i) {
      const auto& t = p_.transitions[i];
      bool inc = t.action.kind == ActionKind::Increment;
      if (inc) {
        try_extra(s, Move{i, k_, true});
        if (k_ >= 1) try_extra(s, Move{i, k_ - 1, false});
      } else {
        try_extra(s, Move{i, k_, false});
        if (t.source != t.destination) try_extra(s, Move{i, k_, true});
      }
    }
  }

  void try_extra(const State& s, const Move& m) {
    const auto& t = p_.transitions[m.transition];
    if (m.round < lo_) return;
    if (!s.cfg.has({t.source, m.round})) return;
    auto next = try_local_step(p_, s.cfg, m);
    if (!next || *next == s.cfg) return;
    if (normal_ && !m.deserting) {
      bool fresh = !s.ever.test(t.destination);
      if (!fresh && t.action.kind != ActionKind::Write) return;
    }
    State n = s;
    if (apply(n, m, -1, *next)) explore(n);
  }

  void finish(const State& s) {
    Footprint b;
    b.start = start_;
    b.steps = s.steps;
    if (!normal_) {
      footprints_.push_back(std::move(b));
      return;
    }
    std::vector<char> pend = s.pend;
    std::vector<char> entry_pend = s.entry_pend;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      const auto& m = s.steps[i];
      const auto& a = p_.transitions[m.transition].action;
      if (a.kind != ActionKind::Write || !pend[i]) continue;
      bool last = s.writer[static_cast<std::size_t>(m.round - lo_) * static_cast<std::size_t>(p_.register_count) +
                           a.reg] == static_cast<int>(i);
      if (last) {
        pend[i] = 0;
        if (s.step_entry[i] >= 0) entry_pend[static_cast<std::size_t>(s.step_entry[i])] = 0;
      } else if (m.round < top_lo_) {
        return;
      }
    }
    // Pending writes still need one distinct read each from rounds k+1..round+v.
    std::map<std::tuple<int, RegisterId, SymbolId>, std::size_t> waiting;
    for (std::size_t i = 0; i < s.steps.size(); ++i) {
      if (!pend[i]) continue;
      const auto& m = s.steps[i];
      const auto& a = p_.transitions[m.transition].action;
      std::size_t n = ++waiting[{m.round, a.reg, a.symbol}];
      std::size_t rounds = static_cast<std::size_t>(m.round + v_ - k_);
      if (n > rounds * readers_[a.reg * p_.alphabet.size() + a.symbol]) return;
    }
    Bridge out;
    out.observation = observe(s, entry_pend);
    std::string key = out.observation.key();
    StateSet final_seen = s.cfg.round_set(k_) & observed_;
    for (std::size_t q = 0; q < p_.states.size(); ++q) key.push_back(final_seen.test(q) ? '1' : '0');
    if (!results_.insert(key).second) return;
    auto configs = footprint_configurations(p_, b);
    out.tau.start = configs[0].restrict(top_lo_, k_);
    LocalConfiguration cur = out.tau.start;
    for (std::size_t i = 0; i < b.steps.size(); ++i) {
      const auto& m = b.steps[i];
      if (p_.transitions[m.transition].action.kind == ActionKind::Increment && m.round == k_) out.top_increment = true;
      LocalConfiguration next = configs[i + 1].restrict(top_lo_, k_);
      if (next == cur) continue;
      out.tau.steps.push_back(m);
      out.pending.push_back(pend[i] != 0);
      cur = std::move(next);
    }
    out.bridge = std::move(b);
    bridges_.push_back(std::move(out));
  }

  const Protocol& p_;
  const Footprint& tau_;
  std::vector<bool> tau_pending_;
  int k_;
  int v_;
  BridgeOptions opts_;
  int lo_ = 0;
  int top_lo_ = 0;
  std::size_t cap_ = 0;
  bool normal_ = true;
  LocalConfiguration start_;
  StateSet inc_sources_;
  StateSet observed_;
  std::vector<bool> visible_;
  std::size_t tail_ = 0;
  std::vector<std::size_t> readers_;
  std::unordered_set<std::string> visited_;
  std::unordered_set<std::string> results_;
  std::vector<Bridge> bridges_;
  std::vector<Footprint> footprints_;
};

}  // namespace

std::vector<Bridge> enumerate_bridges(const Protocol& p, const Footprint& tau, const std::vector<bool>& pending,
                                      const StateSet& initial, int k, const BridgeOptions& opts) {
  if (!p.round_based()) throw Error(ErrorCode::InvalidArgument, "bridges need a round-based protocol");
  BridgeEnumerator e(p, tau, pending, initial, k, opts);
  if (!opts.normal_form) {
    std::vector<Bridge> out;
    for (auto& f : e.run_all()) {
      Bridge b;
      b.tau = project_footprint(p, f, k - visibility(p) + 1, k);
      b.pending.assign(b.tau.steps.size(), false);
      for (const auto& m : f.steps)
        if (p.transitions[m.transition].action.kind == ActionKind::Increment && m.round == k) b.top_increment = true;
      b.bridge = std::move(f);
      out.push_back(std::move(b));
    }
    return out;
  }
  return e.run_normal();
}

std::vector<Footprint> enumerate_bridge_footprints(const Protocol& p, const Footprint& tau, const StateSet& initial,
                                                   int k, std::size_t step_cap) {
  if (!p.round_based()) throw Error(ErrorCode::InvalidArgument, "bridges need a round-based protocol");
  BridgeOptions opts;
  opts.normal_form = false;
  opts.step_cap = step_cap;
  if (step_cap == 0) {
    // A zero cap still admits the carried moves alone.
    BridgeEnumerator e(p, tau, {}, initial, k, BridgeOptions{1, false, 0, nullptr});
    std::vector<Footprint> out;
    for (auto& f : e.run_all())
      if (f.steps.size() == tau.steps.size()) out.push_back(std::move(f));
    return out;
  }
  BridgeEnumerator e(p, tau, {}, initial, k, opts);
  return e.run_all();
}

namespace {

/// Closed literal whose term offset is relative to the current round.
using Literal = ClosedLiteral;

struct Obligations {
  std::vector<int> existential;
  std::vector<int> universal;
  std::vector<Literal> closed;
};

bool literal_holds(const LocalConfiguration& c, const Literal& l, int round) {
  const auto& a = l.atom;
  bool value = a.kind == RoundAtom::Kind::Pop ? c.has({a.state, round}) : c.symbol(round, a.reg) == a.symbol;
  return value == l.positive;
}

bool normalize_literals(std::vector<Literal>& ls) {
  std::sort(ls.begin(), ls.end());
  ls.erase(std::unique(ls.begin(), ls.end()), ls.end());
  for (std::size_t i = 0; i + 1 < ls.size(); ++i)
    if (ls[i].atom == ls[i + 1].atom) return false;
  return true;
}

class Solver {
 public:
  Solver(const Protocol& p, const RoundConstraint& psi, const RoundBasedOptions& opts)
      : p_(p), psi_(psi), opts_(opts), v_(visibility(p)) {}

  /// Searches every root branch, or only branch `only` when given.
  Verdict run(std::optional<std::size_t> only = std::nullopt) {
    auto t0 = std::chrono::steady_clock::now();
    for (const auto& apc : psi_.apcs)
      for_each_atom(apc.body, [&](const RoundAtom& a) {
        if (a.kind == RoundAtom::Kind::Pop) observed_.set(a.state);
      });
    Verdict verdict;
    verdict.algorithm = "footprint-search";
    verdict.answer = Answer::Negative;
    std::vector<StateId> q0;
    for (StateId q = 0; q < p_.states.size(); ++q)
      if (p_.initial.test(q)) q0.push_back(q);
    if (q0.size() > 16) throw Error(ErrorCode::CapExceeded, "too many initial states");
    roots_ = 0;
    try {
      for (const auto& cand : decompose_apcs(psi_)) {
        Obligations root;
        for (const auto& body : cand.existential) root.existential.push_back(intern(body));
        for (const auto& body : cand.universal) root.universal.push_back(intern(body));
        root.closed = cand.closed;
        if (!normalize_literals(root.closed)) continue;
        std::sort(root.existential.begin(), root.existential.end());
        root.existential.erase(std::unique(root.existential.begin(), root.existential.end()), root.existential.end());
        std::sort(root.universal.begin(), root.universal.end());
        root.universal.erase(std::unique(root.universal.begin(), root.universal.end()), root.universal.end());
        for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q0.size()); ++mask) {
          if (only && roots_++ != *only) continue;
          if (!only) ++roots_;
          initial_.reset();
          for (std::size_t i = 0; i < q0.size(); ++i)
            if ((mask >> i) & 1U) initial_.set(q0[i]);
          Footprint empty{LocalConfiguration(0, -1, p_.register_count), {}};
          if (search(0, empty, {}, root)) {
            verdict.answer = Answer::Positive;
            verdict.witness = witness_;
            break;
          }
        }
        if (verdict.answer == Answer::Positive) break;
      }
    } catch (const BudgetExhausted&) {
      verdict.answer = Answer::Unknown;
      verdict.detail = "budget of " + std::to_string(opts_.budget) + " nodes exhausted";
    }
    verdict.stats.explored_nodes = work_;
    if (verdict.witness) verdict.stats.witness_steps = verdict.witness->steps.size();
    verdict.stats.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
    return verdict;
  }

  /// Root branches seen by the last run.
  std::size_t roots() const { return roots_; }

 private:
  int intern(const Proposition& body) {
    for (std::size_t i = 0; i < bodies_.size(); ++i)
      if (bodies_[i] == body) return static_cast<int>(i);
    bodies_.push_back(body);
    return static_cast<int>(bodies_.size() - 1);
  }

  void tick() {
    ++work_;
    if (opts_.budget && work_ > opts_.budget) throw BudgetExhausted{};
  }

  /// Literal sets over later rounds that make `body` true at round k.
  std::vector<std::vector<Literal>> options(int body, const LocalConfiguration& c, int k) {
    std::string key = std::to_string(body) + ":" + c.restrict(k, k).key();
    auto it = option_cache_.find(key);
    if (it != option_cache_.end()) return it->second;
    Proposition residual = substitute(bodies_[static_cast<std::size_t>(body)], [&](const RoundAtom& a) {
      if (a.term.offset != 0) return -1;
      return literal_holds(c, Literal{a, true}, k) ? 1 : 0;
    });
    std::vector<std::vector<Literal>> out;
    if (residual.op == Proposition::Op::True) {
      out.push_back({});
    } else if (residual.op != Proposition::Op::False) {
      std::vector<RoundAtom> atoms;
      for_each_atom(residual, [&](const RoundAtom& a) {
        if (std::find(atoms.begin(), atoms.end(), a) == atoms.end()) atoms.push_back(a);
      });
      int n = static_cast<int>(atoms.size());
      auto f = [&](std::uint64_t bits) {
        return evaluate(residual, [&](const RoundAtom& a) {
          auto pos = std::find(atoms.begin(), atoms.end(), a) - atoms.begin();
          return ((bits >> pos) & 1U) != 0;
        });
      };
      for (const auto& imp : prime_implicants(n, f)) {
        std::vector<Literal> ls;
        for (auto [var, value] : imp) {
          RoundAtom a = atoms[static_cast<std::size_t>(var)];
          a.term.variable = false;
          ls.push_back(Literal{a, value});
        }
        out.push_back(std::move(ls));
      }
    }
    option_cache_.emplace(key, out);
    return out;
  }

  bool tail_holds(int body) const {
    return evaluate(bodies_[static_cast<std::size_t>(body)], [](const RoundAtom& a) { return tail_value(a); });
  }

  /// All obligation states after round k given its final content `c`.
  std::vector<Obligations> one_step(const Obligations& in, const LocalConfiguration& c, int k) {
    std::vector<std::vector<std::vector<Literal>>> universal;
    for (int body : in.universal) {
      universal.push_back(options(body, c, k));
      if (universal.back().empty()) return {};
    }
    std::vector<std::vector<std::vector<Literal>>> existential;
    for (int body : in.existential) existential.push_back(options(body, c, k));

    std::vector<Obligations> out;
    std::set<std::pair<std::vector<int>, std::vector<Literal>>> seen;
    std::vector<Literal> added;
    std::vector<int> waiting;
    std::function<void(std::size_t)> pick_existential;
    std::function<void(std::size_t)> pick_universal = [&](std::size_t i) {
      if (i == universal.size()) {
        pick_existential(0);
        return;
      }
      for (const auto& opt : universal[i]) {
        std::size_t mark = added.size();
        added.insert(added.end(), opt.begin(), opt.end());
        pick_universal(i + 1);
        added.resize(mark);
      }
    };
    pick_existential = [&](std::size_t i) {
      if (i == existential.size()) {
        Obligations o;
        o.universal = in.universal;
        o.existential = waiting;
        for (const auto& l : in.closed) {
          if (l.atom.term.offset == 0) {
            if (!literal_holds(c, l, k)) return;
          } else {
            o.closed.push_back(l);
          }
        }
        o.closed.insert(o.closed.end(), added.begin(), added.end());
        if (!normalize_literals(o.closed)) return;
        if (!seen.insert({o.existential, o.closed}).second) return;
        out.push_back(std::move(o));
        return;
      }
      waiting.push_back(in.existential[i]);
      pick_existential(i + 1);
      waiting.pop_back();
      for (const auto& opt : existential[i]) {
        std::size_t mark = added.size();
        added.insert(added.end(), opt.begin(), opt.end());
        pick_existential(i + 1);
        added.resize(mark);
      }
    };
    pick_universal(0);
    return out;
  }

  bool test(const Obligations& o, bool top_increment) const {
    if (top_increment || !o.existential.empty()) return false;
    for (const auto& l : o.closed)
      if (tail_value(l.atom) != l.positive) return false;
    for (int body : o.universal)
      if (!tail_holds(body)) return false;
    return true;
  }

  std::string node_key(int k, const Obligations& o) const {
    std::string key;
    key.push_back(static_cast<char>(std::min(k, v_)));
    for (int e : o.existential) append_int(key, static_cast<std::uint32_t>(e));
    key.push_back('|');
    for (int u : o.universal) append_int(key, static_cast<std::uint32_t>(u));
    key.push_back('|');
    for (const auto& l : o.closed) {
      key.push_back(static_cast<char>(l.atom.kind));
      append_int(key, l.atom.state);
      append_int(key, l.atom.reg);
      key.push_back(static_cast<char>(l.atom.symbol));
      append_int(key, static_cast<std::uint32_t>(l.atom.term.offset));
      key.push_back(l.positive ? '+' : '-');
    }
    return key;
  }

  bool search(int k, const Footprint& tau, const std::vector<bool>& pending, const Obligations& obligations) {
    tick();
    BridgeOptions bo;
    bo.step_cap = opts_.step_cap;
    bo.budget = opts_.budget;
    bo.work = &work_;
    bo.observed = &observed_;
    auto children = enumerate_bridges(p_, tau, pending, initial_, k, bo);
    struct Candidate {
      const Bridge* child;
      Obligations next;
      std::string key;
    };
    std::vector<Candidate> candidates;
    for (const auto& child : children) {
      LocalConfiguration last = footprint_configurations(p_, child.tau).back();
      for (auto& next : one_step(obligations, last, k)) {
        if (test(next, child.top_increment)) {
          chain_.push_back(child.bridge);
          build_witness();
          return true;
        }
        for (auto& l : next.closed) --l.atom.term.offset;
        std::string key = node_key(k + 1, next);
        candidates.push_back({&child, std::move(next), std::move(key)});
      }
    }
    // Siblings dominated by another sibling with the same obligations add nothing.
    std::vector<bool> skip(candidates.size(), false);
    for (std::size_t i = 0; i < candidates.size(); ++i)
      for (std::size_t j = 0; j < candidates.size() && !skip[i]; ++j) {
        if (i == j || skip[j] || candidates[i].key != candidates[j].key) continue;
        const auto& a = candidates[j].child->observation;
        const auto& b = candidates[i].child->observation;
        skip[i] = dominates(a, b) && (j < i || !dominates(b, a));
      }
    for (std::size_t i = 0; i < candidates.size(); ++i) {
      if (skip[i]) continue;
      const auto& c = candidates[i];
      if (!fresh(c.key, c.child->observation)) continue;
      chain_.push_back(c.child->bridge);
      if (search(k + 1, c.child->tau, c.child->pending, c.next)) return true;
      chain_.pop_back();
    }
    return false;
  }

  /// Records a node unless an explored node with the same obligations dominates it.
  bool fresh(const std::string& key, const Observation& o) {
    auto& seen = memo_[key];
    for (const auto& s : seen)
      if (dominates(s, o)) return false;
    std::erase_if(seen, [&](const Observation& s) { return dominates(o, s); });
    seen.push_back(o);
    ++nodes_;
    return true;
  }

  void build_witness() {
    Execution e = combine_footprints(p_, chain_);
    AbstractConfiguration last = replay(p_, e);
    if (!eval_roundbased(last, psi_))
      throw Error(ErrorCode::ReplayFailure, "glued witness does not satisfy the constraint");
    witness_ = std::move(e);
  }

  const Protocol& p_;
  const RoundConstraint& psi_;
  RoundBasedOptions opts_;
  int v_;
  StateSet initial_;
  StateSet observed_;
  std::vector<Proposition> bodies_;
  std::unordered_map<std::string, std::vector<std::vector<Literal>>> option_cache_;
  std::unordered_map<std::string, std::vector<Observation>> memo_;
  std::size_t nodes_ = 0;
  std::vector<Footprint> chain_;
  std::optional<Execution> witness_;
  std::uint64_t work_ = 0;
  std::size_t roots_ = 0;
};

}  // namespace

Verdict solve_prp_roundbased(const Protocol& p, const RoundConstraint& psi, const RoundBasedOptions& opts) {
  if (!p.round_based()) throw Error(ErrorCode::InvalidArgument, "round-based solver on a roundless protocol");
  if (opts.threads <= 1) return Solver(p, psi, opts).run();

  auto t0 = std::chrono::steady_clock::now();
  std::size_t roots = 0;
  {
    RoundBasedOptions probe = opts;
    probe.budget = 1;
    Solver s(p, psi, probe);
    s.run(std::numeric_limits<std::size_t>::max());
    roots = s.roots();
  }
  std::vector<Verdict> results(roots);
  std::vector<std::exception_ptr> errors(roots);
  std::atomic<std::size_t> next{0};
  std::atomic<bool> found{false};
  auto worker = [&] {
    for (std::size_t i = next++; i < roots && !found; i = next++) {
      try {
        results[i] = Solver(p, psi, opts).run(i);
        if (results[i].answer == Answer::Positive) found = true;
      } catch (...) {
        errors[i] = std::current_exception();
      }
    }
  };
  std::vector<std::thread> pool;
  for (unsigned t = 0; t < std::min<std::size_t>(opts.threads, roots); ++t) pool.emplace_back(worker);
  for (auto& t : pool) t.join();
  for (const auto& e : errors)
    if (e) std::rethrow_exception(e);

  Verdict out;
  out.algorithm = "footprint-search";
  out.answer = Answer::Negative;
  for (auto& r : results) {
    out.stats.explored_nodes += r.stats.explored_nodes;
    if (r.answer == Answer::Positive && out.answer != Answer::Positive) {
      out.answer = Answer::Positive;
      out.witness = std::move(r.witness);
      out.stats.witness_steps = r.stats.witness_steps;
    } else if (r.answer == Answer::Unknown && out.answer == Answer::Negative) {
      out.answer = Answer::Unknown;
      out.detail = r.detail;
    }
  }
  if (out.answer == Answer::Negative && found) out.answer = Answer::Unknown;
  out.stats.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return out;
}

}  // namespace regverify
