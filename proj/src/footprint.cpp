#include "regverify/footprint.hpp"

#include <algorithm>
#include <map>
#include <set>

#include "regverify/error.hpp"
#include "regverify/semantics.hpp"

namespace regverify {

namespace {

const StateSet kEmptySet{};

}  // namespace

LocalConfiguration::LocalConfiguration(int lo, int hi, int register_count)
    : lo_(lo), hi_(hi), register_count_(register_count) {
  std::size_t n = hi >= lo ? static_cast<std::size_t>(hi - lo + 1) : 0;
  populated_.assign(n, StateSet{});
  registers_.assign(n * static_cast<std::size_t>(register_count), kInitialSymbol);
}

bool LocalConfiguration::has(Location l) const {
  if (!contains(l.round)) return false;
  return populated_[static_cast<std::size_t>(l.round - lo_)].test(l.state);
}

void LocalConfiguration::set(Location l, bool value) {
  if (!contains(l.round)) throw Error(ErrorCode::WindowNotContained, "location outside the window");
  populated_[static_cast<std::size_t>(l.round - lo_)].set(l.state, value);
}

const StateSet& LocalConfiguration::round_set(int round) const {
  if (!contains(round)) return kEmptySet;
  return populated_[static_cast<std::size_t>(round - lo_)];
}

SymbolId LocalConfiguration::symbol(int round, RegisterId reg) const {
  if (!contains(round)) return kInitialSymbol;
  return registers_[static_cast<std::size_t>(round - lo_) * static_cast<std::size_t>(register_count_) + reg];
}

void LocalConfiguration::set_symbol(int round, RegisterId reg, SymbolId value) {
  if (!contains(round)) throw Error(ErrorCode::WindowNotContained, "register outside the window");
  registers_[static_cast<std::size_t>(round - lo_) * static_cast<std::size_t>(register_count_) + reg] = value;
}

LocalConfiguration LocalConfiguration::restrict(int lo, int hi) const {
  if (hi >= lo && (lo < lo_ || hi > hi_))
    throw Error(ErrorCode::WindowNotContained, "window [" + std::to_string(lo) + "," + std::to_string(hi) +
                                                   "] not inside [" + std::to_string(lo_) + "," +
                                                   std::to_string(hi_) + "]");
  LocalConfiguration out(lo, hi, register_count_);
  for (int k = lo; k <= hi; ++k) {
    out.populated_[static_cast<std::size_t>(k - lo)] = round_set(k);
    for (int j = 0; j < register_count_; ++j) out.set_symbol(k, static_cast<RegisterId>(j), symbol(k, static_cast<RegisterId>(j)));
  }
  return out;
}

LocalConfiguration LocalConfiguration::widen(int lo, int hi) const {
  LocalConfiguration out(lo, hi, register_count_);
  for (int k = std::max(lo, lo_); k <= std::min(hi, hi_); ++k) {
    out.populated_[static_cast<std::size_t>(k - lo)] = round_set(k);
    for (int j = 0; j < register_count_; ++j) out.set_symbol(k, static_cast<RegisterId>(j), symbol(k, static_cast<RegisterId>(j)));
  }
  return out;
}

std::string LocalConfiguration::key() const {
  std::string out;
  out.push_back(static_cast<char>(populated_.size()));
  for (std::size_t i = 0; i < populated_.size(); ++i) {
    const auto& s = populated_[i];
    for (std::size_t q = 0; q < kMaxStates; ++q)
      if (s.test(q)) out.push_back(static_cast<char>(q));
    out.push_back('\xff');
    for (int j = 0; j < register_count_; ++j)
      out.push_back(static_cast<char>(registers_[i * static_cast<std::size_t>(register_count_) + static_cast<std::size_t>(j)]));
  }
  return out;
}

LocalConfiguration local_view(const AbstractConfiguration& c, int j, int k) {
  LocalConfiguration out(std::max(j, 0), k, c.register_count());
  for (int round = out.lo(); round <= k; ++round) {
    const auto& s = c.round_set(round);
    for (std::size_t q = 0; q < kMaxStates; ++q)
      if (s.test(q)) out.set({static_cast<StateId>(q), round}, true);
    for (int reg = 0; reg < c.register_count(); ++reg)
      out.set_symbol(round, static_cast<RegisterId>(reg), c.symbol(round, static_cast<RegisterId>(reg)));
  }
  return out;
}

AbstractConfiguration to_abstract(const LocalConfiguration& c) {
  AbstractConfiguration out(c.register_count());
  for (int round = c.lo(); round <= c.hi(); ++round) {
    const auto& s = c.round_set(round);
    for (std::size_t q = 0; q < kMaxStates; ++q)
      if (s.test(q)) out.set({static_cast<StateId>(q), round}, true);
    for (int reg = 0; reg < c.register_count(); ++reg)
      out.set_symbol(round, static_cast<RegisterId>(reg), c.symbol(round, static_cast<RegisterId>(reg)));
  }
  out.trim();
  return out;
}

std::optional<LocalConfiguration> try_local_step(const Protocol& p, const LocalConfiguration& c, const Move& m,
                                                 std::string* why) {
  auto fail = [&](const std::string& msg) -> std::optional<LocalConfiguration> {
    if (why) *why = msg;
    return std::nullopt;
  };
  if (m.transition >= p.transitions.size()) return fail("unknown transition");
  if (m.round < 0) return fail("negative round");
  const auto& t = p.transitions[m.transition];
  bool inc = t.action.kind == ActionKind::Increment;
  if (t.action.kind == ActionKind::Read && m.round < t.action.depth) return fail("read depth exceeds process round");
  if (c.hi() < c.lo()) return c;
  if (inc && m.round == c.lo() - 1) {
    LocalConfiguration next = c;
    next.set({t.destination, c.lo()}, true);
    return next;
  }
  if (!c.contains(m.round)) return c;
  Location src{t.source, m.round};
  if (!c.has(src)) return fail("source " + p.states[t.source] + "@" + std::to_string(m.round) + " not populated");
  LocalConfiguration next = c;
  if (t.action.kind == ActionKind::Read) {
    int r = m.round - t.action.depth;
    if (c.contains(r) && c.symbol(r, t.action.reg) != t.action.symbol)
      return fail("register " + std::to_string(t.action.reg + 1) + "@" + std::to_string(r) + " holds " +
                  p.alphabet[c.symbol(r, t.action.reg)] + ", not " + p.alphabet[t.action.symbol]);
  } else if (t.action.kind == ActionKind::Write) {
    next.set_symbol(m.round, t.action.reg, t.action.symbol);
  }
  if (m.deserting) next.set(src, false);
  Location dst = move_destination(p, m);
  if (c.contains(dst.round)) next.set(dst, true);
  return next;
}

LocalConfiguration local_step(const Protocol& p, const LocalConfiguration& c, const Move& m) {
  std::string why;
  auto next = try_local_step(p, c, m, &why);
  if (!next) throw NotEnabledError(0, why);
  return *next;
}

std::vector<LocalConfiguration> footprint_configurations(const Protocol& p, const Footprint& f) {
  std::vector<LocalConfiguration> out{f.start};
  out.reserve(f.steps.size() + 1);
  for (std::size_t i = 0; i < f.steps.size(); ++i) {
    std::string why;
    auto next = try_local_step(p, out.back(), f.steps[i], &why);
    if (!next) throw NotEnabledError(i, why);
    out.push_back(std::move(*next));
  }
  return out;
}

namespace {

Footprint project_configs(const std::vector<LocalConfiguration>& configs, const std::vector<Move>& steps, int lo,
                          int hi) {
  Footprint out;
  out.start = configs[0].restrict(lo, hi);
  LocalConfiguration cur = out.start;
  for (std::size_t i = 0; i < steps.size(); ++i) {
    LocalConfiguration next = configs[i + 1].restrict(lo, hi);
    if (next == cur) continue;
    out.steps.push_back(steps[i]);
    cur = std::move(next);
  }
  return out;
}

}  // namespace

Footprint project_footprint(const Protocol& p, const Execution& e, int j, int k) {
  std::vector<LocalConfiguration> configs;
  configs.reserve(e.steps.size() + 1);
  for (const auto& c : replay_all(p, e)) configs.push_back(local_view(c, j, k));
  return project_configs(configs, e.steps, std::max(j, 0), k);
}

Footprint project_footprint(const Protocol& p, const Footprint& f, int j, int k) {
  int lo = std::max(j, 0);
  if (k >= lo && (lo < f.lo() || k > f.hi()))
    throw Error(ErrorCode::WindowNotContained, "projection window [" + std::to_string(lo) + "," +
                                                   std::to_string(k) + "] not inside [" + std::to_string(f.lo()) +
                                                   "," + std::to_string(f.hi()) + "]");
  return project_configs(footprint_configurations(p, f), f.steps, lo, k);
}

Footprint merge_footprints(const Protocol& p, const Footprint& low, const Footprint& high) {
  int a = low.lo(), b = low.hi(), c = high.lo(), d = high.hi();
  if (!(a <= c && c <= b && b < d))
    throw Error(ErrorCode::InconsistentProjections, "footprint windows do not overlap as required");
  auto low_configs = footprint_configurations(p, low);
  auto high_configs = footprint_configurations(p, high);
  if (project_configs(low_configs, low.steps, c, b) != project_configs(high_configs, high.steps, c, b))
    throw Error(ErrorCode::InconsistentProjections,
                "footprints disagree on [" + std::to_string(c) + "," + std::to_string(b) + "]");

  auto shared_flags = [&](const std::vector<LocalConfiguration>& configs) {
    std::vector<bool> flags;
    for (std::size_t i = 0; i + 1 < configs.size(); ++i)
      flags.push_back(configs[i].restrict(c, b) != configs[i + 1].restrict(c, b));
    return flags;
  };
  auto low_shared = shared_flags(low_configs);
  auto high_shared = shared_flags(high_configs);

  Footprint out;
  out.start = low.start.widen(a, d);
  for (int round = b + 1; round <= d; ++round) {
    const auto& s = high.start.round_set(round);
    for (std::size_t q = 0; q < kMaxStates; ++q)
      if (s.test(q)) out.start.set({static_cast<StateId>(q), round}, true);
    for (int reg = 0; reg < p.register_count; ++reg)
      out.start.set_symbol(round, static_cast<RegisterId>(reg), high.start.symbol(round, static_cast<RegisterId>(reg)));
  }

  std::size_t i = 0, j = 0;
  while (true) {
    while (i < low.steps.size() && !low_shared[i]) out.steps.push_back(low.steps[i++]);
    while (j < high.steps.size() && !high_shared[j]) out.steps.push_back(high.steps[j++]);
    if (i == low.steps.size() && j == high.steps.size()) break;
    if (i == low.steps.size() || j == high.steps.size() || !(low.steps[i] == high.steps[j]))
      throw Error(ErrorCode::InconsistentProjections, "shared steps differ");
    out.steps.push_back(low.steps[i]);
    ++i;
    ++j;
  }

  try {
    if (project_footprint(p, out, a, b) != low || project_footprint(p, out, c, d) != high)
      throw Error(ErrorCode::InconsistentProjections, "glued footprint does not project back");
  } catch (const NotEnabledError& e) {
    throw Error(ErrorCode::InconsistentProjections, std::string("glued footprint does not replay: ") + e.what());
  }
  return out;
}

Execution combine_footprints(const Protocol& p, const std::vector<Footprint>& taus,
                             const std::vector<Footprint>& bridges) {
  if (taus.size() != bridges.size())
    throw Error(ErrorCode::InconsistentProjections, "sequence lengths differ");
  int v = std::max(p.visibility, 1);
  for (std::size_t i = 0; i < bridges.size(); ++i) {
    int k = static_cast<int>(i);
    if (project_footprint(p, bridges[i], k - v + 1, k) != taus[i])
      throw Error(ErrorCode::InconsistentProjections, "bridge " + std::to_string(k) + " does not project to its window");
    if (k > 0 && project_footprint(p, bridges[i], k - v, k - 1) != taus[i - 1])
      throw Error(ErrorCode::InconsistentProjections,
                  "bridge " + std::to_string(k) + " does not extend the previous window");
  }
  return combine_footprints(p, bridges);
}

Execution combine_footprints(const Protocol& p, const std::vector<Footprint>& bridges) {
  if (bridges.empty()) throw Error(ErrorCode::InvalidArgument, "no footprints to combine");
  int v = std::max(p.visibility, 1);
  for (std::size_t i = 0; i < bridges.size(); ++i) {
    int k = static_cast<int>(i);
    if (bridges[i].lo() != std::max(k - v, 0) || bridges[i].hi() != k)
      throw Error(ErrorCode::InconsistentProjections, "bridge " + std::to_string(k) + " has the wrong window");
  }
  Footprint glued = bridges[0];
  for (std::size_t i = 1; i < bridges.size(); ++i) glued = merge_footprints(p, glued, bridges[i]);
  Execution e;
  e.start = to_abstract(glued.start);
  e.steps = glued.steps;
  try {
    replay(p, e);
  } catch (const NotEnabledError& err) {
    throw Error(ErrorCode::InconsistentProjections, std::string("glued execution does not replay: ") + err.what());
  }
  return e;
}

namespace {

bool is_self_loop(const Protocol& p, const Move& m) {
  const auto& t = p.transitions[m.transition];
  return t.action.kind != ActionKind::Increment && t.source == t.destination;
}

/// For each write step, whether a later read consumes it before it is overwritten.
std::vector<bool> writes_read(const Protocol& p, const Execution& e) {
  std::vector<bool> read(e.steps.size(), false);
  std::map<std::pair<int, RegisterId>, std::size_t> last;
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    const auto& m = e.steps[i];
    const auto& a = p.transitions[m.transition].action;
    if (a.kind == ActionKind::Write) {
      last[{m.round, a.reg}] = i;
    } else if (a.kind == ActionKind::Read) {
      auto it = last.find({m.round - a.depth, a.reg});
      if (it != last.end()) read[it->second] = true;
    }
  }
  for (const auto& [slot, i] : last) read[i] = true;
  return read;
}

}  // namespace

Execution normalize_execution(const Protocol& p, const Execution& e) {
  Execution cur = e;
  AbstractConfiguration target;
  try {
    target = replay(p, cur);
  } catch (const Error& err) {
    throw Error(ErrorCode::ReplayFailure, std::string("execution does not replay: ") + err.what());
  }
  bool changed = true;
  while (changed) {
    changed = false;
    auto configs = replay_all(p, cur);

    for (std::size_t i = 0; i < cur.steps.size(); ++i) {
      auto& m = cur.steps[i];
      if (!m.deserting) continue;
      bool repopulated = is_self_loop(p, m);
      Location src = move_source(p, m);
      for (std::size_t j = i + 2; j < configs.size() && !repopulated; ++j) repopulated = configs[j].has(src);
      if (repopulated) {
        m.deserting = false;
        changed = true;
      }
    }
    if (changed) continue;

    auto read = writes_read(p, cur);
    for (std::size_t i = 0; i < cur.steps.size() && !changed; ++i) {
      const auto& m = cur.steps[i];
      bool write = p.transitions[m.transition].action.kind == ActionKind::Write;
      if (configs[i] == configs[i + 1] ||
          (write && !m.deserting && configs[i].has(move_destination(p, m)) && !read[i])) {
        cur.steps.erase(cur.steps.begin() + static_cast<std::ptrdiff_t>(i));
        changed = true;
      }
    }
  }
  if (!(replay(p, cur) == target))
    throw Error(ErrorCode::ReplayFailure, "normalization changed the final configuration");
  return cur;
}

std::size_t normal_form_round_bound(const Protocol& p) {
  return p.states.size() * static_cast<std::size_t>(2 * p.visibility + 5) + static_cast<std::size_t>(p.register_count);
}

NormalFormReport check_normal_form(const Protocol& p, const Execution& e) {
  NormalFormReport report;
  std::vector<AbstractConfiguration> configs;
  try {
    configs = replay_all(p, e);
  } catch (const Error& err) {
    throw Error(ErrorCode::ReplayFailure, std::string("execution does not replay: ") + err.what());
  }
  auto violation = [&](std::size_t i, const std::string& msg) {
    report.ok = false;
    report.violations.push_back("step " + std::to_string(i) + ": " + msg);
  };
  auto read = writes_read(p, e);
  std::set<Location> ever;
  std::set<Location> deserted;
  for (int round = 0; round < configs[0].rounds(); ++round)
    for (std::size_t q = 0; q < p.states.size(); ++q)
      if (configs[0].has({static_cast<StateId>(q), round})) ever.insert({static_cast<StateId>(q), round});
  std::map<int, std::size_t> per_round;
  for (std::size_t i = 0; i < e.steps.size(); ++i) {
    const auto& m = e.steps[i];
    ++per_round[m.round];
    Location src = move_source(p, m);
    Location dst = move_destination(p, m);
    bool self = is_self_loop(p, m);
    bool deserts = m.deserting && !self;
    bool fresh = !ever.count(dst);
    bool useful_write = p.transitions[m.transition].action.kind == ActionKind::Write && read[i];
    if (!deserts && !fresh && !useful_write) violation(i, "neither deserts, populates a fresh location, nor writes a read symbol");
    if (deserts) {
      if (deserted.count(src)) violation(i, "location deserted twice");
      deserted.insert(src);
    }
    if (!configs[i].has(dst) && configs[i + 1].has(dst) && deserted.count(dst))
      violation(i, "location populated again after being deserted");
    ever.insert(dst);
  }
  for (const auto& [round, n] : per_round) report.max_steps_per_round = std::max(report.max_steps_per_round, n);
  if (report.max_steps_per_round > normal_form_round_bound(p))
    violation(e.steps.size(), "too many steps on one round");
  return report;
}

}  // namespace regverify
