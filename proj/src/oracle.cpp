#include "regverify/oracle.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <deque>

#include "regverify/error.hpp"

namespace regverify {

const char* answer_name(Answer a) {
  switch (a) {
    case Answer::Positive: return "positive";
    case Answer::Negative: return "negative";
    case Answer::Unknown: return "unknown";
  }
  return "unknown";
}

Execution ReachSet::witness(std::size_t member) const {
  std::vector<Move> rev;
  std::size_t cur = member;
  while (parent[cur] >= 0) {
    rev.push_back(via[cur]);
    cur = static_cast<std::size_t>(parent[cur]);
  }
  Execution e;
  e.start = members[cur];
  e.steps.assign(rev.rbegin(), rev.rend());
  return e;
}

namespace {

void check_caps(const Protocol& p, const OracleCaps& caps) {
  if (p.states.size() > caps.max_states)
    throw Error(ErrorCode::CapExceeded, "oracle: " + std::to_string(p.states.size()) + " states exceed cap " +
                                            std::to_string(caps.max_states));
  if (p.round_based()) return;
  double valuations = std::pow(static_cast<double>(p.alphabet.size()), p.register_count);
  if (valuations > static_cast<double>(caps.max_valuations))
    throw Error(ErrorCode::CapExceeded, "oracle: register valuations exceed cap");
}

std::vector<StateId> initial_states(const Protocol& p) {
  std::vector<StateId> out;
  for (StateId q = 0; q < p.states.size(); ++q)
    if (p.initial.test(q)) out.push_back(q);
  return out;
}

}  // namespace

std::int64_t explore(const Protocol& p, std::optional<RoundWindow> window, const OracleCaps& caps, ReachSet& out,
                     const std::function<bool(const AbstractConfiguration&)>& goal) {
  check_caps(p, caps);
  auto q0 = initial_states(p);
  if (q0.size() > 20) throw Error(ErrorCode::CapExceeded, "oracle: too many initial states");

  std::deque<std::size_t> queue;
  auto add = [&](AbstractConfiguration c, std::int64_t parent, Move via) -> std::int64_t {
    if (out.index.count(c)) return -1;
    if (out.members.size() >= caps.max_members) throw Error(ErrorCode::CapExceeded, "oracle: reach set too large");
    std::size_t id = out.members.size();
    out.index.emplace(c, id);
    out.members.push_back(std::move(c));
    out.parent.push_back(parent);
    out.via.push_back(via);
    queue.push_back(id);
    return static_cast<std::int64_t>(id);
  };

  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << q0.size()); ++mask) {
    StateSet s;
    for (std::size_t i = 0; i < q0.size(); ++i)
      if ((mask >> i) & 1U) s.set(q0[i]);
    std::int64_t id = add(initial_configuration(p, s), -1, Move{});
    if (id >= 0 && goal && goal(out.members[static_cast<std::size_t>(id)])) return id;
  }
  while (!queue.empty()) {
    std::size_t cur = queue.front();
    queue.pop_front();
    AbstractConfiguration c = out.members[cur];
    for (auto& succ : abstract_successors(p, c, window)) {
      std::int64_t id = add(std::move(succ.config), static_cast<std::int64_t>(cur), succ.move);
      if (id >= 0 && goal && goal(out.members[static_cast<std::size_t>(id)])) return id;
    }
  }
  return -1;
}

ReachSet reach_roundless(const Protocol& p, const OracleCaps& caps) {
  if (p.round_based()) throw Error(ErrorCode::InvalidArgument, "reach_roundless on a round-based protocol");
  ReachSet r;
  explore(p, std::nullopt, caps, r, nullptr);
  return r;
}

ReachSet reach_roundbased_capped(const Protocol& p, int max_round, const OracleCaps& caps) {
  if (!p.round_based()) throw Error(ErrorCode::InvalidArgument, "round cap on a roundless protocol");
  if (max_round < 0) throw Error(ErrorCode::InvalidArgument, "negative round cap");
  ReachSet r;
  explore(p, RoundWindow{0, max_round}, caps, r, nullptr);
  return r;
}

namespace {

Verdict finish(const Protocol& p, ReachSet& r, std::int64_t hit, const char* algorithm,
               std::chrono::steady_clock::time_point t0) {
  Verdict v;
  v.algorithm = algorithm;
  v.stats.explored_nodes = r.members.size();
  if (hit >= 0) {
    v.answer = Answer::Positive;
    v.witness = r.witness(static_cast<std::size_t>(hit));
    replay(p, *v.witness);
    v.stats.witness_steps = v.witness->steps.size();
  } else {
    v.answer = Answer::Negative;
  }
  v.stats.millis = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0).count();
  return v;
}

}  // namespace

Verdict oracle_prp(const Protocol& p, const RoundlessConstraint& phi, const OracleCaps& caps) {
  auto t0 = std::chrono::steady_clock::now();
  if (p.round_based()) throw Error(ErrorCode::InvalidArgument, "roundless oracle on a round-based protocol");
  ReachSet r;
  std::int64_t hit = explore(p, std::nullopt, caps, r, [&](const AbstractConfiguration& c) { return eval_roundless(c, phi); });
  return finish(p, r, hit, "oracle", t0);
}

Verdict oracle_prp(const Protocol& p, const RoundConstraint& psi, int max_round, const OracleCaps& caps) {
  auto t0 = std::chrono::steady_clock::now();
  if (!p.round_based()) throw Error(ErrorCode::InvalidArgument, "round-based oracle on a roundless protocol");
  ReachSet r;
  std::int64_t hit = explore(p, RoundWindow{0, max_round}, caps, r,
                             [&](const AbstractConfiguration& c) { return eval_roundbased(c, psi); });
  Verdict v = finish(p, r, hit, "oracle", t0);
  v.detail = "round cap " + std::to_string(max_round);
  return v;
}

int default_round_cap(const Protocol& p, const RoundConstraint& psi) {
  int v = std::max(p.visibility, 1);
  return (v + 1) * (max_constant(psi) + 2) + 2;
}

std::string export_reach(const Protocol& p, const ReachSet& reach) {
  std::vector<std::string> lines;
  lines.reserve(reach.members.size());
  for (const auto& c : reach.members) lines.push_back(format_configuration(p, c));
  std::sort(lines.begin(), lines.end());
  std::string out;
  for (const auto& l : lines) out += l + "\n";
  return out;
}

}  // namespace regverify
