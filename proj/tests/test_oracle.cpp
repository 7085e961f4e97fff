#include <ostream>
#include <random>
#include <set>

#include "doctest.h"
#include "regverify/error.hpp"
#include "regverify/oracle.hpp"
#include "regverify/reductions.hpp"
#include "support/random_instances.hpp"
#include "support/reference.hpp"

using namespace regverify;
namespace ref = regverify::reference;

namespace {

std::set<ref::Snapshot> snapshots(const Protocol& p, const ReachSet& r) {
  std::set<ref::Snapshot> out;
  for (const auto& m : r.members) out.insert(ref::snapshot(p, m));
  return out;
}

const BuiltinSet& b() { return builtin_examples(); }

}  // namespace

TEST_SUITE("oracle") {

TEST_CASE("fig1 reach set") {
  const auto& p = b().protocol("fig1");
  auto r = reach_roundless(p);
  AbstractConfiguration goal(1);
  goal.set({p.state_id("qf"), 0}, true);
  goal.set({p.state_id("C"), 0}, true);
  goal.set_symbol(0, 0, p.symbol_id("a"));
  CHECK(r.contains(goal));
  CHECK(snapshots(p, r) == ref::abstract_reach(p));
  CHECK(r.members.size() == ref::abstract_reach(p).size());
}

TEST_CASE("blue variant never populates qf") {
  const auto& p = b().protocol("fig1_blue");
  auto r = reach_roundless(p);
  for (const auto& m : r.members) CHECK_FALSE(m.has(p.state_id("qf")));
  CHECK(snapshots(p, r) == ref::abstract_reach(p));
}

TEST_CASE("no transitions gives the initial configuration only") {
  Protocol p = b().protocol("fig1");
  p.transitions.clear();
  auto r = reach_roundless(p);
  REQUIRE(r.members.size() == 1);
  CHECK(r.members[0].has(p.state_id("q0")));
  CHECK(r.parent[0] == -1);
}

TEST_CASE("fig4 with three rounds never covers qf") {
  const auto& p = b().protocol("fig4");
  auto r = reach_roundbased_capped(p, 3);
  for (const auto& m : r.members)
    for (int k = 0; k < m.rounds(); ++k) CHECK_FALSE(m.has({p.state_id("qf"), k}));
}

TEST_CASE("fig4 with two rounds reaches E on round 2 keeping later registers at b or d0") {
  const auto& p = b().protocol("fig4");
  auto r = reach_roundbased_capped(p, 2);
  CHECK(snapshots(p, r) == ref::abstract_reach(p, 2));
  bool found = false;
  for (const auto& m : r.members) {
    if (!m.has({p.state_id("E"), 2})) continue;
    bool only_b = true;
    for (int k = 1; k < m.rounds(); ++k) only_b = only_b && m.symbol(k, 0) != p.symbol_id("a");
    found = found || only_b;
  }
  CHECK(found);
}

TEST_CASE("round cap zero forbids increments") {
  auto p = parse_protocol("flavor: roundbased\nstates: q0\ninitial: q0\nregisters: 1\nalphabet: d0\n"
                          "visibility: 1\ntransitions:\n  q0 inc q0\n");
  auto r = reach_roundbased_capped(p, 0);
  REQUIRE(r.members.size() == 1);
  CHECK(r.members[0].active_bound() == 0);
  CHECK(reach_roundbased_capped(p, 1).members.size() == 3);
}

TEST_CASE("oracle verdicts on the golden examples") {
  const auto& fig1 = b().protocol("fig1");
  auto cover = oracle_prp(fig1, parse_roundless_constraint(fig1, b().constraint("cover_qf")));
  CHECK(cover.answer == Answer::Positive);
  REQUIRE(cover.witness.has_value());
  CHECK(replay(fig1, *cover.witness).has(fig1.state_id("qf")));

  auto ex26 = oracle_prp(fig1, parse_roundless_constraint(fig1, b().constraint("ex26")));
  CHECK(ex26.answer == Answer::Negative);
  CHECK_FALSE(ex26.witness.has_value());

  const auto& red = b().protocol("fig1_red");
  auto target = oracle_prp(red, target_constraint(red, red.state_id("qf")));
  CHECK(target.answer == Answer::Positive);
  REQUIRE(target.witness.has_value());
  CHECK(eval_roundless(replay(red, *target.witness), target_constraint(red, red.state_id("qf"))));
}

TEST_CASE("oracle on fig4 constraints within a small round cap") {
  const auto& p = b().protocol("fig4");
  auto psi2 = oracle_prp(p, parse_round_constraint(p, b().constraint("psi2")), 3);
  CHECK(psi2.answer == Answer::Positive);
  REQUIRE(psi2.witness.has_value());
  CHECK(eval_roundbased(replay(p, *psi2.witness), parse_round_constraint(p, b().constraint("psi2"))));
  CHECK(oracle_prp(p, parse_round_constraint(p, b().constraint("psi")), 3).answer == Answer::Negative);
  CHECK(oracle_prp(p, parse_round_constraint(p, b().constraint("psi1")), 3).answer == Answer::Negative);
}

TEST_CASE("caps are enforced") {
  Protocol p;
  for (int i = 0; i < 13; ++i) p.states.push_back("s" + std::to_string(i));
  p.initial.set(0);
  try {
    reach_roundless(p);
    FAIL("expected CapExceeded");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CapExceeded);
  }
  OracleCaps tiny;
  tiny.max_members = 3;
  CHECK_THROWS_AS(reach_roundless(b().protocol("fig1"), tiny), Error);
}

TEST_CASE("reach sets are closed and match the reference") {
  std::mt19937_64 rng(31);
  for (int i = 0; i < 150; ++i) {
    Protocol p = testing::random_protocol(rng, {testing::pick(rng, 2, 4), 3, testing::pick(rng, 1, 2), 8, -1});
    auto r = reach_roundless(p);
    for (const auto& m : r.members)
      for (const auto& s : abstract_successors(p, m)) CHECK(r.contains(s.config));
    CHECK(snapshots(p, r) == ref::abstract_reach(p));
    for (std::size_t m = 0; m < r.members.size(); m += 7) CHECK(replay(p, r.witness(m)) == r.members[m]);
  }
}

TEST_CASE("round-capped reach sets grow with the cap") {
  std::mt19937_64 rng(32);
  for (int i = 0; i < 60; ++i) {
    Protocol p = testing::random_protocol(rng, {3, 2, 1, 6, testing::pick(rng, 0, 1)});
    auto lower = reach_roundbased_capped(p, 1);
    auto upper = reach_roundbased_capped(p, 2);
    for (const auto& m : lower.members) CHECK(upper.contains(m));
    CHECK(snapshots(p, upper) == ref::abstract_reach(p, 2));
  }
}

TEST_CASE("export is sorted and one line per member") {
  const auto& p = b().protocol("fig1");
  auto r = reach_roundless(p);
  auto text = export_reach(p, r);
  std::size_t lines = static_cast<std::size_t>(std::count(text.begin(), text.end(), '\n'));
  CHECK(lines == r.members.size());
}

}  // TEST_SUITE
