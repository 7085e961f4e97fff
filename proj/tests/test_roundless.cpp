#include <ostream>
#include <random>
#include <set>

#include "doctest.h"
#include "regverify/error.hpp"
#include "regverify/reductions.hpp"
#include "regverify/roundless.hpp"
#include "regverify/semantics.hpp"
#include "support/random_instances.hpp"
#include "support/reference.hpp"

using namespace regverify;
namespace ref = regverify::reference;

namespace {

const BuiltinSet& b() { return builtin_examples(); }

AbstractConfiguration to_config(const Protocol& p, const ref::Snapshot& s) {
  AbstractConfiguration c(p.register_count);
  for (const auto& [k, q] : s.populated) c.set({q, k}, true);
  for (const auto& [kj, a] : s.registers) c.set_symbol(kj.first, kj.second, a);
  return c;
}

bool ref_prp(const Protocol& p, const RoundlessConstraint& phi) {
  for (const auto& s : ref::abstract_reach(p))
    if (eval_roundless(to_config(p, s), phi)) return true;
  return false;
}

StateSet ref_cov(const Protocol& p) {
  StateSet out;
  for (const auto& s : ref::abstract_reach(p))
    for (const auto& [k, q] : s.populated) out.set(q);
  return out;
}

// Union of every S from which an execution starting with a write leads to the clause.
// Uninitialized protocols never read d0, so starting from d0 forces a leading write.
StateSet ref_cocov(const Protocol& p, const ClauseDecomposition& clause) {
  StateSet out;
  std::size_t n = p.states.size();
  for (std::uint64_t mask = 1; mask < (std::uint64_t{1} << n); ++mask) {
    ref::Snapshot s;
    for (std::size_t q = 0; q < n; ++q)
      if (mask >> q & 1) s.populated.insert({0, static_cast<StateId>(q)});
    bool hit = false;
    for (const auto& t : ref::reach_from(p, ref::abstract_successors(p, s)))
      if (clause.accepts(to_config(p, t))) hit = true;
    if (hit)
      for (std::size_t q = 0; q < n; ++q)
        if (mask >> q & 1) out.set(q);
  }
  return out;
}

StateSet states_of(const Protocol& p, std::initializer_list<const char*> names) {
  StateSet s;
  for (const auto* name : names) s.set(p.state_id(name));
  return s;
}

StateSet all_states(const Protocol& p) {
  StateSet s;
  for (std::size_t q = 0; q < p.states.size(); ++q) s.set(q);
  return s;
}

}  // namespace

TEST_SUITE("roundless") {

TEST_CASE("bounded search on the golden examples") {
  const auto& fig1 = b().protocol("fig1");
  CHECK(bounded_search_limit(fig1) == 20);
  auto cover = solve_prp_bounded(fig1, cover_constraint(fig1.state_id("qf")));
  CHECK(cover.answer == Answer::Positive);
  REQUIRE(cover.witness.has_value());
  CHECK(cover.witness->steps.size() <= 20);
  CHECK(replay(fig1, *cover.witness).has(fig1.state_id("qf")));

  auto ex26 = solve_prp_bounded(fig1, parse_roundless_constraint(fig1, b().constraint("ex26")));
  CHECK(ex26.answer == Answer::Negative);

  const auto& blue = b().protocol("fig1_blue");
  CHECK(solve_prp_bounded(blue, cover_constraint(blue.state_id("qf"))).answer == Answer::Negative);

  CHECK(solve_prp_bounded(fig1, target_constraint(fig1, fig1.state_id("qf"))).answer == Answer::Negative);
  const auto& red = b().protocol("fig1_red");
  CHECK(solve_prp_bounded(red, target_constraint(red, red.state_id("qf"))).answer == Answer::Positive);
}

TEST_CASE("saturation for uninitialized cover") {
  CnfFormula sat{1, {{1, 1, 1}}};
  auto [p, qf] = sat_to_uninit_target(sat);
  auto v = solve_cover_uninitialized(p, qf);
  CHECK(v.answer == Answer::Positive);
  CHECK(ref_prp(p, cover_constraint(qf)));
  CHECK(saturate_uninitialized(p) == ref_cov(p));

  auto lonely = parse_protocol("flavor: roundless\nstates: q0 q1 t\ninitial: q0\nregisters: 1\nalphabet: d0 a\n"
                               "transitions:\n  q0 write(1, a) q1\n  q1 read(1, a) q0\n");
  CHECK(solve_cover_uninitialized(lonely, lonely.state_id("t")).answer == Answer::Negative);

  try {
    solve_cover_uninitialized(b().protocol("fig1"), 0);
    FAIL("expected NotUninitialized");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotUninitialized);
  }
}

TEST_CASE("first-write orders") {
  const auto& fig1 = b().protocol("fig1");
  CHECK(solve_cover_fixed_r(fig1, fig1.state_id("qf")).answer == Answer::Positive);
  CHECK(saturate_with_order(fig1, {0}).test(fig1.state_id("qf")));
  const auto& blue = b().protocol("fig1_blue");
  CHECK(solve_cover_fixed_r(blue, blue.state_id("qf")).answer == Answer::Negative);

  CnfFormula unsat{1, {{1, 1, 1}, {-1, -1, -1}}};
  REQUIRE_FALSE(ref::truth_table(unsat.variables, unsat.clauses));
  auto [p, qf] = sat_to_cover(unsat);
  CHECK(solve_cover_fixed_r(p, qf).answer == Answer::Negative);
}

TEST_CASE("cover to target with a joker symbol") {
  const auto& fig1 = b().protocol("fig1");
  auto [p, e] = reduce_cover_to_target(fig1, fig1.state_id("qf"));
  CHECK(p.alphabet.size() == 5);
  CHECK(p.transitions.size() == 8 + 1 + 5);
  CHECK(ref_prp(p, target_constraint(p, e)));
  CHECK(solve_prp_bounded(p, target_constraint(p, e)).answer == Answer::Positive);

  const auto& blue = b().protocol("fig1_blue");
  auto [pb, eb] = reduce_cover_to_target(blue, blue.state_id("qf"));
  CHECK_FALSE(ref_prp(pb, target_constraint(pb, eb)));
  CHECK(solve_prp_bounded(pb, target_constraint(pb, eb)).answer == Answer::Negative);

  auto trivial = parse_protocol("flavor: roundless\nstates: err\ninitial: err\nregisters: 1\nalphabet: d0\n"
                                "transitions:\n");
  auto [pt, et] = reduce_cover_to_target(trivial, 0);
  CHECK(ref_prp(pt, target_constraint(pt, et)));
}

TEST_CASE("initialized to uninitialized with one register") {
  const auto& fig1 = b().protocol("fig1");
  auto u = reduce_initialized_to_uninit_r1(fig1);
  StateSet expected;
  for (const char* q : {"q0", "B", "C"}) expected.set(fig1.state_id(q));
  CHECK(u.initial == expected);
  CHECK(u.transitions.size() == 6);
  CHECK(is_uninitialized(u));

  CnfFormula f{1, {{1, 1, 1}}};
  auto uninit = sat_to_uninit_target(f).first;
  REQUIRE(uninit.register_count == 1);
  auto same = reduce_initialized_to_uninit_r1(uninit);
  CHECK(same.initial == uninit.initial);
  CHECK(same.transitions == uninit.transitions);

  auto two = sat_to_cover(f).first;
  REQUIRE(two.register_count == 2);
  try {
    reduce_initialized_to_uninit_r1(two);
    FAIL("expected WrongRegisterCount");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::WrongRegisterCount);
  }
}

TEST_CASE("one-register dnf solver on the golden examples") {
  const auto& red = b().protocol("fig1_red");
  CHECK(solve_dnfprp_one_register(red, target_constraint(red, red.state_id("qf"))).answer == Answer::Positive);
  const auto& fig1 = b().protocol("fig1");
  CHECK(solve_dnfprp_one_register(fig1, target_constraint(fig1, fig1.state_id("qf"))).answer == Answer::Negative);
  CHECK(solve_dnfprp_one_register(fig1, cover_constraint(fig1.state_id("qf"))).answer == Answer::Positive);
  auto ex26 = parse_roundless_constraint(fig1, b().constraint("ex26"));
  CHECK_THROWS_AS(solve_dnfprp_one_register(fig1, ex26), Error);
  CHECK(solve_dnfprp_one_register(fig1, to_dnf(ex26)).answer == Answer::Negative);
}

TEST_CASE("coverable sets") {
  auto red = reduce_initialized_to_uninit_r1(b().protocol("fig1_red"));
  CHECK(compute_cov_set(red) == all_states(red));
  CHECK(compute_cov_set(red) == ref_cov(red));

  auto blue = reduce_initialized_to_uninit_r1(b().protocol("fig1_blue"));
  CHECK_FALSE(compute_cov_set(blue).test(blue.state_id("qf")));
  CHECK(compute_cov_set(blue) == ref_cov(blue));

  Protocol bare = red;
  bare.transitions.clear();
  CHECK(compute_cov_set(bare) == bare.initial);
}

TEST_CASE("co-coverable sets") {
  auto red = reduce_initialized_to_uninit_r1(b().protocol("fig1_red"));
  auto target = dnf_clauses(red, target_constraint(red, red.state_id("qf")));
  REQUIRE(target.size() == 1);
  // B is initial after the reduction but has no transition left.
  CHECK(compute_cocov_set(red, target[0]) == states_of(red, {"q0", "A", "C", "qf"}));
  CHECK(compute_cocov_set(red, target[0]) == ref_cocov(red, target[0]));

  auto nothing = target[0];
  nothing.q_minus = all_states(red);
  CHECK(compute_cocov_set(red, nothing).none());

  auto fig1 = reduce_initialized_to_uninit_r1(b().protocol("fig1"));
  auto t1 = dnf_clauses(fig1, target_constraint(fig1, fig1.state_id("qf")));
  auto s = compute_cocov_set(fig1, t1[0]);
  CHECK(s == ref_cocov(fig1, t1[0]));
  CHECK((!s.test(fig1.state_id("A")) || !s.test(fig1.state_id("C"))));
}

TEST_CASE("coverable supports are closed under union") {
  std::mt19937_64 rng(41);
  for (int i = 0; i < 200; ++i) {
    Protocol p = reduce_initialized_to_uninit_r1(testing::random_protocol(rng, {4, 3, 1, 8, -1}));
    auto reach = ref::abstract_reach(p);
    std::set<std::set<std::pair<int, StateId>>> supports;
    for (const auto& s : reach) supports.insert(s.populated);
    for (const auto& x : supports)
      for (const auto& y : supports) {
        auto u = x;
        u.insert(y.begin(), y.end());
        CHECK(supports.count(u) == 1);
      }
    StateSet whole = compute_cov_set(p);
    CHECK(whole == ref_cov(p));
    for (std::size_t q = 0; q < p.states.size(); ++q) {
      if (!p.initial.test(q)) continue;
      Protocol single = p;
      single.initial.reset();
      single.initial.set(q);
      CHECK((compute_cov_set(single) & ~whole).none());
    }
  }
}

TEST_CASE("co-coverable sets match brute force") {
  std::mt19937_64 rng(42);
  for (int i = 0; i < 150; ++i) {
    Protocol p = reduce_initialized_to_uninit_r1(testing::random_protocol(rng, {4, 3, 1, 8, -1}));
    auto phi = to_dnf(testing::random_roundless_constraint(rng, p, 1));
    for (const auto& clause : dnf_clauses(p, phi)) {
      if (!clause.satisfiable) continue;
      CHECK(compute_cocov_set(p, clause) == ref_cocov(p, clause));
    }
  }
}

TEST_CASE("solvers agree with brute force on random instances") {
  std::mt19937_64 rng(43);
  for (int i = 0; i < 150; ++i) {
    Protocol p = testing::random_protocol(rng, {testing::pick(rng, 2, 5), 3, testing::pick(rng, 1, 2), 10, -1});
    auto phi = testing::random_roundless_constraint(rng, p, 2);
    bool expected = ref_prp(p, phi);
    auto v = solve_prp_bounded(p, phi);
    CHECK((v.answer == Answer::Positive) == expected);
    if (v.witness) {
      CHECK(v.witness->steps.size() <= bounded_search_limit(p));
      CHECK(eval_roundless(replay(p, *v.witness), phi));
    }
    auto target = static_cast<StateId>(testing::pick(rng, 0, static_cast<int>(p.states.size()) - 1));
    bool coverable = ref_prp(p, cover_constraint(target));
    CHECK((solve_cover_fixed_r(p, target).answer == Answer::Positive) == coverable);
    if (is_uninitialized(p)) CHECK((solve_cover_uninitialized(p, target).answer == Answer::Positive) == coverable);
    if (p.register_count == 1) {
      auto dnf = to_dnf(phi);
      CHECK((solve_dnfprp_one_register(p, dnf).answer == Answer::Positive) == expected);
    }
  }
}

}  // TEST_SUITE
