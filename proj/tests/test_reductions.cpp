#include <ostream>
#include <random>

#include "doctest.h"
#include "regverify/error.hpp"
#include "regverify/reductions.hpp"
#include "support/reference.hpp"

using namespace regverify;
namespace ref = regverify::reference;

namespace {

bool ref_cover(const Protocol& p, StateId q) {
  for (const auto& s : ref::abstract_reach(p))
    if (s.populated.count({0, q})) return true;
  return false;
}

bool ref_target(const Protocol& p, StateId q) {
  for (const auto& s : ref::abstract_reach(p))
    if (s.populated == std::set<std::pair<int, StateId>>{{0, q}}) return true;
  return false;
}

Circuit and_circuit() {
  return parse_circuit("input x true\ninput y true\ngate g and x y\noutput g\n");
}

}  // namespace

TEST_SUITE("reductions") {

TEST_CASE("sat to cover") {
  CnfFormula sat{1, {{1, 1, 1}}};
  auto [p, qf] = sat_to_cover(sat);
  CHECK(p.register_count == 2);
  CHECK(p.alphabet.size() == 2);
  CHECK(validate(p).empty());
  CHECK(ref::truth_table(1, sat.clauses));
  CHECK(ref_cover(p, qf));

  CnfFormula unsat{1, {{1, 1, 1}, {-1, -1, -1}}};
  auto [pu, qu] = sat_to_cover(unsat);
  CHECK_FALSE(ref::truth_table(1, unsat.clauses));
  CHECK_FALSE(ref_cover(pu, qu));
}

TEST_CASE("sat to uninitialized target") {
  CnfFormula sat{2, {{1, -2, 2}, {-1, -1, -1}}};
  auto [p, qf] = sat_to_uninit_target(sat);
  CHECK(is_uninitialized(p));
  CHECK(p.register_count == 2);
  CHECK(validate(p).empty());
  CHECK(ref::truth_table(2, sat.clauses));
  CHECK(ref_target(p, qf));

  CnfFormula unsat{1, {{1, 1, 1}, {-1, -1, -1}}};
  auto [pu, qu] = sat_to_uninit_target(unsat);
  CHECK(is_uninitialized(pu));
  CHECK_FALSE(ref_target(pu, qu));
}

TEST_CASE("circuit value to cover") {
  auto c = and_circuit();
  CHECK(ref::circuit_value(c));
  CHECK(evaluate_circuit(c));
  auto [pt, qt] = cvp_to_cover(c, true);
  CHECK(pt.register_count == 1);
  CHECK(ref_cover(pt, qt));
  auto [pf, qf] = cvp_to_cover(c, false);
  CHECK_FALSE(ref_cover(pf, qf));

  for (bool input : {false, true}) {
    Circuit nn;
    nn.inputs = {{"x", input}};
    nn.gates = {{Gate::Kind::Not, "x", "", "n1"}, {Gate::Kind::Not, "n1", "", "n2"}};
    nn.output = "n2";
    CHECK(ref::circuit_value(nn) == input);
    for (bool desired : {false, true}) {
      auto [p, q] = cvp_to_cover(nn, desired);
      CHECK(ref_cover(p, q) == (input == desired));
    }
  }
}

TEST_CASE("cyclic and undefined circuits are rejected") {
  Circuit cyc;
  cyc.inputs = {{"x", true}};
  cyc.gates = {{Gate::Kind::And, "x", "b", "a"}, {Gate::Kind::Or, "a", "x", "b"}};
  cyc.output = "b";
  try {
    cvp_to_cover(cyc, true);
    FAIL("expected CyclicCircuit");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::CyclicCircuit);
  }
  Circuit undefined;
  undefined.inputs = {{"x", true}};
  undefined.gates = {{Gate::Kind::Not, "y", "", "g"}};
  undefined.output = "g";
  try {
    topological_gates(undefined);
    FAIL("expected UndefinedWire");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::UndefinedWire);
  }
}

TEST_CASE("circuit text round-trips") {
  auto c = and_circuit();
  auto back = parse_circuit(format_circuit(c));
  CHECK(format_circuit(back) == format_circuit(c));
  CHECK(back.output == "g");
  CHECK(back.gates.size() == 1);
}

TEST_CASE("random generators are deterministic and well formed") {
  std::mt19937_64 a(5), b(5);
  auto fa = random_cnf(a, 3, 4);
  auto fb = random_cnf(b, 3, 4);
  CHECK(format_cnf(fa) == format_cnf(fb));
  CHECK(fa.clauses.size() == 4);
  for (const auto& cl : fa.clauses)
    for (int lit : cl) CHECK((lit != 0 && std::abs(lit) <= 3));
  CHECK(cnf_satisfiable(fa) == ref::truth_table(fa.variables, fa.clauses));

  std::mt19937_64 rng(6);
  for (int i = 0; i < 50; ++i) {
    auto c = random_circuit(rng, 2, 3);
    CHECK(evaluate_circuit(c) == ref::circuit_value(c));
    auto [p, q] = cvp_to_cover(c, true);
    CHECK(validate(p).empty());
    CHECK(parse_protocol(serialize_protocol(p)) == p);
  }
}

TEST_CASE("generated protocols validate and round-trip") {
  std::mt19937_64 rng(7);
  for (int i = 0; i < 30; ++i) {
    auto f = random_cnf(rng, 3, 3);
    for (const auto& p : {sat_to_cover(f).first, sat_to_uninit_target(f).first}) {
      CHECK(validate(p).empty());
      CHECK(parse_protocol(serialize_protocol(p)) == p);
    }
  }
}

TEST_CASE("builtin examples") {
  const auto& set = builtin_examples();
  const auto& fig1 = set.protocol("fig1");
  CHECK(fig1.states.size() == 5);
  CHECK(fig1.register_count == 1);
  CHECK(fig1.alphabet.size() == 4);

  const auto& blue = set.protocol("fig1_blue");
  REQUIRE(blue.transitions.size() == fig1.transitions.size());
  int differences = 0;
  for (std::size_t t = 0; t < fig1.transitions.size(); ++t) {
    if (blue.transitions[t] == fig1.transitions[t]) continue;
    ++differences;
    CHECK(format_transition(fig1, fig1.transitions[t]) == "q0 read(1, d0) B");
    CHECK(format_transition(blue, blue.transitions[t]) == "q0 read(1, c) B");
  }
  CHECK(differences == 1);

  const auto& fig4 = set.protocol("fig4");
  CHECK(fig4.visibility == 1);
  CHECK(fig4.alphabet == std::vector<std::string>{"d0", "a", "b"});
  CHECK_THROWS_AS(set.protocol("nope"), Error);
  for (const auto& c : set.constraints) CHECK_NOTHROW(set.protocol(c.protocol));
}

}  // TEST_SUITE
