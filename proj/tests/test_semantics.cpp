#include <ostream>
#include <random>
#include <set>
#include <variant>

#include "doctest.h"
#include "regverify/error.hpp"
#include "regverify/reductions.hpp"
#include "regverify/semantics.hpp"
#include "regverify/trace.hpp"
#include "support/random_instances.hpp"
#include "support/reference.hpp"

using namespace regverify;
namespace ref = regverify::reference;

namespace {

// Transition ids of fig1 in declaration order.
constexpr TransitionId kQ0ReadB = 0, kQ0WriteC = 1, kBReadC = 2, kAReadQf = 4, kQfWriteB = 5, kCWriteA = 7;

const Protocol& fig1() { return builtin_examples().protocol("fig1"); }

StateSet states_of(const Protocol& p, std::initializer_list<const char*> names) {
  StateSet s;
  for (const char* n : names) s.set(p.state_id(n));
  return s;
}

AbstractConfiguration abstract_of(const Protocol& p, std::initializer_list<const char*> names, SymbolId reg) {
  AbstractConfiguration c(p.register_count);
  for (const char* n : names) c.set({p.state_id(n), 0}, true);
  c.set_symbol(0, 0, reg);
  return c;
}

ref::Snapshot snap(const Protocol& p, std::initializer_list<const char*> names, SymbolId reg) {
  return ref::snapshot(p, abstract_of(p, names, reg));
}

// The two-process execution reaching (qf + C, a).
ConcreteExecution example_execution(const Protocol& p, std::uint32_t processes = 2) {
  ConcreteExecution e;
  e.start = initial_concrete(p, {{p.state_id("q0"), processes}});
  e.steps = {{kQ0ReadB, 0, false}, {kBReadC, 0, false}, {kQ0WriteC, 0, false}, {kCWriteA, 0, false},
             {kAReadQf, 0, false}};
  return e;
}

}  // namespace

TEST_SUITE("semantics") {

TEST_CASE("initial configurations") {
  const auto& p = fig1();
  auto c = initial_configuration(p, states_of(p, {"q0"}));
  CHECK(c == abstract_of(p, {"q0"}, 0));

  const auto& rb = builtin_examples().protocol("fig4");
  auto r = initial_configuration(rb, states_of(rb, {"q0"}));
  CHECK(r.has({rb.state_id("q0"), 0}));
  CHECK(r.active_bound() == 0);
  CHECK(r.symbol(0, 0) == kInitialSymbol);

  CHECK_THROWS_AS(initial_configuration(p, states_of(p, {"A"})), Error);
  try {
    initial_configuration(p, StateSet{});
    FAIL("expected EmptySupport");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::EmptySupport);
  }
  try {
    initial_configuration(p, states_of(p, {"A"}));
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::NotInitialState);
  }
}

TEST_CASE("abstract successors of the fig1 initial configuration") {
  const auto& p = fig1();
  SymbolId c = p.symbol_id("c");
  std::set<ref::Snapshot> got;
  for (const auto& s : abstract_successors(p, abstract_of(p, {"q0"}, 0))) got.insert(ref::snapshot(p, s.config));
  std::set<ref::Snapshot> frozen{snap(p, {"q0", "B"}, 0), snap(p, {"B"}, 0), snap(p, {"q0", "A"}, c),
                                 snap(p, {"A"}, c)};
  CHECK(got == frozen);
  CHECK(got == ref::abstract_successors(p, snap(p, {"q0"}, 0)));
}

TEST_CASE("abstract successors from qf with register a") {
  const auto& p = fig1();
  SymbolId a = p.symbol_id("a"), b = p.symbol_id("b");
  std::set<ref::Snapshot> got;
  for (const auto& s : abstract_successors(p, abstract_of(p, {"qf"}, a))) got.insert(ref::snapshot(p, s.config));
  std::set<ref::Snapshot> frozen{snap(p, {"qf", "A"}, b), snap(p, {"A"}, b)};
  CHECK(got == frozen);
  CHECK(got == ref::abstract_successors(p, snap(p, {"qf"}, a)));
}

TEST_CASE("abstract successors carry moves that replay") {
  const auto& p = fig1();
  auto start = abstract_of(p, {"q0", "C"}, p.symbol_id("c"));
  for (const auto& s : abstract_successors(p, start)) CHECK(abstract_step(p, start, s.move) == s.config);
}

TEST_CASE("no transitions means no successors") {
  Protocol p = fig1();
  p.transitions.clear();
  CHECK(abstract_successors(p, abstract_of(p, {"q0"}, 0)).empty());
}

TEST_CASE("round-based successors need a window") {
  const auto& rb = builtin_examples().protocol("fig4");
  auto c = initial_configuration(rb, states_of(rb, {"q0"}));
  try {
    abstract_successors(rb, c);
    FAIL("expected MissingWindow");
  } catch (const Error& e) {
    CHECK(e.code() == ErrorCode::MissingWindow);
  }
  std::set<ref::Snapshot> got;
  for (const auto& s : abstract_successors(rb, c, RoundWindow{0, 1})) got.insert(ref::snapshot(rb, s.config));
  CHECK(got == ref::abstract_successors(rb, ref::snapshot(rb, c), 1));
}

TEST_CASE("concrete steps of the fig1 example") {
  const auto& p = fig1();
  auto e = example_execution(p);
  auto c1 = concrete_step(p, e.start, e.steps[0]);
  CHECK(c1.count({p.state_id("q0"), 0}) == 1);
  CHECK(c1.count({p.state_id("B"), 0}) == 1);
  CHECK(c1.symbol(0, 0) == kInitialSymbol);

  ConcreteConfiguration ac(1);
  ac.add({p.state_id("A"), 0});
  ac.add({p.state_id("C"), 0});
  ac.set_symbol(0, 0, p.symbol_id("c"));
  auto ac2 = concrete_step(p, ac, {kCWriteA, 0, false});
  CHECK(ac2.count({p.state_id("A"), 0}) == 1);
  CHECK(ac2.count({p.state_id("C"), 0}) == 1);
  CHECK(ac2.symbol(0, 0) == p.symbol_id("a"));

  // A reads a but the register holds c.
  CHECK_FALSE(try_concrete_step(p, ac, {kAReadQf, 0, false}).has_value());
  CHECK_THROWS_AS(concrete_step(p, ac, {kAReadQf, 0, false}), Error);
}

TEST_CASE("projection keeps support and registers") {
  const auto& p = fig1();
  auto two = initial_concrete(p, {{p.state_id("q0"), 2}});
  CHECK(project(two) == abstract_of(p, {"q0"}, 0));
  auto end = replay(p, example_execution(p));
  CHECK(project(end) == abstract_of(p, {"qf", "C"}, p.symbol_id("a")));

  const auto& rb = builtin_examples().protocol("fig4");
  ConcreteConfiguration c(1);
  c.add({rb.state_id("q0"), 0}, 3);
  c.add({rb.state_id("B"), 1});
  auto pc = project(c);
  CHECK(pc.has({rb.state_id("q0"), 0}));
  CHECK(pc.has({rb.state_id("B"), 1}));
  CHECK(ref::snapshot(rb, pc).populated.size() == 2);
}

TEST_CASE("replay of the example execution") {
  const auto& p = fig1();
  auto e = example_execution(p);
  auto end = replay(p, e);
  CHECK(end.count({p.state_id("qf"), 0}) == 1);
  CHECK(end.count({p.state_id("C"), 0}) == 1);
  CHECK(end.total() == 2);
  CHECK(end.symbol(0, 0) == p.symbol_id("a"));

  ConcreteExecution empty{e.start, {}};
  CHECK(replay(p, empty) == e.start);

  auto broken = e;
  std::swap(broken.steps[0], broken.steps[4]);
  try {
    replay(p, broken);
    FAIL("expected NotEnabled");
  } catch (const NotEnabledError& err) {
    CHECK(err.step_index() == 0);
  }
}

TEST_CASE("replay on the red variant reaches two processes on qf") {
  const auto& p = builtin_examples().protocol("fig1_red");
  // In the red variant C moves to A by writing a.
  TransitionId c_write_a_to_A = 0;
  for (TransitionId t = 0; t < p.transitions.size(); ++t)
    if (format_transition(p, p.transitions[t]) == "C write(1, a) A") c_write_a_to_A = t;
  ConcreteExecution e;
  e.start = initial_concrete(p, {{p.state_id("q0"), 2}});
  e.steps = {{kQ0ReadB, 0, false},       {kQ0ReadB, 0, false},       {kBReadC, 0, false},  {kBReadC, 0, false},
             {c_write_a_to_A, 0, false}, {c_write_a_to_A, 0, false}, {kAReadQf, 0, false}, {kAReadQf, 0, false}};
  auto end = replay(p, e);
  CHECK(end.count({p.state_id("qf"), 0}) == 2);
  CHECK(end.total() == 2);
  CHECK(end.symbol(0, 0) == p.symbol_id("a"));
}

TEST_CASE("copycat adds one process on the target") {
  const auto& p = fig1();
  auto e = example_execution(p);
  auto ext = copycat_extend(p, e, {p.state_id("C"), 0});
  auto end = replay(p, ext);
  CHECK(ext.start.count({p.state_id("q0"), 0}) == 3);

  // Expected final population computed by the reference semantics.
  auto original = ref::replay(p, ref::population(e.start, p.states.size()), e.steps);
  REQUIRE(original.has_value());
  auto expected = *original;
  ++expected.counts[{0, p.state_id("C")}];
  CHECK(ref::population(end, p.states.size()) == expected);
  auto independent = ref::replay(p, ref::population(ext.start, p.states.size()), ext.steps);
  REQUIRE(independent.has_value());
  CHECK(*independent == expected);
}

TEST_CASE("copycat base case and errors") {
  const auto& p = fig1();
  ConcreteExecution e{initial_concrete(p, {{p.state_id("q0"), 1}}), {}};
  auto ext = copycat_extend(p, e, {p.state_id("q0"), 0});
  CHECK(ext.steps.empty());
  CHECK(replay(p, ext).count({p.state_id("q0"), 0}) == 2);
  try {
    copycat_extend(p, example_execution(p), {p.state_id("B"), 0});
    FAIL("expected TargetNotPopulated");
  } catch (const Error& err) {
    CHECK(err.code() == ErrorCode::TargetNotPopulated);
  }
}

TEST_CASE("copycat on random executions") {
  std::mt19937_64 rng(21);
  for (int i = 0; i < 200; ++i) {
    Protocol p = testing::random_protocol(rng, {4, 3, testing::pick(rng, 1, 2), 9, testing::pick(rng, -1, 1)});
    ConcreteConfiguration c = initial_concrete(p, {{0, 2}});
    ConcreteExecution e{c, {}};
    for (int step = 0; step < 12; ++step) {
      std::vector<Move> enabled;
      for (const auto& l : c.support())
        for (TransitionId t = 0; t < p.transitions.size(); ++t)
          if (p.transitions[t].source == l.state && try_concrete_step(p, c, {t, l.round, false}))
            enabled.push_back({t, l.round, false});
      if (enabled.empty()) break;
      auto m = enabled[testing::pick(rng, 0, static_cast<int>(enabled.size()) - 1)];
      c = concrete_step(p, c, m);
      e.steps.push_back(m);
    }
    auto sup = c.support();
    Location target = sup[testing::pick(rng, 0, static_cast<int>(sup.size()) - 1)];
    auto ext = copycat_extend(p, e, target);
    auto expected = ref::population(c, p.states.size());
    ++expected.counts[{target.round, target.state}];
    auto got = ref::replay(p, ref::population(ext.start, p.states.size()), ext.steps);
    REQUIRE(got.has_value());
    CHECK(*got == expected);
    CHECK(ext.start.total() == e.start.total() + 1);
  }
}

TEST_CASE("abstract to concrete on the fig1 example") {
  const auto& p = fig1();
  Execution e;
  e.start = abstract_of(p, {"q0"}, 0);
  e.steps = {{kQ0ReadB, 0, false}, {kBReadC, 0, true}, {kQ0WriteC, 0, true}, {kCWriteA, 0, false},
             {kAReadQf, 0, true}};
  REQUIRE(replay(p, e) == abstract_of(p, {"qf", "C"}, p.symbol_id("a")));
  auto ce = abstract_to_concrete(p, e);
  auto end = replay(p, ce);
  CHECK(project(end) == replay(p, e));
  CHECK(project(ce.start) == e.start);
  CHECK(end.total() >= 2);

  Execution zero{abstract_of(p, {"q0"}, 0), {}};
  auto cz = abstract_to_concrete(p, zero);
  CHECK(cz.steps.empty());
  CHECK(cz.start.total() == 1);
  CHECK(cz.start.count({p.state_id("q0"), 0}) == 1);
}

TEST_CASE("abstract executions with a missing process fail to replay") {
  const auto& p = fig1();
  Execution e{abstract_of(p, {"q0"}, 0), {{kQ0ReadB, 0, true}, {kQ0WriteC, 0, false}}};
  CHECK_THROWS_AS(replay(p, e), Error);
  CHECK_THROWS_AS(abstract_to_concrete(p, e), Error);
}

TEST_CASE("concrete steps project to abstract steps") {
  std::mt19937_64 rng(22);
  for (int i = 0; i < 200; ++i) {
    Protocol p = testing::random_protocol(rng, {4, 3, testing::pick(rng, 1, 2), 10, testing::pick(rng, -1, 1)});
    ConcreteConfiguration c = initial_concrete(p, {{0, 3}});
    for (int step = 0; step < 15; ++step) {
      std::vector<Move> enabled;
      for (const auto& l : c.support())
        for (TransitionId t = 0; t < p.transitions.size(); ++t)
          if (p.transitions[t].source == l.state && try_concrete_step(p, c, {t, l.round, false}))
            enabled.push_back({t, l.round, false});
      if (enabled.empty()) break;
      auto m = enabled[testing::pick(rng, 0, static_cast<int>(enabled.size()) - 1)];
      auto next = concrete_step(p, c, m);
      Location src = move_source(p, m);
      m.deserting = next.count(src) == 0;
      auto abs = try_abstract_step(p, project(c), m);
      REQUIRE(abs.has_value());
      CHECK(*abs == project(next));
      c = next;
    }
  }
}

TEST_CASE("reads below round zero are disabled") {
  const auto& rb = builtin_examples().protocol("fig4");
  // A read(-1, 1, d0) B from round 0 would read round -1.
  AbstractConfiguration c(1);
  c.set({rb.state_id("A"), 0}, true);
  CHECK_FALSE(try_abstract_step(rb, c, {2, 0, false}).has_value());
  c.set({rb.state_id("A"), 1}, true);
  CHECK(try_abstract_step(rb, c, {2, 1, false}).has_value());
}

TEST_CASE("trace text round-trips") {
  const auto& p = fig1();
  auto ce = example_execution(p);
  auto parsed = parse_trace(p, write_trace(p, ce));
  REQUIRE(std::holds_alternative<ConcreteExecution>(parsed));
  CHECK(std::get<ConcreteExecution>(parsed).steps == ce.steps);
  CHECK(std::get<ConcreteExecution>(parsed).start == ce.start);

  const auto& rb = builtin_examples().protocol("fig4");
  Execution e{initial_configuration(rb, states_of(rb, {"q0"})), {{1, 0, false}, {0, 0, true}}};
  REQUIRE_NOTHROW(replay(rb, e));
  auto back = parse_trace(rb, write_trace(rb, e));
  REQUIRE(std::holds_alternative<Execution>(back));
  CHECK(std::get<Execution>(back).steps == e.steps);
  CHECK(std::get<Execution>(back).start == e.start);
}

}  // TEST_SUITE
