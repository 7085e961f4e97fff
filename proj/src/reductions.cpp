#include "regverify/reductions.hpp"

#include <cstdlib>
#include <functional>
#include <map>
#include <set>
#include <sstream>

#include "regverify/error.hpp"

namespace regverify {

bool cnf_satisfiable(const CnfFormula& f) {
  if (f.variables > 20) throw Error(ErrorCode::CapExceeded, "truth table limited to 20 variables");
  for (std::uint32_t bits = 0; bits < (1U << f.variables); ++bits) {
    bool all = true;
    for (const auto& clause : f.clauses) {
      bool any = false;
      for (int lit : clause) {
        bool value = ((bits >> (std::abs(lit) - 1)) & 1U) != 0;
        if ((lit > 0) == value) any = true;
      }
      if (!any) {
        all = false;
        break;
      }
    }
    if (all) return true;
  }
  return false;
}

std::string format_cnf(const CnfFormula& f) {
  std::ostringstream os;
  os << "p cnf " << f.variables << ' ' << f.clauses.size() << '\n';
  for (const auto& c : f.clauses) os << c[0] << ' ' << c[1] << ' ' << c[2] << " 0\n";
  return os.str();
}

CnfFormula random_cnf(std::mt19937_64& rng, int variables, int clauses) {
  if (variables < 1 || clauses < 1) throw Error(ErrorCode::InvalidArgument, "need at least one variable and clause");
  CnfFormula f;
  f.variables = variables;
  std::uniform_int_distribution<int> var(1, variables);
  std::bernoulli_distribution sign(0.5);
  for (int i = 0; i < clauses; ++i) {
    std::array<int, 3> c{};
    for (auto& lit : c) lit = sign(rng) ? var(rng) : -var(rng);
    f.clauses.push_back(c);
  }
  return f;
}

namespace {

void check_cnf(const CnfFormula& f) {
  if (f.variables < 1 || f.clauses.empty()) throw Error(ErrorCode::InvalidArgument, "need n >= 1 and m >= 1");
  for (const auto& c : f.clauses)
    for (int lit : c)
      if (lit == 0 || std::abs(lit) > f.variables) throw Error(ErrorCode::InvalidArgument, "literal out of range");
}

std::string clause_state(std::size_t i, std::size_t m) {
  return i == m ? "qf" : "C" + std::to_string(i + 1) + "?";
}

}  // namespace

std::pair<Protocol, StateId> sat_to_cover(const CnfFormula& f) {
  check_cnf(f);
  const std::size_t m = f.clauses.size();
  Protocol p;
  p.register_count = 2 * f.variables;
  p.alphabet = {"d0", "true"};
  p.states.push_back("q0");
  for (std::size_t i = 0; i < m; ++i) {
    p.states.push_back(clause_state(i, m));
    for (int k = 1; k <= 3; ++k) p.states.push_back("T" + std::to_string(i + 1) + "_" + std::to_string(k) + "_1");
  }
  p.states.push_back("qf");
  p.initial.set(0);
  const SymbolId tru = 1;
  auto reg_of = [](int lit) { return static_cast<RegisterId>(lit > 0 ? 2 * lit - 2 : 2 * (-lit) - 1); };
  auto id = [&](const std::string& s) { return p.state_id(s); };

  for (RegisterId j = 0; j < static_cast<RegisterId>(p.register_count); ++j)
    p.transitions.push_back({0, Action::write(j, tru), 0});
  p.transitions.push_back({0, Action::read(0, kInitialSymbol), id(clause_state(0, m))});
  p.transitions.push_back({0, Action::read(0, tru), id(clause_state(0, m))});
  for (std::size_t i = 0; i < m; ++i) {
    for (int k = 0; k < 3; ++k) {
      int lit = f.clauses[i][static_cast<std::size_t>(k)];
      StateId mid = id("T" + std::to_string(i + 1) + "_" + std::to_string(k + 1) + "_1");
      p.transitions.push_back({id(clause_state(i, m)), Action::read(reg_of(lit), tru), mid});
      p.transitions.push_back({mid, Action::read(reg_of(-lit), kInitialSymbol), id(clause_state(i + 1, m))});
    }
  }
  return {p, id("qf")};
}

std::pair<Protocol, StateId> sat_to_uninit_target(const CnfFormula& f) {
  check_cnf(f);
  const std::size_t m = f.clauses.size();
  Protocol p;
  p.register_count = f.variables;
  p.alphabet = {"d0", "true", "false"};
  p.states.push_back("q0");
  for (std::size_t i = 0; i < m; ++i) p.states.push_back(clause_state(i, m));
  p.states.push_back("qf");
  p.initial.set(0);
  const SymbolId tru = 1, fls = 2;
  auto id = [&](const std::string& s) { return p.state_id(s); };

  for (RegisterId j = 0; j < static_cast<RegisterId>(p.register_count); ++j) {
    p.transitions.push_back({0, Action::write(j, tru), 0});
    p.transitions.push_back({0, Action::write(j, fls), 0});
  }
  p.transitions.push_back({0, Action::read(0, tru), id(clause_state(0, m))});
  p.transitions.push_back({0, Action::read(0, fls), id(clause_state(0, m))});
  for (std::size_t i = 0; i < m; ++i) {
    std::set<int> seen;
    for (int lit : f.clauses[i]) {
      if (!seen.insert(lit).second) continue;
      auto reg = static_cast<RegisterId>(std::abs(lit) - 1);
      p.transitions.push_back({id(clause_state(i, m)), Action::read(reg, lit > 0 ? tru : fls), id(clause_state(i + 1, m))});
    }
  }
  return {p, id("qf")};
}

Circuit parse_circuit(std::string_view text) {
  Circuit c;
  std::istringstream is{std::string(text)};
  std::string line;
  std::size_t lineno = 0;
  bool have_output = false;
  while (std::getline(is, line)) {
    ++lineno;
    auto hash = line.find('#');
    if (hash != std::string::npos) line.resize(hash);
    std::istringstream ls(line);
    std::vector<std::string> w;
    for (std::string x; ls >> x;) w.push_back(x);
    if (w.empty()) continue;
    if (w[0] == "input" && w.size() == 3 && (w[2] == "true" || w[2] == "false")) {
      c.inputs.emplace_back(w[1], w[2] == "true");
    } else if (w[0] == "gate" && w.size() == 4 && w[2] == "not") {
      c.gates.push_back({Gate::Kind::Not, w[3], "", w[1]});
    } else if (w[0] == "gate" && w.size() == 5 && (w[2] == "and" || w[2] == "or")) {
      c.gates.push_back({w[2] == "and" ? Gate::Kind::And : Gate::Kind::Or, w[3], w[4], w[1]});
    } else if (w[0] == "output" && w.size() == 2 && !have_output) {
      c.output = w[1];
      have_output = true;
    } else {
      throw SyntaxError(lineno, 1, "expected 'input x true|false', 'gate g and|or a b', 'gate g not a' or 'output g'");
    }
  }
  if (!have_output) throw Error(ErrorCode::Syntax, "circuit has no output line");
  return c;
}

std::string format_circuit(const Circuit& c) {
  std::ostringstream os;
  for (const auto& [name, value] : c.inputs) os << "input " << name << ' ' << (value ? "true" : "false") << '\n';
  for (const auto& g : c.gates) {
    os << "gate " << g.out << ' ';
    switch (g.kind) {
      case Gate::Kind::Not: os << "not " << g.in1; break;
      case Gate::Kind::And: os << "and " << g.in1 << ' ' << g.in2; break;
      case Gate::Kind::Or: os << "or " << g.in1 << ' ' << g.in2; break;
    }
    os << '\n';
  }
  os << "output " << c.output << '\n';
  return os.str();
}

std::vector<Gate> topological_gates(const Circuit& c) {
  std::map<std::string, int> producer;  // -1 for inputs
  for (const auto& [name, value] : c.inputs)
    if (!producer.emplace(name, -1).second) throw Error(ErrorCode::InvalidArgument, "wire '" + name + "' defined twice");
  for (std::size_t i = 0; i < c.gates.size(); ++i)
    if (!producer.emplace(c.gates[i].out, static_cast<int>(i)).second)
      throw Error(ErrorCode::InvalidArgument, "wire '" + c.gates[i].out + "' defined twice");
  auto require = [&](const std::string& w) {
    if (!producer.count(w)) throw Error(ErrorCode::UndefinedWire, "undefined wire '" + w + "'");
  };
  for (const auto& g : c.gates) {
    require(g.in1);
    if (g.kind != Gate::Kind::Not) require(g.in2);
  }
  require(c.output);

  std::vector<int> mark(c.gates.size(), 0);  // 0 new, 1 active, 2 done
  std::vector<Gate> order;
  std::function<void(int)> visit = [&](int i) {
    if (mark[static_cast<std::size_t>(i)] == 2) return;
    if (mark[static_cast<std::size_t>(i)] == 1) throw Error(ErrorCode::CyclicCircuit, "circuit has a cycle");
    mark[static_cast<std::size_t>(i)] = 1;
    const Gate& g = c.gates[static_cast<std::size_t>(i)];
    for (const auto* w : {&g.in1, &g.in2}) {
      if (w->empty()) continue;
      int src = producer.at(*w);
      if (src >= 0) visit(src);
    }
    mark[static_cast<std::size_t>(i)] = 2;
    order.push_back(g);
  };
  for (std::size_t i = 0; i < c.gates.size(); ++i) visit(static_cast<int>(i));
  return order;
}

bool evaluate_circuit(const Circuit& c) {
  std::map<std::string, bool> value(c.inputs.begin(), c.inputs.end());
  for (const auto& g : topological_gates(c)) {
    switch (g.kind) {
      case Gate::Kind::Not: value[g.out] = !value.at(g.in1); break;
      case Gate::Kind::And: value[g.out] = value.at(g.in1) && value.at(g.in2); break;
      case Gate::Kind::Or: value[g.out] = value.at(g.in1) || value.at(g.in2); break;
    }
  }
  return value.at(c.output);
}

Circuit random_circuit(std::mt19937_64& rng, int inputs, int gates) {
  if (inputs < 1 || gates < 0) throw Error(ErrorCode::InvalidArgument, "need at least one input");
  Circuit c;
  std::vector<std::string> wires;
  std::bernoulli_distribution coin(0.5);
  for (int i = 1; i <= inputs; ++i) {
    c.inputs.emplace_back("x" + std::to_string(i), coin(rng));
    wires.push_back("x" + std::to_string(i));
  }
  std::uniform_int_distribution<int> kind(0, 2);
  for (int i = 1; i <= gates; ++i) {
    std::uniform_int_distribution<std::size_t> pick(0, wires.size() - 1);
    Gate g;
    g.kind = static_cast<Gate::Kind>(kind(rng));
    g.in1 = wires[pick(rng)];
    if (g.kind != Gate::Kind::Not) g.in2 = wires[pick(rng)];
    g.out = "g" + std::to_string(i);
    c.gates.push_back(g);
    wires.push_back(g.out);
  }
  c.output = wires.back();
  return c;
}

std::pair<Protocol, StateId> cvp_to_cover(const Circuit& c, bool desired) {
  auto gates = topological_gates(c);
  Protocol p;
  p.register_count = 1;
  p.alphabet = {"d0"};
  std::map<std::string, std::pair<SymbolId, SymbolId>> sym;  // wire -> (true, false)
  auto declare = [&](const std::string& w) {
    p.alphabet.push_back("t_" + w);
    p.alphabet.push_back("f_" + w);
    auto t = static_cast<SymbolId>(p.alphabet.size() - 2);
    sym[w] = {t, static_cast<SymbolId>(t + 1)};
  };
  for (const auto& [name, value] : c.inputs) declare(name);
  for (const auto& g : gates) declare(g.out);
  if (p.alphabet.size() > kMaxSymbols) throw Error(ErrorCode::CapExceeded, "circuit too large");

  auto state = [&](const std::string& name, bool initial) {
    p.states.push_back(name);
    auto id = static_cast<StateId>(p.states.size() - 1);
    if (initial) p.initial.set(id);
    return id;
  };
  auto T = [&](const std::string& w) { return sym.at(w).first; };
  auto F = [&](const std::string& w) { return sym.at(w).second; };
  auto add = [&](StateId a, Action act, StateId b) { p.transitions.push_back({a, act, b}); };

  StateId in = state("in", true);
  for (const auto& [name, value] : c.inputs) add(in, Action::write(0, value ? T(name) : F(name)), in);

  for (const auto& g : gates) {
    StateId init = state(g.out + "_init", true);
    switch (g.kind) {
      case Gate::Kind::And: {
        StateId f = state(g.out + "_F", false), t1 = state(g.out + "_T1", false), t2 = state(g.out + "_T2", false);
        add(init, Action::read(0, F(g.in1)), f);
        add(init, Action::read(0, F(g.in2)), f);
        add(f, Action::write(0, F(g.out)), f);
        add(init, Action::read(0, T(g.in1)), t1);
        add(t1, Action::read(0, T(g.in2)), t2);
        add(t2, Action::write(0, T(g.out)), t2);
        break;
      }
      case Gate::Kind::Or: {
        StateId t = state(g.out + "_T", false), f1 = state(g.out + "_F1", false), f2 = state(g.out + "_F2", false);
        add(init, Action::read(0, T(g.in1)), t);
        add(init, Action::read(0, T(g.in2)), t);
        add(t, Action::write(0, T(g.out)), t);
        add(init, Action::read(0, F(g.in1)), f1);
        add(f1, Action::read(0, F(g.in2)), f2);
        add(f2, Action::write(0, F(g.out)), f2);
        break;
      }
      case Gate::Kind::Not: {
        StateId f = state(g.out + "_F", false), t = state(g.out + "_T", false);
        add(init, Action::read(0, T(g.in1)), f);
        add(f, Action::write(0, F(g.out)), f);
        add(init, Action::read(0, F(g.in1)), t);
        add(t, Action::write(0, T(g.out)), t);
        break;
      }
    }
  }

  StateId qf = state("qf", false);
  if (p.states.size() > kMaxStates) throw Error(ErrorCode::CapExceeded, "circuit too large");
  SymbolId goal = desired ? T(c.output) : F(c.output);
  std::vector<Transition> extra;
  for (const auto& t : p.transitions)
    if (t.action.kind == ActionKind::Write && t.action.symbol == goal) extra.push_back({t.source, t.action, qf});
  p.transitions.insert(p.transitions.end(), extra.begin(), extra.end());
  return {p, qf};
}

// ------------------------------------------------------------------ examples

namespace {

const char* kFig1 = R"(flavor: roundless
states: q0 A B C qf
initial: q0
registers: 1
alphabet: d0 a b c
transitions:
  q0 read(1, d0) B
  q0 write(1, c) A
  B read(1, d0) C
  C read(1, c) A
  A read(1, a) qf
  qf write(1, b) A
  C read(1, b) qf
  C write(1, a) C
)";

const char* kFig4 = R"(flavor: roundbased
states: q0 A B C D E qf
initial: q0
registers: 1
alphabet: d0 a b
visibility: 1
transitions:
  q0 inc q0
  q0 write(1, a) A
  A read(-1, 1, d0) B
  B read(-1, 1, a) C
  C write(1, b) q0
  q0 read(-1, 1, b) D
  D read(0, 1, d0) E
  E read(0, 1, b) qf
)";

std::string replace_once(std::string s, const std::string& from, const std::string& to) {
  auto pos = s.find(from);
  if (pos == std::string::npos) throw Error(ErrorCode::InvalidArgument, "example template mismatch");
  return s.replace(pos, from.size(), to);
}

BuiltinSet make_builtins() {
  BuiltinSet b;
  auto add = [&](std::string name, std::string src) {
    Protocol p = parse_protocol(src);
    b.protocols.push_back({std::move(name), std::move(src), std::move(p)});
  };
  add("fig1", kFig1);
  add("fig1_blue", replace_once(kFig1, "q0 read(1, d0) B", "q0 read(1, c) B"));
  add("fig1_red", replace_once(kFig1, "C read(1, c) A", "C write(1, a) A"));
  add("fig4", kFig4);

  b.constraints = {
      {"cover_qf", "fig1", "(pop qf)"},
      {"target_qf", "fig1", "(and (not (pop q0)) (not (pop A)) (not (pop B)) (not (pop C)))"},
      {"ex26", "fig1", "(and (not (pop C)) (or (reg 1 a) (and (reg 1 b) (not (pop A)))))"},
      {"psi", "fig4", "(exists k (pop qf k))"},
      {"psi1", "fig4", "(exists k (and (pop E k) (pop E (+ k 1))))"},
      {"psi2", "fig4", "(and (pop E 2) (forall k (or (reg 1 (+ k 1) b) (reg 1 (+ k 1) d0))))"},
  };
  return b;
}

}  // namespace

const Protocol& BuiltinSet::protocol(std::string_view name) const {
  for (const auto& p : protocols)
    if (p.name == name) return p.protocol;
  throw Error(ErrorCode::InvalidArgument, "no builtin protocol '" + std::string(name) + "'");
}

const std::string& BuiltinSet::constraint(std::string_view name) const {
  for (const auto& c : constraints)
    if (c.name == name) return c.source;
  throw Error(ErrorCode::InvalidArgument, "no builtin constraint '" + std::string(name) + "'");
}

const BuiltinSet& builtin_examples() {
  static const BuiltinSet set = make_builtins();
  return set;
}

}  // namespace regverify
