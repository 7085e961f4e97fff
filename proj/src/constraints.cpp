#include "regverify/constraints.hpp"

#include <algorithm>
#include <cctype>
#include <map>
#include <optional>
#include <set>
#include <sstream>

#include "regverify/error.hpp"

namespace regverify {

namespace {

struct SExpr {
  bool list = false;
  std::string atom;
  std::vector<SExpr> items;
  std::size_t line = 1;
  std::size_t column = 1;
};

class SExprParser {
 public:
  explicit SExprParser(std::string_view text) : text_(text) {}

  SExpr parse_all() {
    SExpr e = parse();
    skip();
    if (pos_ < text_.size()) throw SyntaxError(line_, col_, "trailing input");
    return e;
  }

 private:
  void advance() {
    if (text_[pos_] == '\n') {
      ++line_;
      col_ = 1;
    } else {
      ++col_;
    }
    ++pos_;
  }

  void skip() {
    while (pos_ < text_.size()) {
      char c = text_[pos_];
      if (c == ';' || c == '#') {
        while (pos_ < text_.size() && text_[pos_] != '\n') advance();
      } else if (std::isspace(static_cast<unsigned char>(c))) {
        advance();
      } else {
        break;
      }
    }
  }

  SExpr parse() {
    skip();
    if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "unexpected end of input");
    SExpr e;
    e.line = line_;
    e.column = col_;
    char c = text_[pos_];
    if (c == ')') throw SyntaxError(line_, col_, "unexpected ')'");
    if (c == '(') {
      advance();
      e.list = true;
      for (;;) {
        skip();
        if (pos_ >= text_.size()) throw SyntaxError(line_, col_, "missing ')'");
        if (text_[pos_] == ')') {
          advance();
          break;
        }
        e.items.push_back(parse());
      }
      return e;
    }
    while (pos_ < text_.size()) {
      char d = text_[pos_];
      if (d == '(' || d == ')' || d == ';' || d == '#' || std::isspace(static_cast<unsigned char>(d))) break;
      e.atom += d;
      advance();
    }
    return e;
  }

  std::string_view text_;
  std::size_t pos_ = 0;
  std::size_t line_ = 1;
  std::size_t col_ = 1;
};

[[noreturn]] void fail(const SExpr& e, const std::string& msg) { throw SyntaxError(e.line, e.column, msg); }

bool is_head(const SExpr& e, const char* name) {
  return e.list && !e.items.empty() && !e.items[0].list && e.items[0].atom == name;
}

std::optional<long> as_number(const SExpr& e) {
  if (e.list || e.atom.empty() || e.atom.size() > 9) return std::nullopt;
  std::size_t start = e.atom[0] == '-' ? 1 : 0;
  if (start == e.atom.size()) return std::nullopt;
  for (std::size_t i = start; i < e.atom.size(); ++i)
    if (!std::isdigit(static_cast<unsigned char>(e.atom[i]))) return std::nullopt;
  return std::stol(e.atom);
}

StateId bind_state(const Protocol& p, const SExpr& e) {
  if (e.list) fail(e, "expected state name");
  auto id = p.find_state(e.atom);
  if (!id) throw Error(ErrorCode::Semantic, "constraint: unknown state '" + e.atom + "'");
  return *id;
}

SymbolId bind_symbol(const Protocol& p, const SExpr& e) {
  if (e.list) fail(e, "expected symbol name");
  auto id = p.find_symbol(e.atom);
  if (!id) throw Error(ErrorCode::Semantic, "constraint: unknown symbol '" + e.atom + "'");
  return *id;
}

RegisterId bind_register(const Protocol& p, const SExpr& e) {
  auto n = as_number(e);
  if (!n) fail(e, "expected register index");
  if (*n < 1 || *n > p.register_count) throw Error(ErrorCode::Semantic, "constraint: register index out of range");
  return static_cast<RegisterId>(*n - 1);
}

// Shared Boolean connective parsing; `leaf` handles everything else.
template <class A, class Leaf>
Expr<A> parse_bool(const SExpr& e, Leaf&& leaf) {
  using E = Expr<A>;
  if (!e.list) {
    if (e.atom == "true") return E::constant(true);
    if (e.atom == "false") return E::constant(false);
    fail(e, "unexpected atom '" + e.atom + "'");
  }
  if (e.items.empty()) fail(e, "empty list");
  if (is_head(e, "and") || is_head(e, "or")) {
    std::vector<E> args;
    for (std::size_t i = 1; i < e.items.size(); ++i) args.push_back(parse_bool<A>(e.items[i], leaf));
    if (args.empty()) return E::constant(is_head(e, "and"));
    if (args.size() == 1) return std::move(args[0]);
    return is_head(e, "and") ? E::conj(std::move(args)) : E::disj(std::move(args));
  }
  if (is_head(e, "not")) {
    if (e.items.size() != 2) fail(e, "not takes one argument");
    return E::negate(parse_bool<A>(e.items[1], leaf));
  }
  return leaf(e);
}

struct RoundContext {
  const Protocol& p;
  ConstraintOptions opts;
  std::optional<std::string> variable;
};

Term parse_term(const RoundContext& ctx, const SExpr& e) {
  auto check = [&](long m) {
    if (m < 0) fail(e, "negative term offset");
    if (m > ctx.opts.max_constant) fail(e, "constant exceeds limit " + std::to_string(ctx.opts.max_constant));
    return static_cast<int>(m);
  };
  if (auto n = as_number(e)) return {false, check(*n)};
  if (!e.list) {
    if (ctx.variable && e.atom == *ctx.variable) return {true, 0};
    fail(e, "unbound variable '" + e.atom + "'");
  }
  if (is_head(e, "+") || is_head(e, "-")) {
    if (e.items.size() != 3) fail(e, "term must be (+ k m)");
    if (is_head(e, "-")) fail(e, "negative term offset");
    const SExpr* var = &e.items[1];
    const SExpr* num = &e.items[2];
    if (as_number(*var)) std::swap(var, num);
    auto n = as_number(*num);
    if (!n || var->list) fail(e, "term must be (+ k m)");
    if (!ctx.variable || var->atom != *ctx.variable) fail(*var, "unbound variable '" + var->atom + "'");
    return {true, check(*n)};
  }
  fail(e, "bad term");
}

RoundAtom parse_round_atom(const RoundContext& ctx, const SExpr& e) {
  RoundAtom a;
  if (is_head(e, "pop")) {
    if (e.items.size() != 3) fail(e, "expected (pop state term)");
    a.kind = RoundAtom::Kind::Pop;
    a.state = bind_state(ctx.p, e.items[1]);
    a.term = parse_term(ctx, e.items[2]);
  } else if (is_head(e, "reg")) {
    if (e.items.size() != 4) fail(e, "expected (reg register term symbol)");
    a.kind = RoundAtom::Kind::Reg;
    a.reg = bind_register(ctx.p, e.items[1]);
    a.term = parse_term(ctx, e.items[2]);
    a.symbol = bind_symbol(ctx.p, e.items[3]);
  } else {
    fail(e, "expected pop or reg atom");
  }
  return a;
}

std::string term_text(const Term& t) {
  if (!t.variable) return std::to_string(t.offset);
  if (t.offset == 0) return "k";
  return "(+ k " + std::to_string(t.offset) + ")";
}

template <class A, class AtomText>
void format_expr(std::ostringstream& os, const Expr<A>& e, AtomText&& text) {
  using Op = typename Expr<A>::Op;
  switch (e.op) {
    case Op::True: os << "true"; return;
    case Op::False: os << "false"; return;
    case Op::Atom: os << text(e.atom); return;
    case Op::Not:
      os << "(not ";
      format_expr(os, e.args[0], text);
      os << ")";
      return;
    case Op::And:
    case Op::Or:
      os << (e.op == Op::And ? "(and" : "(or");
      for (const auto& x : e.args) {
        os << ' ';
        format_expr(os, x, text);
      }
      os << ")";
      return;
  }
}

bool is_literal(const RoundlessConstraint& e) {
  using Op = RoundlessConstraint::Op;
  return e.op == Op::Atom || e.op == Op::True || e.op == Op::False ||
         (e.op == Op::Not && e.args[0].op == Op::Atom);
}

bool is_clause(const RoundlessConstraint& e) {
  if (is_literal(e)) return true;
  if (e.op != RoundlessConstraint::Op::And) return false;
  return std::all_of(e.args.begin(), e.args.end(), is_literal);
}

}  // namespace

// ---------------------------------------------------------------- roundless

RoundlessConstraint parse_roundless_constraint(const Protocol& p, std::string_view text) {
  if (p.round_based()) throw Error(ErrorCode::InvalidArgument, "roundless constraint for a round-based protocol");
  SExpr root = SExprParser(text).parse_all();
  std::function<RoundlessConstraint(const SExpr&)> leaf = [&](const SExpr& e) -> RoundlessConstraint {
    RoundlessAtom a;
    if (is_head(e, "pop")) {
      if (e.items.size() != 2) fail(e, "expected (pop state)");
      a.kind = RoundlessAtom::Kind::Pop;
      a.state = bind_state(p, e.items[1]);
    } else if (is_head(e, "reg")) {
      if (e.items.size() != 3) fail(e, "expected (reg register symbol)");
      a.kind = RoundlessAtom::Kind::Reg;
      a.reg = bind_register(p, e.items[1]);
      a.symbol = bind_symbol(p, e.items[2]);
    } else {
      fail(e, "expected pop or reg atom");
    }
    return RoundlessConstraint::of(a);
  };
  return parse_bool<RoundlessAtom>(root, leaf);
}

std::string format_constraint(const Protocol& p, const RoundlessConstraint& phi) {
  std::ostringstream os;
  format_expr(os, phi, [&](const RoundlessAtom& a) {
    if (a.kind == RoundlessAtom::Kind::Pop) return "(pop " + p.states.at(a.state) + ")";
    return "(reg " + std::to_string(a.reg + 1) + " " + p.alphabet.at(a.symbol) + ")";
  });
  return os.str();
}

bool eval_roundless(const AbstractConfiguration& c, const RoundlessConstraint& phi) {
  return evaluate(phi, [&](const RoundlessAtom& a) {
    if (a.kind == RoundlessAtom::Kind::Pop) return c.has(a.state);
    return c.symbol(0, a.reg) == a.symbol;
  });
}

RoundlessConstraint cover_constraint(StateId target) {
  return RoundlessConstraint::of({RoundlessAtom::Kind::Pop, target, 0, 0});
}

RoundlessConstraint target_constraint(const Protocol& p, StateId target) {
  std::vector<RoundlessConstraint> lits;
  for (StateId q = 0; q < p.states.size(); ++q)
    if (q != target) lits.push_back(RoundlessConstraint::negate(RoundlessConstraint::of({RoundlessAtom::Kind::Pop, q, 0, 0})));
  if (lits.empty()) return RoundlessConstraint::constant(true);
  if (lits.size() == 1) return lits[0];
  return RoundlessConstraint::conj(std::move(lits));
}

bool ClauseDecomposition::accepts(const AbstractConfiguration& c) const {
  if (!satisfiable) return false;
  for (std::size_t q = 0; q < kMaxStates; ++q) {
    if (q_plus.test(q) && !c.has(static_cast<StateId>(q))) return false;
    if (q_minus.test(q) && c.has(static_cast<StateId>(q))) return false;
  }
  for (std::size_t j = 0; j < d_ok.size(); ++j)
    if (!d_ok[j][c.symbol(0, static_cast<RegisterId>(j))]) return false;
  return true;
}

bool is_dnf(const RoundlessConstraint& phi) {
  if (is_clause(phi)) return true;
  if (phi.op != RoundlessConstraint::Op::Or) return false;
  return std::all_of(phi.args.begin(), phi.args.end(), is_clause);
}

std::vector<ClauseDecomposition> dnf_clauses(const Protocol& p, const RoundlessConstraint& phi) {
  using Op = RoundlessConstraint::Op;
  if (!is_dnf(phi)) throw Error(ErrorCode::NotDnf, "constraint is not in disjunctive normal form");
  std::vector<const RoundlessConstraint*> clauses;
  if (phi.op == Op::Or) {
    for (const auto& c : phi.args) clauses.push_back(&c);
  } else {
    clauses.push_back(&phi);
  }
  std::vector<ClauseDecomposition> out;
  for (const auto* clause : clauses) {
    ClauseDecomposition d;
    d.d_ok.assign(static_cast<std::size_t>(p.register_count), std::vector<bool>(p.alphabet.size(), true));
    std::vector<const RoundlessConstraint*> lits;
    if (clause->op == Op::And) {
      for (const auto& l : clause->args) lits.push_back(&l);
    } else {
      lits.push_back(clause);
    }
    for (const auto* lit : lits) {
      if (lit->op == Op::True) continue;
      if (lit->op == Op::False) {
        d.satisfiable = false;
        continue;
      }
      bool positive = lit->op == Op::Atom;
      const RoundlessAtom& a = positive ? lit->atom : lit->args[0].atom;
      if (a.kind == RoundlessAtom::Kind::Pop) {
        (positive ? d.q_plus : d.q_minus).set(a.state);
      } else if (positive) {
        for (std::size_t s = 0; s < p.alphabet.size(); ++s)
          if (s != a.symbol) d.d_ok[a.reg][s] = false;
      } else {
        d.d_ok[a.reg][a.symbol] = false;
      }
    }
    if ((d.q_plus & d.q_minus).any()) d.satisfiable = false;
    for (const auto& allowed : d.d_ok)
      if (std::none_of(allowed.begin(), allowed.end(), [](bool b) { return b; })) d.satisfiable = false;
    out.push_back(std::move(d));
  }
  return out;
}

namespace {

using Clause = std::vector<RoundlessConstraint>;

std::vector<Clause> dnf_of(const RoundlessConstraint& e, bool negated, std::size_t cap) {
  using Op = RoundlessConstraint::Op;
  switch (e.op) {
    case Op::True:
    case Op::False: {
      bool value = (e.op == Op::True) != negated;
      return value ? std::vector<Clause>{Clause{}} : std::vector<Clause>{};
    }
    case Op::Atom:
      return {Clause{negated ? RoundlessConstraint::negate(e) : e}};
    case Op::Not:
      return dnf_of(e.args[0], !negated, cap);
    case Op::And:
    case Op::Or: {
      bool conj = (e.op == Op::And) != negated;
      if (!conj) {
        std::vector<Clause> out;
        for (const auto& a : e.args) {
          auto part = dnf_of(a, negated, cap);
          out.insert(out.end(), part.begin(), part.end());
          if (out.size() > cap) throw Error(ErrorCode::CapExceeded, "DNF conversion exceeds clause cap");
        }
        return out;
      }
      std::vector<Clause> acc{Clause{}};
      for (const auto& a : e.args) {
        auto part = dnf_of(a, negated, cap);
        std::vector<Clause> next;
        for (const auto& x : acc)
          for (const auto& y : part) {
            Clause c = x;
            c.insert(c.end(), y.begin(), y.end());
            next.push_back(std::move(c));
            if (next.size() > cap) throw Error(ErrorCode::CapExceeded, "DNF conversion exceeds clause cap");
          }
        acc = std::move(next);
      }
      return acc;
    }
  }
  return {};
}

}  // namespace

RoundlessConstraint to_dnf(const RoundlessConstraint& phi, std::size_t max_clauses) {
  auto clauses = dnf_of(phi, false, max_clauses);
  std::vector<RoundlessConstraint> disjuncts;
  for (auto& c : clauses) {
    if (c.empty()) return RoundlessConstraint::constant(true);
    disjuncts.push_back(c.size() == 1 ? c[0] : RoundlessConstraint::conj(std::move(c)));
  }
  if (disjuncts.empty()) return RoundlessConstraint::constant(false);
  if (disjuncts.size() == 1) return disjuncts[0];
  return RoundlessConstraint::disj(std::move(disjuncts));
}

// -------------------------------------------------------------- round-based

RoundConstraint parse_round_constraint(const Protocol& p, std::string_view text, ConstraintOptions opts) {
  if (!p.round_based()) throw Error(ErrorCode::InvalidArgument, "round-based constraint for a roundless protocol");
  SExpr root = SExprParser(text).parse_all();
  RoundConstraint psi;
  auto intern = [&](Apc apc) {
    for (std::size_t i = 0; i < psi.apcs.size(); ++i)
      if (psi.apcs[i] == apc) return i;
    psi.apcs.push_back(std::move(apc));
    return psi.apcs.size() - 1;
  };

  std::function<Expr<std::size_t>(const SExpr&)> leaf = [&](const SExpr& e) -> Expr<std::size_t> {
    if (is_head(e, "exists") || is_head(e, "forall")) {
      if (e.items.size() != 3 || e.items[1].list) fail(e, "expected (exists k proposition)");
      RoundContext ctx{p, opts, e.items[1].atom};
      if (as_number(e.items[1])) fail(e.items[1], "quantified variable must be a name");
      std::function<Proposition(const SExpr&)> prop_leaf = [&](const SExpr& x) -> Proposition {
        if (is_head(x, "exists") || is_head(x, "forall")) fail(x, "nested quantifiers are not allowed");
        return Proposition::of(parse_round_atom(ctx, x));
      };
      Apc apc;
      apc.kind = is_head(e, "exists") ? Apc::Kind::Exists : Apc::Kind::Forall;
      apc.body = parse_bool<RoundAtom>(e.items[2], prop_leaf);
      return Expr<std::size_t>::of(intern(std::move(apc)));
    }
    RoundContext ctx{p, opts, std::nullopt};
    Apc apc;
    apc.kind = Apc::Kind::Closed;
    apc.body = Proposition::of(parse_round_atom(ctx, e));
    return Expr<std::size_t>::of(intern(std::move(apc)));
  };
  psi.formula = parse_bool<std::size_t>(root, leaf);
  return psi;
}

std::string format_proposition(const Protocol& p, const Proposition& prop) {
  std::ostringstream os;
  format_expr(os, prop, [&](const RoundAtom& a) {
    if (a.kind == RoundAtom::Kind::Pop) return "(pop " + p.states.at(a.state) + " " + term_text(a.term) + ")";
    return "(reg " + std::to_string(a.reg + 1) + " " + term_text(a.term) + " " + p.alphabet.at(a.symbol) + ")";
  });
  return os.str();
}

std::string format_constraint(const Protocol& p, const RoundConstraint& psi) {
  std::ostringstream os;
  format_expr(os, psi.formula, [&](std::size_t i) {
    const Apc& apc = psi.apcs.at(i);
    switch (apc.kind) {
      case Apc::Kind::Closed: return format_proposition(p, apc.body);
      case Apc::Kind::Exists: return "(exists k " + format_proposition(p, apc.body) + ")";
      case Apc::Kind::Forall: return "(forall k " + format_proposition(p, apc.body) + ")";
    }
    return std::string();
  });
  return os.str();
}

int max_offset(const Proposition& prop) {
  int m = 0;
  for_each_atom(prop, [&](const RoundAtom& a) { m = std::max(m, a.term.offset); });
  return m;
}

int max_constant(const RoundConstraint& psi) {
  int m = 0;
  for (const auto& apc : psi.apcs) m = std::max(m, max_offset(apc.body));
  return m;
}

bool eval_atom(const AbstractConfiguration& c, const RoundAtom& a, int k) {
  int round = (a.term.variable ? k : 0) + a.term.offset;
  if (a.kind == RoundAtom::Kind::Pop) return c.has({a.state, round});
  return c.symbol(round, a.reg) == a.symbol;
}

bool eval_proposition(const AbstractConfiguration& c, const Proposition& prop, int k) {
  return evaluate(prop, [&](const RoundAtom& a) { return eval_atom(c, a, k); });
}

bool eval_roundbased(const AbstractConfiguration& c, const RoundConstraint& psi, int active_bound) {
  int bound = std::max(active_bound, c.active_bound());
  // Past `bound` every variable atom reads the empty tail, so one extra
  // round represents all later ones.
  int last = bound + max_constant(psi) + 1;
  return evaluate(psi.formula, [&](std::size_t i) {
    const Apc& apc = psi.apcs[i];
    if (apc.kind == Apc::Kind::Closed) return eval_proposition(c, apc.body, 0);
    bool want = apc.kind == Apc::Kind::Exists;
    for (int k = 0; k <= last; ++k)
      if (eval_proposition(c, apc.body, k) == want) return want;
    return !want;
  });
}

bool eval_roundbased(const AbstractConfiguration& c, const RoundConstraint& psi) {
  return eval_roundbased(c, psi, c.active_bound());
}

bool tail_value(const RoundAtom& a) {
  return a.kind == RoundAtom::Kind::Reg && a.symbol == kInitialSymbol;
}

std::vector<Implicant> prime_implicants(int n, const std::function<bool(std::uint64_t)>& f) {
  if (n > 14) throw Error(ErrorCode::CapExceeded, "too many atoms for implicant enumeration");
  std::vector<std::uint32_t> pow3(static_cast<std::size_t>(n) + 1, 1);
  for (int i = 1; i <= n; ++i) pow3[static_cast<std::size_t>(i)] = pow3[static_cast<std::size_t>(i) - 1] * 3;
  const std::uint32_t cubes = pow3[static_cast<std::size_t>(n)];
  // digit 0/1 fixes the variable, digit 2 leaves it free
  std::vector<std::uint8_t> implicant(cubes, 0);
  for (std::uint32_t idx = 0; idx < cubes; ++idx) {
    std::uint32_t rest = idx;
    int free_digit = -1;
    std::uint64_t bits = 0;
    for (int i = 0; i < n; ++i) {
      std::uint32_t d = rest % 3;
      rest /= 3;
      if (d == 2 && free_digit < 0) free_digit = i;
      if (d == 1) bits |= std::uint64_t{1} << i;
    }
    if (free_digit < 0) {
      implicant[idx] = f(bits) ? 1 : 0;
    } else {
      std::uint32_t p = pow3[static_cast<std::size_t>(free_digit)];
      implicant[idx] = implicant[idx - 2 * p] && implicant[idx - p];
    }
  }
  std::vector<Implicant> out;
  for (std::uint32_t idx = 0; idx < cubes; ++idx) {
    if (!implicant[idx]) continue;
    std::uint32_t rest = idx;
    bool prime = true;
    Implicant lits;
    for (int i = 0; i < n; ++i) {
      std::uint32_t d = rest % 3;
      rest /= 3;
      if (d == 2) continue;
      lits.emplace_back(i, d == 1);
      std::uint32_t widened = idx + (2 - d) * pow3[static_cast<std::size_t>(i)];
      if (implicant[widened]) prime = false;
    }
    if (prime) out.push_back(std::move(lits));
  }
  std::sort(out.begin(), out.end(), [](const Implicant& a, const Implicant& b) {
    if (a.size() != b.size()) return a.size() < b.size();
    return a < b;
  });
  return out;
}

std::vector<ApcCandidate> decompose_apcs(const RoundConstraint& psi) {
  const int n = static_cast<int>(psi.apcs.size());
  auto implicants = prime_implicants(n, [&](std::uint64_t bits) {
    return evaluate(psi.formula, [&](std::size_t i) { return ((bits >> i) & 1U) != 0; });
  });

  std::vector<ApcCandidate> out;
  for (const auto& imp : implicants) {
    std::vector<ClosedLiteral> fixed;
    std::vector<Proposition> exists, forall;
    for (auto [i, value] : imp) {
      const Apc& apc = psi.apcs[static_cast<std::size_t>(i)];
      switch (apc.kind) {
        case Apc::Kind::Closed:
          if (apc.body.op != Proposition::Op::Atom || apc.body.atom.term.variable)
            throw Error(ErrorCode::InvalidArgument, "a closed presence constraint must be a single closed atom");
          fixed.push_back({apc.body.atom, value});
          break;
        case Apc::Kind::Exists:
          (value ? exists : forall).push_back(value ? apc.body : Proposition::negate(apc.body));
          break;
        case Apc::Kind::Forall:
          (value ? forall : exists).push_back(value ? apc.body : Proposition::negate(apc.body));
          break;
      }
    }
    std::set<RoundAtom> inner;
    for (const auto* group : {&exists, &forall})
      for (const auto& body : *group)
        for_each_atom(body, [&](const RoundAtom& a) {
          if (!a.term.variable) inner.insert(a);
        });
    std::vector<RoundAtom> free_atoms;
    for (const auto& a : inner) {
      bool known = std::any_of(fixed.begin(), fixed.end(), [&](const ClosedLiteral& l) { return l.atom == a; });
      if (!known) free_atoms.push_back(a);
    }
    if (free_atoms.size() > 12) throw Error(ErrorCode::CapExceeded, "too many closed atoms inside quantifiers");

    for (std::uint64_t bits = 0; bits < (std::uint64_t{1} << free_atoms.size()); ++bits) {
      std::vector<ClosedLiteral> closed = fixed;
      for (std::size_t i = 0; i < free_atoms.size(); ++i) closed.push_back({free_atoms[i], ((bits >> i) & 1U) != 0});
      std::sort(closed.begin(), closed.end());
      auto value_of = [&](const RoundAtom& a) -> int {
        if (a.term.variable) return -1;
        for (const auto& l : closed)
          if (l.atom == a) return l.positive ? 1 : 0;
        return -1;
      };
      ApcCandidate cand;
      cand.closed = closed;
      bool dead = false;
      for (const auto& body : exists) {
        Proposition s = substitute(body, value_of);
        if (s.op == Proposition::Op::False) dead = true;
        if (s.op == Proposition::Op::True) continue;
        if (std::find(cand.existential.begin(), cand.existential.end(), s) == cand.existential.end())
          cand.existential.push_back(std::move(s));
      }
      for (const auto& body : forall) {
        Proposition s = substitute(body, value_of);
        if (s.op == Proposition::Op::False) dead = true;
        if (s.op == Proposition::Op::True) continue;
        if (std::find(cand.universal.begin(), cand.universal.end(), s) == cand.universal.end())
          cand.universal.push_back(std::move(s));
      }
      if (!dead) out.push_back(std::move(cand));
    }
  }
  return out;
}

}  // namespace regverify
