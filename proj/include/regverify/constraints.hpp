#pragma once

#include <compare>
#include <cstdint>
#include <functional>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regverify/configuration.hpp"
#include "regverify/protocol.hpp"

namespace regverify {

/// Boolean formula over atoms of type A.
template <class A>
struct Expr {
  enum class Op { True, False, Atom, Not, And, Or };

  Op op = Op::True;
  A atom{};
  std::vector<Expr> args;

  static Expr constant(bool b) { return Expr{b ? Op::True : Op::False, A{}, {}}; }
  static Expr of(A a) { return Expr{Op::Atom, std::move(a), {}}; }
  static Expr negate(Expr e) { return Expr{Op::Not, A{}, {std::move(e)}}; }
  static Expr conj(std::vector<Expr> xs) { return Expr{Op::And, A{}, std::move(xs)}; }
  static Expr disj(std::vector<Expr> xs) { return Expr{Op::Or, A{}, std::move(xs)}; }

  bool operator==(const Expr&) const = default;
};

template <class A, class F>
bool evaluate(const Expr<A>& e, F&& atom_value) {
  using Op = typename Expr<A>::Op;
  switch (e.op) {
    case Op::True: return true;
    case Op::False: return false;
    case Op::Atom: return atom_value(e.atom);
    case Op::Not: return !evaluate(e.args[0], atom_value);
    case Op::And:
      for (const auto& x : e.args)
        if (!evaluate(x, atom_value)) return false;
      return true;
    case Op::Or:
      for (const auto& x : e.args)
        if (evaluate(x, atom_value)) return true;
      return false;
  }
  return false;
}

template <class A, class F>
void for_each_atom(const Expr<A>& e, F&& f) {
  if (e.op == Expr<A>::Op::Atom) f(e.atom);
  for (const auto& x : e.args) for_each_atom(x, f);
}

/// Replace atoms: `f` returns 0 (false), 1 (true) or -1 (keep). Folds constants.
template <class A, class F>
Expr<A> substitute(const Expr<A>& e, F&& f) {
  using E = Expr<A>;
  using Op = typename E::Op;
  switch (e.op) {
    case Op::True:
    case Op::False:
      return e;
    case Op::Atom: {
      int v = f(e.atom);
      return v < 0 ? e : E::constant(v == 1);
    }
    case Op::Not: {
      E x = substitute(e.args[0], f);
      if (x.op == Op::True) return E::constant(false);
      if (x.op == Op::False) return E::constant(true);
      if (x.op == Op::Not) return x.args[0];
      return E::negate(std::move(x));
    }
    case Op::And:
    case Op::Or: {
      bool is_and = e.op == Op::And;
      std::vector<E> kept;
      for (const auto& a : e.args) {
        E x = substitute(a, f);
        if (x.op == (is_and ? Op::False : Op::True)) return E::constant(!is_and);
        if (x.op == (is_and ? Op::True : Op::False)) continue;
        if (x.op == e.op) {
          for (auto& y : x.args) kept.push_back(std::move(y));
        } else {
          kept.push_back(std::move(x));
        }
      }
      if (kept.empty()) return E::constant(is_and);
      if (kept.size() == 1) return std::move(kept[0]);
      return is_and ? E::conj(std::move(kept)) : E::disj(std::move(kept));
    }
  }
  return e;
}

// ---------------------------------------------------------------- roundless

struct RoundlessAtom {
  enum class Kind { Pop, Reg };
  Kind kind = Kind::Pop;
  StateId state = 0;
  RegisterId reg = 0;
  SymbolId symbol = 0;

  auto operator<=>(const RoundlessAtom&) const = default;
};

using RoundlessConstraint = Expr<RoundlessAtom>;

struct ConstraintOptions {
  int max_constant = 64;
};

RoundlessConstraint parse_roundless_constraint(const Protocol& p, std::string_view text);
std::string format_constraint(const Protocol& p, const RoundlessConstraint& phi);
bool eval_roundless(const AbstractConfiguration& c, const RoundlessConstraint& phi);

RoundlessConstraint cover_constraint(StateId target);
RoundlessConstraint target_constraint(const Protocol& p, StateId target);

struct ClauseDecomposition {
  StateSet q_plus;
  StateSet q_minus;
  std::vector<std::vector<bool>> d_ok;  // [register][symbol]
  bool satisfiable = true;

  bool accepts(const AbstractConfiguration& c) const;
};

std::vector<ClauseDecomposition> dnf_clauses(const Protocol& p, const RoundlessConstraint& phi);
bool is_dnf(const RoundlessConstraint& phi);
/// Distributes to DNF; throws CapExceeded above `max_clauses`.
RoundlessConstraint to_dnf(const RoundlessConstraint& phi, std::size_t max_clauses = 4096);

// -------------------------------------------------------------- round-based

struct Term {
  bool variable = false;
  int offset = 0;

  auto operator<=>(const Term&) const = default;
};

struct RoundAtom {
  enum class Kind { Pop, Reg };
  Kind kind = Kind::Pop;
  StateId state = 0;
  RegisterId reg = 0;
  Term term;
  SymbolId symbol = 0;

  auto operator<=>(const RoundAtom&) const = default;
};

using Proposition = Expr<RoundAtom>;

struct Apc {
  enum class Kind { Closed, Exists, Forall };
  Kind kind = Kind::Closed;
  Proposition body;

  bool operator==(const Apc&) const = default;
};

/// Boolean combination of atomic presence constraints, referenced by index.
struct RoundConstraint {
  std::vector<Apc> apcs;
  Expr<std::size_t> formula;
};

RoundConstraint parse_round_constraint(const Protocol& p, std::string_view text, ConstraintOptions opts = {});
std::string format_constraint(const Protocol& p, const RoundConstraint& psi);
std::string format_proposition(const Protocol& p, const Proposition& prop);

int max_constant(const RoundConstraint& psi);
int max_offset(const Proposition& prop);

bool eval_atom(const AbstractConfiguration& c, const RoundAtom& a, int k);
bool eval_proposition(const AbstractConfiguration& c, const Proposition& prop, int k);
bool eval_roundbased(const AbstractConfiguration& c, const RoundConstraint& psi);
bool eval_roundbased(const AbstractConfiguration& c, const RoundConstraint& psi, int active_bound);

/// Value of a closed atom on the all-empty tail.
bool tail_value(const RoundAtom& a);

struct ClosedLiteral {
  RoundAtom atom;  // constant term
  bool positive = true;

  auto operator<=>(const ClosedLiteral&) const = default;
};

struct ApcCandidate {
  std::vector<ClosedLiteral> closed;
  std::vector<Proposition> existential;
  std::vector<Proposition> universal;
};

std::vector<ApcCandidate> decompose_apcs(const RoundConstraint& psi);

/// Prime implicants of a function of `n` variables given by truth table
/// evaluation, ordered by size then lexicographically. Each implicant is a
/// list of (variable, value) pairs.
using Implicant = std::vector<std::pair<int, bool>>;
std::vector<Implicant> prime_implicants(int n, const std::function<bool(std::uint64_t)>& f);

}  // namespace regverify
