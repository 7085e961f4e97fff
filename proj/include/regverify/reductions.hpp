#pragma once

#include <array>
#include <cstdint>
#include <random>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include "regverify/protocol.hpp"

namespace regverify {

/// 3-CNF; literal +j / -j for variable j in [1, variables].
struct CnfFormula {
  int variables = 0;
  std::vector<std::array<int, 3>> clauses;
};

bool cnf_satisfiable(const CnfFormula& f);
std::string format_cnf(const CnfFormula& f);
CnfFormula random_cnf(std::mt19937_64& rng, int variables, int clauses);

/// COVER instance; registers 2j-1 and 2j stand for x_j and its negation.
std::pair<Protocol, StateId> sat_to_cover(const CnfFormula& f);
/// Uninitialized TARGET instance with one register per variable.
std::pair<Protocol, StateId> sat_to_uninit_target(const CnfFormula& f);

struct Gate {
  enum class Kind { Not, Or, And };
  Kind kind = Kind::Not;
  std::string in1;
  std::string in2;  // unused for Not
  std::string out;
};

struct Circuit {
  std::vector<std::pair<std::string, bool>> inputs;
  std::vector<Gate> gates;
  std::string output;
};

/// Lines: `input x true`, `gate g and a b`, `gate g not a`, `output g`.
Circuit parse_circuit(std::string_view text);
std::string format_circuit(const Circuit& c);
/// Gates in evaluation order; throws CyclicCircuit or UndefinedWire.
std::vector<Gate> topological_gates(const Circuit& c);
bool evaluate_circuit(const Circuit& c);
Circuit random_circuit(std::mt19937_64& rng, int inputs, int gates);

std::pair<Protocol, StateId> cvp_to_cover(const Circuit& c, bool desired);

struct NamedProtocol {
  std::string name;
  std::string source;
  Protocol protocol;
};

struct NamedConstraint {
  std::string name;
  std::string protocol;
  std::string source;
};

struct BuiltinSet {
  std::vector<NamedProtocol> protocols;
  std::vector<NamedConstraint> constraints;

  const Protocol& protocol(std::string_view name) const;
  const std::string& constraint(std::string_view name) const;
};

const BuiltinSet& builtin_examples();

}  // namespace regverify
