#pragma once

#include <bitset>
#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace regverify {

constexpr std::size_t kMaxStates = 256;
constexpr std::size_t kMaxSymbols = 255;

using StateId = std::uint32_t;
using SymbolId = std::uint8_t;
using RegisterId = std::uint32_t;
using TransitionId = std::uint32_t;
using StateSet = std::bitset<kMaxStates>;

constexpr SymbolId kInitialSymbol = 0;

enum class Flavor { Roundless, RoundBased };

enum class ActionKind { Read, Write, Increment };

struct Action {
  ActionKind kind = ActionKind::Read;
  int depth = 0;        // reads only; 0 for roundless
  RegisterId reg = 0;   // 0-based
  SymbolId symbol = 0;

  static Action read(RegisterId reg, SymbolId symbol, int depth = 0) {
    return {ActionKind::Read, depth, reg, symbol};
  }
  static Action write(RegisterId reg, SymbolId symbol) { return {ActionKind::Write, 0, reg, symbol}; }
  static Action increment() { return {ActionKind::Increment, 0, 0, 0}; }

  bool operator==(const Action&) const = default;
};

struct Transition {
  StateId source = 0;
  Action action;
  StateId destination = 0;

  bool operator==(const Transition&) const = default;
};

/// A register protocol. The alphabet's entry 0 is the initial symbol d0.
struct Protocol {
  Flavor flavor = Flavor::Roundless;
  std::vector<std::string> states;
  StateSet initial;
  int register_count = 1;
  std::vector<std::string> alphabet{"d0"};
  int visibility = 0;
  std::vector<Transition> transitions;

  std::size_t state_count() const { return states.size(); }
  std::size_t symbol_count() const { return alphabet.size(); }
  bool round_based() const { return flavor == Flavor::RoundBased; }

  std::optional<StateId> find_state(std::string_view name) const;
  std::optional<SymbolId> find_symbol(std::string_view name) const;
  StateId state_id(std::string_view name) const;    // throws Semantic
  SymbolId symbol_id(std::string_view name) const;  // throws Semantic

  /// |Q| + |D| + |Delta| + r, plus v for round-based protocols.
  std::size_t size() const;

  bool operator==(const Protocol&) const = default;
};

enum class FindingKind {
  UnknownState,
  UnknownSymbol,
  RegisterOutOfRange,
  DepthOutOfRange,
  WriteOfInitialSymbol,
  DuplicateState,
  DuplicateSymbol,
  EmptyAlphabet,
  BadRegisterCount,
  BadVisibility,
  IncrementInRoundless,
  DepthInRoundless,
  UnknownInitialState,
  TooManyStates,
  TooManySymbols,
};

struct Finding {
  FindingKind kind;
  std::string detail;
};

const char* finding_name(FindingKind kind);

Protocol parse_protocol(std::string_view text);
std::string serialize_protocol(const Protocol& p);
std::vector<Finding> validate(const Protocol& p);
bool is_uninitialized(const Protocol& p);

/// `read(1, d0)`, `read(-1, 1, b)`, `write(1, c)` or `inc`, with 1-based registers.
std::string format_action(const Protocol& p, const Action& a);
std::string format_transition(const Protocol& p, const Transition& t);

std::string format_state_set(const Protocol& p, const StateSet& s);

}  // namespace regverify
