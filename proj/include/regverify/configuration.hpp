#pragma once

#include <cstddef>
#include <cstdint>
#include <functional>
#include <vector>

#include "regverify/protocol.hpp"

namespace regverify {

struct Location {
  StateId state = 0;
  int round = 0;

  bool operator==(const Location&) const = default;
  auto operator<=>(const Location&) const = default;
};

/// Set of populated locations plus register contents. Roundless
/// configurations use round 0 only. Round-based configurations keep
/// rounds up to the last non-default one; missing rounds are empty with
/// every register at d0.
class AbstractConfiguration {
 public:
  AbstractConfiguration() = default;
  explicit AbstractConfiguration(int register_count) : register_count_(register_count) {}

  int register_count() const { return register_count_; }
  int rounds() const { return static_cast<int>(populated_.size()); }

  bool has(Location l) const;
  bool has(StateId q) const { return has(Location{q, 0}); }
  void set(Location l, bool value);
  SymbolId symbol(int round, RegisterId reg) const;
  void set_symbol(int round, RegisterId reg, SymbolId value);

  const StateSet& round_set(int round) const;
  bool empty() const;
  /// Highest round holding a populated location or a non-d0 register, -1 if none.
  int active_bound() const;

  void trim();

  bool operator==(const AbstractConfiguration& o) const;
  std::size_t hash() const;

 private:
  void ensure_round(int round);

  int register_count_ = 1;
  std::vector<StateSet> populated_;
  std::vector<SymbolId> registers_;
};

/// Multiset of locations plus register contents.
class ConcreteConfiguration {
 public:
  ConcreteConfiguration() = default;
  explicit ConcreteConfiguration(int register_count) : register_count_(register_count) {}

  int register_count() const { return register_count_; }
  int rounds() const { return static_cast<int>(counts_.size()); }

  std::uint32_t count(Location l) const;
  void add(Location l, std::uint32_t n = 1);
  void remove(Location l);
  SymbolId symbol(int round, RegisterId reg) const;
  void set_symbol(int round, RegisterId reg, SymbolId value);
  std::uint64_t total() const;
  std::vector<Location> support() const;

  void trim();
  bool operator==(const ConcreteConfiguration& o) const;

 private:
  void ensure_round(int round);

  int register_count_ = 1;
  std::vector<std::vector<std::uint32_t>> counts_;
  std::vector<SymbolId> registers_;
};

struct Move {
  TransitionId transition = 0;
  int round = 0;
  bool deserting = false;

  bool operator==(const Move&) const = default;
};

struct Execution {
  AbstractConfiguration start;
  std::vector<Move> steps;
};

struct ConcreteExecution {
  ConcreteConfiguration start;
  std::vector<Move> steps;
};

AbstractConfiguration project(const ConcreteConfiguration& c);

}  // namespace regverify

template <>
struct std::hash<regverify::AbstractConfiguration> {
  std::size_t operator()(const regverify::AbstractConfiguration& c) const { return c.hash(); }
};
