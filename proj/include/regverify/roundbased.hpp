#pragma once

#include <cstddef>
#include <cstdint>
#include <string>
#include <vector>

#include "regverify/constraints.hpp"
#include "regverify/footprint.hpp"
#include "regverify/protocol.hpp"
#include "regverify/verdict.hpp"

namespace regverify {

/// Default bound on the moves a bridge adds to its carried footprint: (v+1)|Q|(2v+5).
std::size_t default_step_cap(const Protocol& p);

/// What later rounds can observe of a footprint on [k-v+1, k]: the register
/// contents of the window over time, when processes first appear on round-k
/// states that can increment, and when processes reach round k+1.
struct Observation {
  std::size_t width = 0;           // registers per timeline entry
  std::vector<SymbolId> timeline;  // entries of `width` symbols, consecutive ones differ
  std::vector<bool> pending;       // per entry: written symbol still waits to be read
  std::vector<int> first_seen;     // per increment source state: entry index or -1
  std::vector<int> arrival;        // per state: entry index of the first arrival on round k+1, or -1

  std::size_t entries() const { return width ? timeline.size() / width : 0; }
  std::string key() const;
};

/// True when every continuation available after `weaker` is also available
/// after `stronger`: the timeline of `weaker` embeds into that of `stronger`
/// without skipping pending entries, with processes appearing no later.
bool dominates(const Observation& stronger, const Observation& weaker);

/// A footprint on [k-v, k] extending a carried footprint on [k-v, k-1].
struct Bridge {
  Footprint bridge;
  /// Projection on [k-v+1, k].
  Footprint tau;
  /// Per step of `tau`: a write whose symbol still waits to be read.
  std::vector<bool> pending;
  /// The bridge increments a process out of round k.
  bool top_increment = false;
  Observation observation;
};

struct BridgeOptions {
  std::size_t step_cap = 0;  // 0 selects default_step_cap
  bool normal_form = true;
  std::uint64_t budget = 0;  // 0 means unlimited
  std::uint64_t* work = nullptr;
  /// States whose final round-k presence distinguishes bridges; all when null.
  const StateSet* observed = nullptr;
};

/// Thrown when the work counter passes the budget.
struct BudgetExhausted {};

/// Bridges over `tau` (a footprint on [k-v, k-1]) whose round k starts empty
/// with d0 registers, or with `initial` x {0} when k = 0. With normal-form
/// pruning, one bridge is returned per observation and final round-k content.
std::vector<Bridge> enumerate_bridges(const Protocol& p, const Footprint& tau, const std::vector<bool>& pending,
                                      const StateSet& initial, int k, const BridgeOptions& opts);

/// Every bridge over `tau` adding at most `step_cap` moves.
std::vector<Footprint> enumerate_bridge_footprints(const Protocol& p, const Footprint& tau, const StateSet& initial,
                                                   int k, std::size_t step_cap);

struct RoundBasedOptions {
  std::uint64_t budget = 200000;
  std::size_t step_cap = 0;  // 0 selects default_step_cap
  /// Root branches (initial set and constraint decomposition) searched
  /// concurrently with separate memo tables; each gets the full budget.
  unsigned threads = 1;
};

Verdict solve_prp_roundbased(const Protocol& p, const RoundConstraint& psi, const RoundBasedOptions& opts = {});

}  // namespace regverify
