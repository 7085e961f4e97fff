#pragma once

#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <unordered_map>
#include <vector>

#include "regverify/constraints.hpp"
#include "regverify/protocol.hpp"
#include "regverify/semantics.hpp"
#include "regverify/verdict.hpp"

namespace regverify {

struct OracleCaps {
  std::size_t max_states = 12;
  std::size_t max_valuations = std::size_t{1} << 16;
  std::size_t max_members = 4'000'000;
};

/// Abstract reach set with BFS parent links.
struct ReachSet {
  std::vector<AbstractConfiguration> members;
  std::vector<std::int64_t> parent;  // -1 for initial configurations
  std::vector<Move> via;
  std::unordered_map<AbstractConfiguration, std::size_t> index;

  bool contains(const AbstractConfiguration& c) const { return index.count(c) > 0; }
  Execution witness(std::size_t member) const;
};

ReachSet reach_roundless(const Protocol& p, const OracleCaps& caps = {});
ReachSet reach_roundbased_capped(const Protocol& p, int max_round, const OracleCaps& caps = {});

/// BFS that stops at the first member satisfying `goal`; returns its index or -1.
std::int64_t explore(const Protocol& p, std::optional<RoundWindow> window, const OracleCaps& caps, ReachSet& out,
                     const std::function<bool(const AbstractConfiguration&)>& goal);

Verdict oracle_prp(const Protocol& p, const RoundlessConstraint& phi, const OracleCaps& caps = {});
Verdict oracle_prp(const Protocol& p, const RoundConstraint& psi, int max_round, const OracleCaps& caps = {});

/// Heuristic round cap (v+1)(M+2)+2 for validating round-based answers.
int default_round_cap(const Protocol& p, const RoundConstraint& psi);

/// One canonical line per member, sorted, for diffing.
std::string export_reach(const Protocol& p, const ReachSet& reach);

}  // namespace regverify
