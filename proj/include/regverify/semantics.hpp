#pragma once

#include <optional>
#include <string>
#include <vector>

#include "regverify/configuration.hpp"
#include "regverify/protocol.hpp"

namespace regverify {

struct RoundWindow {
  int lo = 0;
  int hi = 0;
};

struct Successor {
  Move move;
  AbstractConfiguration config;
};

Location move_source(const Protocol& p, const Move& m);
Location move_destination(const Protocol& p, const Move& m);

/// Round of the register touched by a read or write move, -1 for inc.
int register_round(const Protocol& p, const Move& m);

AbstractConfiguration initial_configuration(const Protocol& p, const StateSet& support);
ConcreteConfiguration initial_concrete(const Protocol& p, const std::vector<std::pair<StateId, std::uint32_t>>& population);

/// Empty optional when the move cannot fire; `why` receives the reason.
std::optional<AbstractConfiguration> try_abstract_step(const Protocol& p, const AbstractConfiguration& c,
                                                       const Move& m, std::string* why = nullptr);
std::optional<ConcreteConfiguration> try_concrete_step(const Protocol& p, const ConcreteConfiguration& c,
                                                       const Move& m, std::string* why = nullptr);

AbstractConfiguration abstract_step(const Protocol& p, const AbstractConfiguration& c, const Move& m);
ConcreteConfiguration concrete_step(const Protocol& p, const ConcreteConfiguration& c, const Move& m);

/// All abstract successors. Round-based protocols need a window: only
/// moves whose effect stays within [lo, hi] are generated.
std::vector<Successor> abstract_successors(const Protocol& p, const AbstractConfiguration& c,
                                           std::optional<RoundWindow> window = std::nullopt);

AbstractConfiguration replay(const Protocol& p, const Execution& e);
ConcreteConfiguration replay(const Protocol& p, const ConcreteExecution& e);
std::vector<AbstractConfiguration> replay_all(const Protocol& p, const Execution& e);

ConcreteExecution copycat_extend(const Protocol& p, const ConcreteExecution& e, Location target);
ConcreteExecution abstract_to_concrete(const Protocol& p, const Execution& e);

std::string format_configuration(const Protocol& p, const AbstractConfiguration& c);
std::string format_configuration(const Protocol& p, const ConcreteConfiguration& c);

}  // namespace regverify
