#pragma once

#include <string>
#include <string_view>
#include <variant>

#include "regverify/configuration.hpp"
#include "regverify/protocol.hpp"

namespace regverify {

// Witness trace text:
//   start abstract q0 B | 1=c
//   q0 read(1, d0) B keep
// Round-based locations and registers carry "@round"; round-based steps
// start with the move's round. Concrete headers give counts as "q0*2".

std::string write_trace(const Protocol& p, const Execution& e);
std::string write_trace(const Protocol& p, const ConcreteExecution& e);

using Trace = std::variant<Execution, ConcreteExecution>;
Trace parse_trace(const Protocol& p, std::string_view text);

}  // namespace regverify
