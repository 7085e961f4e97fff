#pragma once

#include <cstddef>
#include <optional>
#include <utility>
#include <vector>

#include "regverify/constraints.hpp"
#include "regverify/protocol.hpp"
#include "regverify/verdict.hpp"

namespace regverify {

/// Length bound for witness search: 4|Q|, raised to 4|Q|-4+r when r > 4.
std::size_t bounded_search_limit(const Protocol& p);

Verdict solve_prp_bounded(const Protocol& p, const RoundlessConstraint& phi,
                          std::optional<std::size_t> limit = std::nullopt);

/// Coverable states of an uninitialized protocol.
StateSet saturate_uninitialized(const Protocol& p);
Verdict solve_cover_uninitialized(const Protocol& p, StateId target);

using FirstWriteOrder = std::vector<RegisterId>;

/// States coverable along executions that first write registers in `order`.
StateSet saturate_with_order(const Protocol& p, const FirstWriteOrder& order);
Verdict solve_cover_fixed_r(const Protocol& p, StateId target);

std::pair<Protocol, StateId> reduce_cover_to_target(const Protocol& p, StateId error);
Protocol reduce_initialized_to_uninit_r1(const Protocol& p);

StateSet compute_cov_set(const Protocol& p);
StateSet compute_cocov_set(const Protocol& p, const ClauseDecomposition& clause);

Verdict solve_dnfprp_one_register(const Protocol& p, const RoundlessConstraint& phi);

}  // namespace regverify
