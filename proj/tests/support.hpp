#pragma once

// Independent oracles used by the unit and acceptance tests.

#include <cstdint>
#include <set>
#include <string>
#include <vector>

#include "rollup/transitions.hpp"

namespace oracle {

struct BruteForce {
    std::set<std::string> states;             // canonical encodings
    std::vector<std::uint64_t> sequences;     // event sequences of each length
    std::size_t compaction_checks = 0;        // rollup steps checked literally
    std::size_t compaction_failures = 0;
};

/// Depth-first enumeration of every event sequence of length <= max_steps,
/// built from its own parameter pools and the guard functions. Every
/// rollup_process step is also run through `queue_constraints_hold`.
BruteForce enumerate(const rollup::ScopeConfig& scope, const rollup::VariantConfig& v, std::size_t max_steps);

/// The four forced-queue constraints of a rollup step, checked one by one:
/// no finalized tx remains, surviving inputs move strictly closer to the
/// head, relative order is kept, nothing new appears.
bool queue_constraints_hold(const std::vector<rollup::ForcedEvent>& before,
                            const std::vector<rollup::ForcedEvent>& after, const rollup::Block& diff);

/// Every duplicate-free block over {0..n-1} with 1..max_len inputs.
std::vector<rollup::Block> all_blocks(std::size_t n, std::size_t max_len);

} // namespace oracle
