#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "rollup/monitor.hpp"

namespace rollup {

struct FuzzConfig {
    std::uint64_t seed = 42;
    std::size_t num_traces = 10'000;
    std::size_t max_len = 8;
    VariantConfig variant;
    ScopeConfig scope;

    /// Throws config_error when num_traces is zero or max_len exceeds the step cap.
    void validate() const;
};

struct FuzzViolation {
    std::string property;
    std::size_t trace_number = 0;    // which generated trace first violated it
    std::size_t original_length = 0; // events up to the violation, before shrinking
    std::size_t violation_index = 0; // in the shrunk trace
    Trace shrunk;
};

struct FuzzReport {
    std::size_t traces_run = 0;
    std::size_t steps_run = 0;
    std::vector<std::string> properties; // safety properties that were checked
    std::vector<FuzzViolation> violations;
};

/// Seed for trace `n` of a run; traces can be generated in any order.
[[nodiscard]] std::uint64_t trace_seed(std::uint64_t seed, std::size_t n);

/// One random walk of `len` events, uniform over enabled events.
[[nodiscard]] Trace random_trace(const TransitionSystem& ts, std::uint64_t seed, std::size_t len);

/// Random traces checked against the safety properties among `props`
/// (liveness ones are skipped). The first violation of each property is
/// shrunk and reported.
[[nodiscard]] FuzzReport fuzz(const FuzzConfig& cfg, const std::vector<const PropertySpec*>& props);

/// Smallest violating trace reachable from `events` by deleting events,
/// lowering parameters and merging input ids, iterated to a fixed point.
/// `events` must replay from the initial state and violate `p`.
[[nodiscard]] Trace shrink(const PropertySpec& p, std::vector<Event> events, const VariantConfig& variant,
                           const ScopeConfig& scope);

} // namespace rollup
