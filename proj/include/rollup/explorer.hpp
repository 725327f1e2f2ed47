#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "rollup/monitor.hpp"

namespace rollup {

enum class Mode : std::uint8_t { check, run };

/// How the state space is walked.
/// full: every event of the transition system is a step.
/// claims_on_demand: commitments and proofs are not stored; a rollup is one
/// move of three steps (receive_commitment, receive_proof, rollup_process on
/// the finalized state). Exact for properties that do not read claims.
enum class Strategy : std::uint8_t { full, claims_on_demand };

[[nodiscard]] std::string_view to_string(Strategy s);

struct CheckRequest {
    VariantConfig variant;
    ScopeConfig scope;
    std::string target;
    Mode mode = Mode::check;
};

struct ExplorerOptions {
    std::size_t max_states = 40'000'000;
    /// Unset: claims_on_demand, with claim-reading properties checked on the
    /// strawman projection first.
    std::optional<Strategy> strategy;
};

struct ExploreStats {
    std::size_t states = 0;
    std::size_t transitions = 0;
    std::size_t deepest = 0;
    Strategy strategy = Strategy::full;
    bool projected = false;
};

struct CheckResult {
    PropertyVerdict verdict;
    ExploreStats stats;
};

/// Shortest counterexample for a catalog property (mode = check).
/// Throws config_error for unknown or inapplicable targets.
[[nodiscard]] CheckResult check(const CheckRequest& req, const ExplorerOptions& opts = {});

/// Shortest witness for a scenario goal (mode = run).
[[nodiscard]] CheckResult run(const CheckRequest& req, const ExplorerOptions& opts = {});

/// Dispatches on req.mode.
[[nodiscard]] CheckResult execute(const CheckRequest& req, const ExplorerOptions& opts = {});

/// Checks several properties with shared explorations; results in input order.
[[nodiscard]] std::vector<CheckResult> check_all(const VariantConfig& variant, const ScopeConfig& scope,
                                                 const std::vector<const PropertySpec*>& props,
                                                 const ExplorerOptions& opts = {});

/// Every state reachable within `max_steps` events, plus the number of event
/// sequences of each length 0..max_steps.
struct Reachability {
    std::vector<std::string> states; // sorted canonical encodings
    std::vector<std::uint64_t> sequences_by_length;
};

[[nodiscard]] Reachability reachable(const TransitionSystem& ts, std::size_t max_steps);

} // namespace rollup
