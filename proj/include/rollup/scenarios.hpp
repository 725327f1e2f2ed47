#pragma once

#include <string_view>
#include <vector>

#include "rollup/temporal.hpp"

namespace rollup {

enum class ScenarioId : std::uint8_t { finalize_one, freeze, double_blacklist_update };

/// A goal for `run`: some trace within bounds should satisfy `eventually(...)`.
struct ScenarioSpec {
    ScenarioId id;
    std::string_view name;
    std::string_view summary;
    bool (*applicable)(const VariantConfig&);
};

[[nodiscard]] const std::vector<ScenarioSpec>& scenarios();
[[nodiscard]] const ScenarioSpec* find_scenario(std::string_view name);

/// The goal formula, evaluated at position 0 of a witness.
[[nodiscard]] Formula scenario_goal(const ScenarioSpec& s, const ScopeConfig& scope);

/// Evaluates the goal on one trace: Holds (with the trace as witness and the
/// last position as index) when the trace satisfies it, otherwise
/// NoCounterexampleWithinBound.
[[nodiscard]] PropertyVerdict evaluate(const ScenarioSpec& s, const Trace& t, const ScopeConfig& scope);

} // namespace rollup
