#pragma once

#include <string_view>
#include <vector>

#include "rollup/temporal.hpp"

namespace rollup {

enum class PropertyKind : std::uint8_t { safety, liveness };

enum class PropertyId : std::uint8_t {
    srp1,
    srp2,
    srp3,
    srp4,
    fqp1,
    fqp2,
    fqp2_queue,
    fqp3,
    fqp4,
    fqp5,
    fqp6,
    bp1,
    bp2,
    bp3,
    bp4,
    bp5,
    up1,
    up2,
    up3,
    up4,
    freeze,
};

inline constexpr std::size_t kPropertyCount = 21;

struct PropertySpec {
    PropertyId id;
    std::string_view name;
    std::string_view title;
    PropertyKind kind;
    /// Reads the commitment or proof containers (or claim-carrying events).
    bool reads_claims;
    bool (*applicable)(const VariantConfig&);
};

[[nodiscard]] const std::vector<PropertySpec>& catalog();
[[nodiscard]] const PropertySpec& property(PropertyId id);

/// Case-sensitive lookup by catalog name; "FQP2prime" is accepted for FQP2'.
[[nodiscard]] const PropertySpec* find_property(std::string_view name);

[[nodiscard]] inline bool applies_to(const PropertySpec& p, const VariantConfig& v)
{
    return p.applicable(v);
}

[[nodiscard]] std::vector<const PropertySpec*> applicable_properties(const VariantConfig& v);

/// The formula whose truth at every position makes up the property (the
/// body of the outer `always`). SRP1 is structural and has a constant-true body.
[[nodiscard]] Formula property_body(const PropertySpec& p, const ScopeConfig& scope);

/// always(property_body(p, scope)).
[[nodiscard]] Formula property_formula(const PropertySpec& p, const ScopeConfig& scope);

/// Evaluates the property on one trace. Violated carries the first position
/// where the body fails and the trace itself. Liveness properties cannot be
/// refuted by plain traces and yield NoCounterexampleWithinBound there.
[[nodiscard]] PropertyVerdict evaluate(const PropertySpec& p, const Trace& t, const ScopeConfig& scope);

/// Properties whose body is one step predicate (SRP2, SRP4, FQP1-5, FQP2',
/// BP1, UP3, UP4) or one state predicate (BP3-5, FREEZE).
[[nodiscard]] bool is_step_predicate(PropertyId id);
[[nodiscard]] bool is_state_predicate(PropertyId id);
[[nodiscard]] bool holds_on_step(PropertyId id, const L1State& pre, const Event& e, const L1State& post);
[[nodiscard]] bool holds_at_state(PropertyId id, const L1State& s);

/// A commitment built on the current finalized state and a proof, both with diff `b`.
[[nodiscard]] bool justifies(const L1State& s, const Block& b);

// State helpers shared with monitors and scenarios.
[[nodiscard]] InputSet queued_inputs(const L1State& s);
[[nodiscard]] bool has_queued_policy(const L1State& s);

} // namespace rollup
