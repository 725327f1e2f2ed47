#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "rollup/properties.hpp"
#include "rollup/scenarios.hpp"

namespace rollup {

/// Release obligation opened by the upgrade_init of the ongoing announcement.
struct UpgradeWatch {
    enum class Phase : std::uint8_t { open, held, broken };

    UpgradeAnnouncement announcement;
    InputSet blacklist_at_start;
    Phase phase = Phase::open;

    friend bool operator==(const UpgradeWatch&, const UpgradeWatch&) = default;
};

/// Path summary sufficient to decide the monitored properties from here on.
/// Fields not needed by any monitored property stay at their defaults.
struct History {
    InputSet ever_queued;
    InputSet obligations;
    std::vector<Block> justified; // sorted
    bool censored_seen = false;
    std::optional<UpgradeWatch> watch;
    InputSet goal_pending;
    bool goal_reached = false;
    /// Liveness properties whose obligation has already failed.
    std::uint32_t latched = 0;

    friend bool operator==(const History&, const History&) = default;
};

[[nodiscard]] constexpr std::uint32_t bit(PropertyId id)
{
    return 1U << static_cast<unsigned>(id);
}

/// Incremental checker for a set of properties and optionally one scenario
/// goal. Violation results are bitmasks over PropertyId.
class Monitor {
public:
    Monitor(std::vector<PropertyId> properties, std::optional<ScenarioId> goal = std::nullopt);

    [[nodiscard]] const std::vector<PropertyId>& properties() const { return properties_; }
    [[nodiscard]] std::uint32_t mask() const { return mask_; }
    [[nodiscard]] std::optional<ScenarioId> goal() const { return goal_; }

    [[nodiscard]] History start(const L1State& s) const;

    /// Safety properties already failing at the initial state.
    [[nodiscard]] std::uint32_t initial_violations(const History& h, const L1State& s) const;

    struct StepResult {
        History history;
        std::uint32_t violated = 0; // safety properties failing on this step or at `post`
    };
    [[nodiscard]] StepResult advance(const History& h, const L1State& pre, const Event& e,
                                     const L1State& post) const;

    /// Liveness properties violated by staying at `s` forever.
    [[nodiscard]] std::uint32_t closure_violations(const History& h, const L1State& s) const;

    void append_key(std::string& out, const History& h) const;
    [[nodiscard]] History decode(std::string_view bytes, std::size_t& pos) const;

private:
    [[nodiscard]] bool watches(PropertyId id) const { return (mask_ & bit(id)) != 0; }
    void observe(History& h, const L1State& s) const;
    [[nodiscard]] std::uint32_t state_violations(const History& h, const L1State& s) const;

    std::vector<PropertyId> properties_;
    std::uint32_t mask_ = 0;
    std::optional<ScenarioId> goal_;
    bool need_queued_ = false;
};

} // namespace rollup
