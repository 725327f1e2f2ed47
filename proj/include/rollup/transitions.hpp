#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

#include "rollup/domain.hpp"

namespace rollup {

// Canonical order: events are enumerated kind-first in this order.
enum class EventKind : std::uint8_t {
    receive_commitment,
    receive_proof,
    rollup_process,
    receive_forced,
    update_blacklist,
    upgrade_init,
    upgrade_timeout,
    upgrade_deploy,
    admin_set_blacklist,
    stutter,
};

[[nodiscard]] std::string_view to_string(EventKind k);
[[nodiscard]] std::optional<EventKind> event_kind_by_name(std::string_view name);

struct RollupParams {
    Claim commitment;
    Claim proof;

    friend bool operator==(const RollupParams&, const RollupParams&) = default;
    friend auto operator<=>(const RollupParams&, const RollupParams&) = default;
};

using EventParams =
    std::variant<std::monostate, Claim, RollupParams, ForcedEvent, BlacklistPolicy, UpgradeAnnouncement, InputSet>;

/// One named, parameterized transition.
struct Event {
    EventKind kind = EventKind::stutter;
    EventParams params;

    static Event receive_commitment(Claim c) { return {EventKind::receive_commitment, std::move(c)}; }
    static Event receive_proof(Claim p) { return {EventKind::receive_proof, std::move(p)}; }
    static Event rollup_process(Claim c, Claim p)
    {
        return {EventKind::rollup_process, RollupParams{std::move(c), std::move(p)}};
    }
    static Event receive_forced(ForcedEvent f) { return {EventKind::receive_forced, f}; }
    static Event update_blacklist(BlacklistPolicy f) { return {EventKind::update_blacklist, f}; }
    static Event upgrade_init(UpgradeAnnouncement a) { return {EventKind::upgrade_init, a}; }
    static Event upgrade_timeout() { return {EventKind::upgrade_timeout, std::monostate{}}; }
    static Event upgrade_deploy() { return {EventKind::upgrade_deploy, std::monostate{}}; }
    static Event admin_set_blacklist(InputSet bl) { return {EventKind::admin_set_blacklist, bl}; }
    static Event stutter() { return {EventKind::stutter, std::monostate{}}; }

    friend bool operator==(const Event&, const Event&) = default;
    friend auto operator<=>(const Event&, const Event&) = default;
};

/// Throws precondition_violation when the params alternative does not match the kind.
void check_shape(const Event& e);

[[nodiscard]] std::string to_string(const Event& e);

/// The empty L1 state every exploration starts from.
[[nodiscard]] L1State initial_state();

// Guarded transitions. std::nullopt means the event is not enabled.
[[nodiscard]] std::optional<L1State> receive_commitment(const L1State& s, const Claim& c, const VariantConfig& v);
[[nodiscard]] std::optional<L1State> receive_proof(const L1State& s, const Claim& p, const VariantConfig& v);
[[nodiscard]] std::optional<L1State> rollup_process(const L1State& s, const Claim& c, const Claim& p,
                                                    const VariantConfig& v);
[[nodiscard]] std::optional<L1State> receive_forced(const L1State& s, const ForcedEvent& f, const VariantConfig& v);
[[nodiscard]] std::optional<L1State> update_blacklist(const L1State& s, const BlacklistPolicy& f,
                                                      const VariantConfig& v);
[[nodiscard]] std::optional<L1State> upgrade_init(const L1State& s, const UpgradeAnnouncement& a,
                                                  const VariantConfig& v);
[[nodiscard]] std::optional<L1State> upgrade_timeout(const L1State& s, const VariantConfig& v);
[[nodiscard]] std::optional<L1State> upgrade_deploy(const L1State& s, const VariantConfig& v);
[[nodiscard]] std::optional<L1State> admin_set_blacklist(const L1State& s, InputSet bl, const VariantConfig& v);

/// Dispatches on the event kind.
[[nodiscard]] std::optional<L1State> apply(const L1State& s, const Event& e, const VariantConfig& v);

/// The forced queue after finalizing `diff`: every ForcedInput whose tx is in
/// the diff is dropped, everything else keeps its relative order.
[[nodiscard]] std::vector<ForcedEvent> compact_queue(std::span<const ForcedEvent> queue, const Block& diff);

/// Head of the queue is a ForcedInput whose tx is blacklisted. No diff can
/// both include and exclude that tx, so finalization is impossible from here.
[[nodiscard]] bool is_frozen(const L1State& s);

struct Successor {
    Event event;
    L1State state;
};

/// Candidate parameter pools for one scope.
struct Universe {
    std::vector<Block> blocks;              // nonempty, duplicate-free, lexicographic
    std::vector<InputSet> subsets;          // all subsets of the input pool, mask order
    std::vector<ForcedEvent> forced_events; // ForcedInputs, then policies
    std::vector<UpgradeAnnouncement> announcements;

    Universe(const ScopeConfig& scope, const VariantConfig& variant);
};

/// The nondeterministic next-state relation of one model at one scope.
class TransitionSystem {
public:
    TransitionSystem(ScopeConfig scope, VariantConfig variant);

    [[nodiscard]] const ScopeConfig& scope() const { return scope_; }
    [[nodiscard]] const VariantConfig& variant() const { return variant_; }
    [[nodiscard]] const Universe& universe() const { return universe_; }

    /// Every enabled event and its successor, in canonical order. Stutter is
    /// always last, so the result is never empty.
    [[nodiscard]] std::vector<Successor> successors(const L1State& s) const;

    /// As successors(), optionally leaving out receive_commitment and
    /// receive_proof events.
    [[nodiscard]] std::vector<Successor> successors(const L1State& s, bool claim_receipts) const;

private:
    ScopeConfig scope_;
    VariantConfig variant_;
    Universe universe_;
};

[[nodiscard]] std::vector<Successor> enumerate_events(const L1State& s, const ScopeConfig& scope,
                                                      const VariantConfig& variant);

} // namespace rollup
