#pragma once

#include <algorithm>
#include <array>
#include <bit>
#include <compare>
#include <cstddef>
#include <cstdint>
#include <initializer_list>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <variant>
#include <vector>

#include <boost/container/flat_set.hpp>

namespace rollup {

/// Raised when an operation is called outside its documented precondition.
class precondition_violation : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Raised for scope/variant combinations that cannot be built.
class config_error : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

using InputId = std::uint8_t;

inline constexpr std::size_t kMaxInputs = 16;
inline constexpr std::size_t kMaxBlockSize = 4;
inline constexpr std::size_t kMaxStepsCap = 20;

/// A set of inputs drawn from the scope's pool, stored as a bitmask.
/// Ordered by mask value; rendered as the sorted list of member ids.
class InputSet {
public:
    constexpr InputSet() = default;
    InputSet(std::initializer_list<InputId> ids)
    {
        for (auto id : ids)
            insert(id);
    }

    static constexpr InputSet from_mask(std::uint32_t mask)
    {
        InputSet s;
        s.mask_ = mask;
        return s;
    }

    /// Every subset of {0, .., n-1}, in mask order.
    static std::vector<InputSet> all_subsets(std::size_t n);

    [[nodiscard]] constexpr std::uint32_t mask() const { return mask_; }
    [[nodiscard]] constexpr bool empty() const { return mask_ == 0; }
    [[nodiscard]] constexpr std::size_t size() const { return static_cast<std::size_t>(std::popcount(mask_)); }
    [[nodiscard]] constexpr bool contains(InputId id) const { return (mask_ >> id) & 1U; }
    [[nodiscard]] constexpr bool is_subset_of(InputSet other) const { return (mask_ & ~other.mask_) == 0; }
    [[nodiscard]] constexpr bool intersects(InputSet other) const { return (mask_ & other.mask_) != 0; }

    void insert(InputId id)
    {
        if (id >= kMaxInputs)
            throw precondition_violation("input id out of range");
        mask_ |= (1U << id);
    }
    void erase(InputId id) { mask_ &= ~(1U << id); }

    [[nodiscard]] std::vector<InputId> elements() const;

    friend constexpr InputSet operator|(InputSet a, InputSet b) { return from_mask(a.mask_ | b.mask_); }
    friend constexpr InputSet operator&(InputSet a, InputSet b) { return from_mask(a.mask_ & b.mask_); }
    friend constexpr InputSet operator-(InputSet a, InputSet b) { return from_mask(a.mask_ & ~b.mask_); }
    InputSet& operator|=(InputSet o)
    {
        mask_ |= o.mask_;
        return *this;
    }

    friend constexpr auto operator<=>(InputSet, InputSet) = default;

private:
    std::uint32_t mask_ = 0;
};

/// An ordered, duplicate-free sequence of inputs. Stored inline.
class Block {
public:
    Block() = default;
    Block(std::initializer_list<InputId> ids);
    explicit Block(std::span<const InputId> ids);

    [[nodiscard]] std::span<const InputId> inputs() const { return {inputs_.data(), size_}; }
    [[nodiscard]] std::size_t size() const { return size_; }
    [[nodiscard]] bool empty() const { return size_ == 0; }
    [[nodiscard]] bool contains(InputId id) const;
    [[nodiscard]] InputSet input_set() const;

    friend bool operator==(const Block& a, const Block& b)
    {
        return std::ranges::equal(a.inputs(), b.inputs());
    }
    friend std::strong_ordering operator<=>(const Block& a, const Block& b)
    {
        return std::lexicographical_compare_three_way(a.inputs_.begin(), a.inputs_.begin() + a.size_,
                                                      b.inputs_.begin(), b.inputs_.begin() + b.size_);
    }

private:
    std::array<InputId, kMaxBlockSize> inputs_{};
    std::uint8_t size_ = 0;
};

using BlockSeq = std::vector<Block>;

/// Payload shared by commitments and proofs: a base state plus one new block.
struct Claim {
    BlockSeq state;
    Block diff;

    friend bool operator==(const Claim&, const Claim&) = default;
    friend auto operator<=>(const Claim&, const Claim&) = default;
};

struct ForcedInput {
    InputId tx = 0;

    friend bool operator==(const ForcedInput&, const ForcedInput&) = default;
    friend auto operator<=>(const ForcedInput&, const ForcedInput&) = default;
};

struct BlacklistPolicy {
    InputSet predicate;

    friend bool operator==(const BlacklistPolicy&, const BlacklistPolicy&) = default;
    friend auto operator<=>(const BlacklistPolicy&, const BlacklistPolicy&) = default;
};

using ForcedEvent = std::variant<ForcedInput, BlacklistPolicy>;

struct UpgradeAnnouncement {
    BlacklistPolicy policy;

    friend bool operator==(const UpgradeAnnouncement&, const UpgradeAnnouncement&) = default;
    friend auto operator<=>(const UpgradeAnnouncement&, const UpgradeAnnouncement&) = default;
};

using ClaimSet = boost::container::flat_set<Claim>;
using AnnouncementSet = boost::container::flat_set<UpgradeAnnouncement>;

/// One snapshot of the rollup's L1-visible state.
struct L1State {
    BlockSeq finalized_state;
    ClaimSet commitments;
    ClaimSet proofs;
    std::vector<ForcedEvent> forced_queue;
    InputSet blacklist;
    std::optional<UpgradeAnnouncement> ongoing_upgrade;
    /// Announcements whose timeout has fired.
    AnnouncementSet timed_out;

    friend bool operator==(const L1State&, const L1State&) = default;
};

struct ScopeConfig {
    std::size_t max_inputs = 3;
    std::size_t max_block_size = 2;
    std::size_t max_steps = 8;
    std::size_t max_pending_claims = 4;

    /// Throws config_error when a bound is zero or above its hard cap.
    void validate() const;

    friend bool operator==(const ScopeConfig&, const ScopeConfig&) = default;
};

enum class Flaw : std::uint8_t { none, on_the_spot_blacklist, timeout_only_upgrade };

struct VariantConfig {
    bool forced_queue_enabled = false;
    bool blacklist_via_queue = false;
    bool upgradeability = false;
    Flaw flaw = Flaw::none;
    /// Whether update_blacklist may fire while an upgrade is ongoing.
    bool update_blacklist_during_upgrade = true;

    void validate() const;

    /// True when some event can make the blacklist nonempty.
    [[nodiscard]] bool has_blacklist() const
    {
        return blacklist_via_queue || upgradeability || flaw == Flaw::on_the_spot_blacklist;
    }

    friend bool operator==(const VariantConfig&, const VariantConfig&) = default;
};

/// The named models: strawman, forced, blacklist, upgrade, upgrade-blacklist,
/// naive-blacklist, naive-upgrade.
[[nodiscard]] std::optional<VariantConfig> variant_by_name(std::string_view name);
[[nodiscard]] const std::vector<std::string>& variant_names();
[[nodiscard]] std::string variant_name(const VariantConfig& v);

[[nodiscard]] bool has_duplicates(std::span<const Block> seq);
[[nodiscard]] bool is_prefix(std::span<const Block> prefix, std::span<const Block> seq);
[[nodiscard]] bool contains_block(std::span<const Block> seq, const Block& b);

/// Claim invariants: no duplicate blocks in state, diff not in state.
[[nodiscard]] bool is_well_formed(const Claim& c);

[[nodiscard]] InputSet derived_all_finalized_inputs(const L1State& s);

/// Inputs of the blocks appended to `prev.finalized_state` in `next`.
/// Throws precondition_violation if prev's finalized state is not a prefix.
[[nodiscard]] InputSet derived_new_finalized_inputs(const L1State& prev, const L1State& next);

/// Human-readable list of violated L1State invariants; empty when valid.
[[nodiscard]] std::vector<std::string> invariant_violations(const L1State& s, const ScopeConfig& scope);

[[nodiscard]] inline bool is_valid(const L1State& s, const ScopeConfig& scope)
{
    return invariant_violations(s, scope).empty();
}

/// The tx carried by the queue head, as a set (empty if the queue is empty or
/// the head is a policy). Mirrors relational `forced_queue.first.tx`.
[[nodiscard]] InputSet head_tx(std::span<const ForcedEvent> queue);

/// Position of `f` in the queue, if present.
[[nodiscard]] std::optional<std::size_t> index_of(std::span<const ForcedEvent> queue, const ForcedEvent& f);

[[nodiscard]] std::string to_string(InputSet s);
[[nodiscard]] std::string to_string(const Block& b);
[[nodiscard]] std::string to_string(std::span<const Block> seq);
[[nodiscard]] std::string to_string(const Claim& c);
[[nodiscard]] std::string to_string(const ForcedEvent& f);
[[nodiscard]] std::string to_string(const UpgradeAnnouncement& a);
[[nodiscard]] std::string to_string(const L1State& s);

} // namespace rollup
