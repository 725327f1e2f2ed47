#include "support.hpp"

#include <functional>

#include "rollup/encoding.hpp"

namespace oracle {

using namespace rollup;

namespace {

std::vector<ForcedEvent> forced_pool(std::size_t n, const VariantConfig& v)
{
    std::vector<ForcedEvent> out;
    for (std::size_t i = 0; i < n; ++i)
        out.emplace_back(ForcedInput{static_cast<InputId>(i)});
    if (v.blacklist_via_queue)
        for (std::uint32_t m = 0; m < (1U << n); ++m)
            out.emplace_back(BlacklistPolicy{InputSet::from_mask(m)});
    return out;
}

std::optional<std::size_t> position(const std::vector<ForcedEvent>& q, const ForcedEvent& f)
{
    for (std::size_t i = 0; i < q.size(); ++i)
        if (q[i] == f)
            return i;
    return std::nullopt;
}

} // namespace

std::vector<Block> all_blocks(std::size_t n, std::size_t max_len)
{
    std::vector<Block> out;
    std::vector<InputId> cur;
    std::function<void()> grow = [&] {
        if (!cur.empty())
            out.emplace_back(std::span<const InputId>(cur));
        if (cur.size() == max_len)
            return;
        for (std::size_t i = 0; i < n; ++i) {
            const auto id = static_cast<InputId>(i);
            if (std::find(cur.begin(), cur.end(), id) != cur.end())
                continue;
            cur.push_back(id);
            grow();
            cur.pop_back();
        }
    };
    grow();
    return out;
}

bool queue_constraints_hold(const std::vector<ForcedEvent>& before, const std::vector<ForcedEvent>& after,
                            const Block& diff)
{
    // 1. no (forced_queue'.elems.tx & diff.block_inputs.elems)
    for (const auto& f : after)
        if (const auto* in = std::get_if<ForcedInput>(&f); in && diff.contains(in->tx))
            return false;
    // 2. unprocessed queued inputs are still queued, strictly closer to the head
    for (const auto& f : before) {
        const auto* in = std::get_if<ForcedInput>(&f);
        if (in == nullptr || diff.contains(in->tx))
            continue;
        auto was = position(before, f);
        auto now = position(after, f);
        if (!now || !(*now < *was))
            return false;
    }
    // 3. elements present in both keep their relative order
    for (const auto& x : after)
        for (const auto& y : after) {
            auto bx = position(before, x);
            auto by = position(before, y);
            if (bx && by && *bx < *by && !(*position(after, x) < *position(after, y)))
                return false;
        }
    // 4. nothing that was not queued appears
    for (const auto& f : after)
        if (!position(before, f))
            return false;
    return true;
}

BruteForce enumerate(const ScopeConfig& scope, const VariantConfig& v, std::size_t max_steps)
{
    BruteForce out;
    out.sequences.assign(max_steps + 1, 0);
    const auto blocks = all_blocks(scope.max_inputs, scope.max_block_size);
    const auto forced = forced_pool(scope.max_inputs, v);
    std::vector<InputSet> subsets;
    for (std::uint32_t m = 0; m < (1U << scope.max_inputs); ++m)
        subsets.push_back(InputSet::from_mask(m));

    std::function<void(const L1State&, std::size_t)> visit = [&](const L1State& s, std::size_t depth) {
        out.states.insert(canonical_encode(s));
        ++out.sequences[depth];
        if (depth == max_steps)
            return;
        auto go = [&](const std::optional<L1State>& next) {
            if (next)
                visit(*next, depth + 1);
        };
        if (s.commitments.size() + s.proofs.size() < scope.max_pending_claims) {
            for (const auto& b : blocks)
                go(receive_commitment(s, Claim{s.finalized_state, b}, v));
            for (const auto& b : blocks)
                go(receive_proof(s, Claim{s.finalized_state, b}, v));
        }
        for (const auto& c : s.commitments)
            for (const auto& p : s.proofs) {
                auto next = rollup_process(s, c, p, v);
                if (next) {
                    ++out.compaction_checks;
                    if (!queue_constraints_hold(s.forced_queue, next->forced_queue, c.diff))
                        ++out.compaction_failures;
                }
                go(next);
            }
        for (const auto& f : forced)
            go(receive_forced(s, f, v));
        for (const auto& f : forced)
            if (const auto* p = std::get_if<BlacklistPolicy>(&f))
                go(update_blacklist(s, *p, v));
        if (v.upgradeability)
            for (auto sub : subsets)
                go(upgrade_init(s, UpgradeAnnouncement{BlacklistPolicy{sub}}, v));
        go(upgrade_timeout(s, v));
        go(upgrade_deploy(s, v));
        for (auto sub : subsets)
            go(admin_set_blacklist(s, sub, v));
        visit(s, depth + 1); // stutter
    };
    visit(initial_state(), 0);
    return out;
}

} // namespace oracle
