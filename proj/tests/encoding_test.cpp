#include <gtest/gtest.h>

#include <set>

#include "rollup/encoding.hpp"
#include "rollup/explorer.hpp"

using namespace rollup;

namespace {

L1State sample_state()
{
    L1State s;
    s.finalized_state = {Block{0, 2}, Block{1}};
    s.commitments.insert(Claim{{Block{0, 2}, Block{1}}, Block{2}});
    s.proofs.insert(Claim{{Block{0, 2}, Block{1}}, Block{0}});
    s.forced_queue = {ForcedInput{2}, BlacklistPolicy{InputSet{0, 1}}};
    s.blacklist = InputSet{1};
    s.ongoing_upgrade = UpgradeAnnouncement{BlacklistPolicy{InputSet{2}}};
    s.timed_out.insert(UpgradeAnnouncement{BlacklistPolicy{}});
    return s;
}

} // namespace

TEST(CanonicalEncode, InsertionOrderIrrelevant)
{
    L1State a;
    a.commitments.insert(Claim{{}, Block{0}});
    a.commitments.insert(Claim{{}, Block{1}});
    a.timed_out.insert(UpgradeAnnouncement{BlacklistPolicy{InputSet{1}}});
    a.timed_out.insert(UpgradeAnnouncement{BlacklistPolicy{InputSet{0}}});
    L1State b;
    b.timed_out.insert(UpgradeAnnouncement{BlacklistPolicy{InputSet{0}}});
    b.timed_out.insert(UpgradeAnnouncement{BlacklistPolicy{InputSet{1}}});
    b.commitments.insert(Claim{{}, Block{1}});
    b.commitments.insert(Claim{{}, Block{0}});
    EXPECT_EQ(canonical_encode(a), canonical_encode(b));
}

TEST(CanonicalEncode, BlacklistDistinguishes)
{
    L1State a;
    L1State b;
    b.blacklist = InputSet{0};
    EXPECT_NE(canonical_encode(a), canonical_encode(b));
}

TEST(CanonicalEncode, Deterministic)
{
    EXPECT_EQ(canonical_encode(initial_state()), canonical_encode(initial_state()));
    EXPECT_EQ(canonical_encode(sample_state()), canonical_encode(sample_state()));
}

TEST(CanonicalEncode, RoundTrip)
{
    const auto s = sample_state();
    EXPECT_EQ(canonical_decode(canonical_encode(s)), s);
    EXPECT_EQ(canonical_decode(canonical_encode(initial_state())), initial_state());
}

TEST(CanonicalEncode, RejectsTruncatedAndTrailing)
{
    const auto bytes = canonical_encode(sample_state());
    EXPECT_THROW((void)canonical_decode(bytes.substr(0, bytes.size() - 1)), precondition_violation);
    EXPECT_THROW((void)canonical_decode(bytes + "x"), precondition_violation);
}

TEST(CanonicalEncode, InjectiveOnReachableStates)
{
    // Distinct states keep distinct encodings, and each encoding decodes back.
    const ScopeConfig scope{.max_inputs = 2, .max_block_size = 2, .max_steps = 4, .max_pending_claims = 2};
    for (const auto& name : {"upgrade-blacklist", "naive-blacklist"}) {
        const TransitionSystem ts(scope, *variant_by_name(name));
        const auto reach = reachable(ts, scope.max_steps);
        std::set<std::string> seen;
        for (const auto& key : reach.states) {
            const auto s = canonical_decode(key);
            EXPECT_EQ(canonical_encode(s), key);
            EXPECT_TRUE(seen.insert(to_string(s)).second);
        }
    }
}
