#include "rollup/properties.hpp"

#include <array>

namespace rollup {

namespace {

bool any_variant(const VariantConfig&)
{
    return true;
}
bool with_queue(const VariantConfig& v)
{
    return v.forced_queue_enabled;
}
bool with_plain_queue(const VariantConfig& v)
{
    return v.forced_queue_enabled && !v.blacklist_via_queue;
}
bool with_policy_queue(const VariantConfig& v)
{
    return v.forced_queue_enabled && v.blacklist_via_queue;
}
bool with_blacklist(const VariantConfig& v)
{
    return v.has_blacklist();
}
// Policies arriving through the queue change the blacklist outside any
// upgrade, which the announcement-based properties do not allow for.
bool with_upgrade_only(const VariantConfig& v)
{
    return v.upgradeability && !v.blacklist_via_queue;
}
bool with_upgrade_gated(const VariantConfig& v)
{
    return v.upgradeability && (!v.blacklist_via_queue || !v.update_blacklist_during_upgrade);
}

using K = PropertyKind;
using P = PropertyId;

const std::vector<PropertySpec> kCatalog = {
    {P::srp1, "SRP1", "event granularity", K::safety, false, any_variant},
    {P::srp2, "SRP2", "monotonic state", K::safety, false, any_variant},
    {P::srp3, "SRP3", "justified state", K::safety, true, any_variant},
    {P::srp4, "SRP4", "state progression validity", K::safety, true, any_variant},
    {P::fqp1, "FQP1", "guaranteed processing", K::safety, false, with_queue},
    {P::fqp2, "FQP2", "forced queue stable", K::safety, false, with_plain_queue},
    {P::fqp2_queue, "FQP2'", "forced queue stable up to policy updates", K::safety, false, with_policy_queue},
    {P::fqp3, "FQP3", "state invariant", K::safety, false, with_queue},
    {P::fqp4, "FQP4", "forced inputs progress", K::safety, false, with_queue},
    {P::fqp5, "FQP5", "order preservation", K::safety, false, with_queue},
    {P::fqp6, "FQP6", "finalization confirmation", K::liveness, false, with_queue},
    {P::bp1, "BP1", "non-blacklisted finalization", K::safety, false, with_blacklist},
    {P::bp2, "BP2", "forced queue integrity under censorship", K::liveness, false, with_blacklist},
    {P::bp3, "BP3", "head position security", K::safety, false, with_blacklist},
    {P::bp4, "BP4", "future policy compliance", K::safety, false, with_blacklist},
    {P::bp5, "BP5", "following active policy", K::safety, false, with_blacklist},
    {P::up1, "UP1", "announcement, timeout and enforcement consistency", K::safety, false, with_upgrade_only},
    {P::up2, "UP2", "finalization of forced inputs before the upgrade", K::liveness, false, with_upgrade_only},
    {P::up3, "UP3", "post-upgrade integrity", K::safety, false, with_upgrade_gated},
    {P::up4, "UP4", "blacklist constancy during an upgrade", K::safety, false, with_upgrade_gated},
    {P::freeze, "FREEZE", "no frozen state", K::safety, false, with_queue},
};

InputSet new_inputs(const L1State& pre, const L1State& post)
{
    if (!is_prefix(pre.finalized_state, post.finalized_state))
        return derived_all_finalized_inputs(post);
    return derived_new_finalized_inputs(pre, post);
}

std::optional<std::size_t> index_of_event(const L1State& s, const ForcedEvent& f)
{
    return index_of(s.forced_queue, f);
}

Formula srp3_body(const ScopeConfig& scope)
{
    std::vector<Formula> parts;
    for (const auto& b : Universe(scope, VariantConfig{}).blocks) {
        parts.push_back(implies(Formula::state([b](const L1State& s) { return contains_block(s.finalized_state, b); }),
                                once(Formula::state([b](const L1State& s) { return justifies(s, b); }))));
    }
    return all_of(std::move(parts));
}

Formula fqp6_body(const ScopeConfig& scope)
{
    std::vector<Formula> parts;
    for (std::size_t id = 0; id < scope.max_inputs; ++id) {
        const ForcedEvent fi = ForcedInput{static_cast<InputId>(id)};
        const auto tx = static_cast<InputId>(id);
        auto queued = Formula::state([fi](const L1State& s) { return index_of(s.forced_queue, fi).has_value(); });
        auto confirmed = Formula::state([fi, tx](const L1State& s) {
            return index_of(s.forced_queue, fi).has_value() || derived_all_finalized_inputs(s).contains(tx);
        });
        parts.push_back(implies(queued, always(confirmed)));
    }
    return all_of(std::move(parts));
}

Formula up1_body(const ScopeConfig& scope)
{
    const auto subsets = InputSet::all_subsets(scope.max_inputs);
    std::vector<Formula> per_blacklist;
    for (auto is : subsets) {
        auto changes_from = Formula::step([is](const L1State& pre, const Event&, const L1State& post) {
            return pre.blacklist == is && pre.blacklist != post.blacklist;
        });
        std::vector<Formula> per_announcement;
        for (auto pred : subsets) {
            const UpgradeAnnouncement x{BlacklistPolicy{pred}};
            auto ongoing_x =
                Formula::state([x](const L1State& s) { return s.ongoing_upgrade && *s.ongoing_upgrade == x; });
            auto started = Formula::step([x, is](const L1State& pre, const Event&, const L1State& post) {
                return !pre.ongoing_upgrade && post.ongoing_upgrade && *post.ongoing_upgrade == x &&
                       pre.blacklist == is && !pre.timed_out.contains(x);
            });
            auto timed_out = Formula::state([x](const L1State& s) { return s.timed_out.contains(x); });
            auto unchanged = Formula::state([is](const L1State& s) { return s.blacklist == is; });
            per_announcement.push_back(ongoing_x && once(started && releases(timed_out, unchanged)));
        }
        per_blacklist.push_back(implies(changes_from, any_of(std::move(per_announcement))));
    }
    return all_of(std::move(per_blacklist));
}

Formula up2_body(const ScopeConfig& scope)
{
    auto changes = Formula::step(
        [](const L1State& pre, const Event&, const L1State& post) { return pre.blacklist != post.blacklist; });
    std::vector<Formula> per_input;
    for (std::size_t id = 0; id < scope.max_inputs; ++id) {
        const ForcedEvent fi = ForcedInput{static_cast<InputId>(id)};
        const auto tx = static_cast<InputId>(id);
        auto queued = Formula::state([fi](const L1State& s) { return index_of(s.forced_queue, fi).has_value(); });
        auto finalized =
            Formula::state([tx](const L1State& s) { return derived_all_finalized_inputs(s).contains(tx); });
        per_input.push_back(implies(queued, eventually(finalized)));
    }
    return implies(changes, historically(all_of(std::move(per_input))));
}

} // namespace

InputSet queued_inputs(const L1State& s)
{
    InputSet out;
    for (const auto& f : s.forced_queue)
        if (const auto* fi = std::get_if<ForcedInput>(&f))
            out.insert(fi->tx);
    return out;
}

bool has_queued_policy(const L1State& s)
{
    return std::ranges::any_of(s.forced_queue,
                               [](const ForcedEvent& f) { return std::holds_alternative<BlacklistPolicy>(f); });
}

const std::vector<PropertySpec>& catalog()
{
    return kCatalog;
}

const PropertySpec& property(PropertyId id)
{
    return kCatalog.at(static_cast<std::size_t>(id));
}

const PropertySpec* find_property(std::string_view name)
{
    if (name == "FQP2prime")
        name = "FQP2'";
    for (const auto& p : kCatalog)
        if (p.name == name)
            return &p;
    return nullptr;
}

std::vector<const PropertySpec*> applicable_properties(const VariantConfig& v)
{
    std::vector<const PropertySpec*> out;
    for (const auto& p : kCatalog)
        if (p.applicable(v))
            out.push_back(&p);
    return out;
}

bool holds_on_step(PropertyId id, const L1State& pre, const Event& e, const L1State& post)
{
    switch (id) {
    case P::srp2:
        return is_prefix(pre.finalized_state, post.finalized_state);
    case P::srp4: {
        if (e.kind != EventKind::rollup_process)
            return true;
        const auto& rp = std::get<RollupParams>(e.params);
        const auto len = pre.finalized_state.size();
        return rp.commitment.state.size() >= len && rp.proof.state.size() >= len;
    }
    case P::fqp1: {
        if (pre.forced_queue.empty() || is_prefix(post.finalized_state, pre.finalized_state))
            return true;
        const auto head = head_tx(pre.forced_queue);
        return head.is_subset_of(new_inputs(pre, post)) && head != head_tx(post.forced_queue);
    }
    case P::fqp2:
        return pre.finalized_state != post.finalized_state || post.forced_queue.size() >= pre.forced_queue.size();
    case P::fqp2_queue:
        if (pre.finalized_state != post.finalized_state || post.forced_queue.size() >= pre.forced_queue.size())
            return true;
        return std::holds_alternative<BlacklistPolicy>(pre.forced_queue.front()) &&
               std::ranges::equal(std::span(pre.forced_queue).subspan(1), post.forced_queue);
    case P::fqp3:
        if (pre.forced_queue.empty() || pre.forced_queue != post.forced_queue)
            return true;
        return pre.finalized_state == post.finalized_state;
    case P::fqp4:
        if (pre.forced_queue.empty() || pre.finalized_state.size() >= post.finalized_state.size())
            return true;
        for (std::size_t i = 0; i < pre.forced_queue.size(); ++i) {
            auto j = index_of_event(post, pre.forced_queue[i]);
            if (j && *j >= i)
                return false;
        }
        return true;
    case P::fqp5: {
        std::optional<std::size_t> last;
        for (const auto& f : pre.forced_queue) {
            auto j = index_of_event(post, f);
            if (!j)
                continue;
            if (last && *j <= *last)
                return false;
            last = j;
        }
        return true;
    }
    case P::bp1: {
        auto added = derived_all_finalized_inputs(post) - derived_all_finalized_inputs(pre);
        return !added.intersects(pre.blacklist);
    }
    case P::up3:
        return pre.blacklist == post.blacklist || !post.ongoing_upgrade.has_value();
    case P::up4:
        return !(pre.ongoing_upgrade && post.ongoing_upgrade) || pre.blacklist == post.blacklist;
    default:
        throw precondition_violation("property is not a single step predicate");
    }
}

bool holds_at_state(PropertyId id, const L1State& s)
{
    switch (id) {
    case P::bp3: {
        if (s.forced_queue.empty())
            return true;
        const auto* head = std::get_if<ForcedInput>(&s.forced_queue.front());
        return head == nullptr || !s.blacklist.contains(head->tx);
    }
    case P::bp4: {
        InputSet barred;
        for (const auto& f : s.forced_queue) {
            if (const auto* pol = std::get_if<BlacklistPolicy>(&f))
                barred |= pol->predicate;
            else if (barred.contains(std::get<ForcedInput>(f).tx))
                return false;
        }
        return true;
    }
    case P::bp5:
        return has_queued_policy(s) || !queued_inputs(s).intersects(s.blacklist);
    case P::freeze:
        return !is_frozen(s);
    default:
        throw precondition_violation("property is not a single state predicate");
    }
}

bool is_step_predicate(PropertyId id)
{
    switch (id) {
    case P::srp2:
    case P::srp4:
    case P::fqp1:
    case P::fqp2:
    case P::fqp2_queue:
    case P::fqp3:
    case P::fqp4:
    case P::fqp5:
    case P::bp1:
    case P::up3:
    case P::up4:
        return true;
    default:
        return false;
    }
}

bool is_state_predicate(PropertyId id)
{
    return id == P::bp3 || id == P::bp4 || id == P::bp5 || id == P::freeze;
}

bool justifies(const L1State& s, const Block& b)
{
    bool commitment = false;
    for (const auto& c : s.commitments)
        if (c.diff == b && c.state == s.finalized_state)
            commitment = true;
    if (!commitment)
        return false;
    return std::ranges::any_of(s.proofs, [&b](const Claim& p) { return p.diff == b; });
}

Formula property_body(const PropertySpec& p, const ScopeConfig& scope)
{
    const PropertyId id = p.id;
    if (is_step_predicate(id))
        return Formula::step(
            [id](const L1State& pre, const Event& e, const L1State& post) { return holds_on_step(id, pre, e, post); });
    if (is_state_predicate(id))
        return Formula::state([id](const L1State& s) { return holds_at_state(id, s); });
    switch (id) {
    case P::srp1:
        return Formula::constant(true);
    case P::srp3:
        return srp3_body(scope);
    case P::fqp6:
        return fqp6_body(scope);
    case P::bp2:
        return implies(Formula::state([](const L1State& s) { return is_frozen(s); }),
                       always(Formula::step([](const L1State& pre, const Event&, const L1State& post) {
                           return pre.finalized_state == post.finalized_state;
                       })));
    case P::up1:
        return up1_body(scope);
    case P::up2:
        return up2_body(scope);
    default:
        throw precondition_violation("unknown property");
    }
}

Formula property_formula(const PropertySpec& p, const ScopeConfig& scope)
{
    return always(property_body(p, scope));
}

PropertyVerdict evaluate(const PropertySpec& p, const Trace& t, const ScopeConfig& scope)
{
    PropertyVerdict v;
    if (p.id == P::srp1) {
        try {
            check_shape(t);
        } catch (const precondition_violation&) {
            v.outcome = Outcome::violated;
            v.violation_index = 0;
            v.witness = t;
            return v;
        }
        v.outcome = Outcome::holds;
        return v;
    }
    if (p.kind == PropertyKind::liveness && !t.is_lasso()) {
        check_shape(t);
        v.outcome = Outcome::no_counterexample_within_bound;
        return v;
    }
    const Formula body = property_body(p, scope);
    const auto values = evaluate_positions(body, t);
    for (std::size_t i = 0; i < values.size(); ++i) {
        if (values[i] && !*values[i]) {
            v.outcome = Outcome::violated;
            v.violation_index = i;
            v.witness = t;
            return v;
        }
    }
    // On a lasso the failing position may only appear in a later loop copy.
    if (t.is_lasso() && !eval_at(always(body), t, 0)) {
        v.outcome = Outcome::violated;
        v.violation_index = t.states.size() - 1;
        v.witness = t;
        return v;
    }
    v.outcome = Outcome::holds;
    return v;
}

} // namespace rollup
