#include "rollup/transitions.hpp"

#include <array>

namespace rollup {

namespace {

constexpr std::array<std::string_view, 10> kEventKindNames = {
    "receive_commitment", "receive_proof",  "rollup_process", "receive_forced",      "update_blacklist",
    "upgrade_init",       "upgrade_timeout", "upgrade_deploy", "admin_set_blacklist", "stutter",
};

bool accepts_claim(const L1State& s, const ClaimSet& container, const Claim& c)
{
    return !container.contains(c) && is_prefix(s.finalized_state, c.state) && is_well_formed(c);
}

bool queued_policy_blocks(std::span<const ForcedEvent> queue, InputId tx)
{
    for (const auto& f : queue)
        if (const auto* p = std::get_if<BlacklistPolicy>(&f); p && p->predicate.contains(tx))
            return true;
    return false;
}

// Every queued ForcedInput finalized by this diff must sit ahead of every
// queued policy.
bool respects_policy_order(std::span<const ForcedEvent> queue, const Block& diff)
{
    std::optional<std::size_t> first_policy;
    for (std::size_t i = 0; i < queue.size(); ++i) {
        if (std::holds_alternative<BlacklistPolicy>(queue[i])) {
            first_policy = i;
            break;
        }
    }
    if (!first_policy)
        return true;
    for (std::size_t i = *first_policy; i < queue.size(); ++i)
        if (const auto* fi = std::get_if<ForcedInput>(&queue[i]); fi && diff.contains(fi->tx))
            return false;
    return true;
}

ClaimSet drop_used_and_stale(const ClaimSet& claims, const Claim& used, std::size_t finalized_len)
{
    ClaimSet out;
    out.reserve(claims.size());
    for (const auto& q : claims)
        if (q != used && q.state.size() >= finalized_len)
            out.insert(out.end(), q);
    return out;
}

void extend_blocks(std::vector<Block>& out, std::vector<InputId>& prefix, InputSet used, std::size_t n,
                   std::size_t max_len)
{
    if (!prefix.empty())
        out.emplace_back(std::span<const InputId>(prefix));
    if (prefix.size() == max_len)
        return;
    for (std::size_t id = 0; id < n; ++id) {
        auto input = static_cast<InputId>(id);
        if (used.contains(input))
            continue;
        prefix.push_back(input);
        auto next = used;
        next.insert(input);
        extend_blocks(out, prefix, next, n, max_len);
        prefix.pop_back();
    }
}

} // namespace

std::string_view to_string(EventKind k)
{
    return kEventKindNames.at(static_cast<std::size_t>(k));
}

std::optional<EventKind> event_kind_by_name(std::string_view name)
{
    for (std::size_t i = 0; i < kEventKindNames.size(); ++i)
        if (kEventKindNames[i] == name)
            return static_cast<EventKind>(i);
    return std::nullopt;
}

void check_shape(const Event& e)
{
    bool ok = false;
    switch (e.kind) {
    case EventKind::receive_commitment:
    case EventKind::receive_proof:
        ok = std::holds_alternative<Claim>(e.params);
        break;
    case EventKind::rollup_process:
        ok = std::holds_alternative<RollupParams>(e.params);
        break;
    case EventKind::receive_forced:
        ok = std::holds_alternative<ForcedEvent>(e.params);
        break;
    case EventKind::update_blacklist:
        ok = std::holds_alternative<BlacklistPolicy>(e.params);
        break;
    case EventKind::upgrade_init:
        ok = std::holds_alternative<UpgradeAnnouncement>(e.params);
        break;
    case EventKind::admin_set_blacklist:
        ok = std::holds_alternative<InputSet>(e.params);
        break;
    case EventKind::upgrade_timeout:
    case EventKind::upgrade_deploy:
    case EventKind::stutter:
        ok = std::holds_alternative<std::monostate>(e.params);
        break;
    }
    if (!ok)
        throw precondition_violation("event parameters do not match kind " + std::string(to_string(e.kind)));
}

std::string to_string(const Event& e)
{
    std::string out(to_string(e.kind));
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Claim>)
                out += "(" + to_string(p) + ")";
            else if constexpr (std::is_same_v<T, RollupParams>)
                out += "(" + to_string(p.commitment) + "," + to_string(p.proof) + ")";
            else if constexpr (std::is_same_v<T, ForcedEvent>)
                out += "(" + to_string(p) + ")";
            else if constexpr (std::is_same_v<T, BlacklistPolicy>)
                out += "(P" + to_string(p.predicate) + ")";
            else if constexpr (std::is_same_v<T, UpgradeAnnouncement>)
                out += "(" + to_string(p) + ")";
            else if constexpr (std::is_same_v<T, InputSet>)
                out += "(" + to_string(p) + ")";
        },
        e.params);
    return out;
}

L1State initial_state()
{
    return L1State{};
}

std::optional<L1State> receive_commitment(const L1State& s, const Claim& c, const VariantConfig&)
{
    if (!accepts_claim(s, s.commitments, c))
        return std::nullopt;
    L1State next = s;
    next.commitments.insert(c);
    return next;
}

std::optional<L1State> receive_proof(const L1State& s, const Claim& p, const VariantConfig&)
{
    if (!accepts_claim(s, s.proofs, p))
        return std::nullopt;
    L1State next = s;
    next.proofs.insert(p);
    return next;
}

std::optional<L1State> rollup_process(const L1State& s, const Claim& c, const Claim& p, const VariantConfig& v)
{
    if (!s.commitments.contains(c) || !s.proofs.contains(p))
        return std::nullopt;
    if (c.state != p.state || c.diff != p.diff || c.state != s.finalized_state)
        return std::nullopt;
    if (contains_block(s.finalized_state, c.diff))
        return std::nullopt;

    if (v.forced_queue_enabled && !s.forced_queue.empty()) {
        const auto* head = std::get_if<ForcedInput>(&s.forced_queue.front());
        if (head == nullptr || !c.diff.contains(head->tx))
            return std::nullopt;
    }
    if (s.blacklist.intersects(c.diff.input_set()))
        return std::nullopt;
    if (v.blacklist_via_queue && !respects_policy_order(s.forced_queue, c.diff))
        return std::nullopt;
    // An ongoing upgrade only lets finalization through when it drains the queue.
    if (v.upgradeability && s.ongoing_upgrade && s.forced_queue.empty())
        return std::nullopt;

    L1State next = s;
    const std::size_t len = s.finalized_state.size();
    next.finalized_state.push_back(p.diff);
    next.proofs = drop_used_and_stale(s.proofs, p, len);
    next.commitments = drop_used_and_stale(s.commitments, c, len);
    next.forced_queue = compact_queue(s.forced_queue, c.diff);
    return next;
}

std::optional<L1State> receive_forced(const L1State& s, const ForcedEvent& f, const VariantConfig& v)
{
    if (!v.forced_queue_enabled)
        return std::nullopt;
    if (std::holds_alternative<BlacklistPolicy>(f) && !v.blacklist_via_queue)
        return std::nullopt;
    if (index_of(s.forced_queue, f))
        return std::nullopt;
    if (const auto* fi = std::get_if<ForcedInput>(&f)) {
        if (v.has_blacklist() && s.blacklist.contains(fi->tx))
            return std::nullopt;
        if (v.blacklist_via_queue && queued_policy_blocks(s.forced_queue, fi->tx))
            return std::nullopt;
    }
    if (v.upgradeability && s.ongoing_upgrade && s.timed_out.contains(*s.ongoing_upgrade))
        return std::nullopt;

    L1State next = s;
    next.forced_queue.push_back(f);
    return next;
}

std::optional<L1State> update_blacklist(const L1State& s, const BlacklistPolicy& f, const VariantConfig& v)
{
    if (!v.blacklist_via_queue || s.forced_queue.empty())
        return std::nullopt;
    const auto* head = std::get_if<BlacklistPolicy>(&s.forced_queue.front());
    if (head == nullptr || *head != f)
        return std::nullopt;
    if (!v.update_blacklist_during_upgrade && s.ongoing_upgrade)
        return std::nullopt;

    L1State next = s;
    next.blacklist = f.predicate;
    next.forced_queue.erase(next.forced_queue.begin());
    return next;
}

std::optional<L1State> upgrade_init(const L1State& s, const UpgradeAnnouncement& a, const VariantConfig& v)
{
    if (!v.upgradeability || s.ongoing_upgrade || s.timed_out.contains(a))
        return std::nullopt;
    L1State next = s;
    next.ongoing_upgrade = a;
    return next;
}

std::optional<L1State> upgrade_timeout(const L1State& s, const VariantConfig& v)
{
    if (!v.upgradeability || !s.ongoing_upgrade || s.timed_out.contains(*s.ongoing_upgrade))
        return std::nullopt;
    L1State next = s;
    next.timed_out.insert(*s.ongoing_upgrade);
    return next;
}

std::optional<L1State> upgrade_deploy(const L1State& s, const VariantConfig& v)
{
    if (!v.upgradeability || !s.ongoing_upgrade || !s.timed_out.contains(*s.ongoing_upgrade))
        return std::nullopt;
    if (v.flaw != Flaw::timeout_only_upgrade && !s.forced_queue.empty())
        return std::nullopt;
    L1State next = s;
    next.blacklist = s.ongoing_upgrade->policy.predicate;
    next.ongoing_upgrade.reset();
    return next;
}

std::optional<L1State> admin_set_blacklist(const L1State& s, InputSet bl, const VariantConfig& v)
{
    if (v.flaw != Flaw::on_the_spot_blacklist)
        return std::nullopt;
    L1State next = s;
    next.blacklist = bl;
    return next;
}

std::optional<L1State> apply(const L1State& s, const Event& e, const VariantConfig& v)
{
    check_shape(e);
    switch (e.kind) {
    case EventKind::receive_commitment:
        return receive_commitment(s, std::get<Claim>(e.params), v);
    case EventKind::receive_proof:
        return receive_proof(s, std::get<Claim>(e.params), v);
    case EventKind::rollup_process: {
        const auto& rp = std::get<RollupParams>(e.params);
        return rollup_process(s, rp.commitment, rp.proof, v);
    }
    case EventKind::receive_forced:
        return receive_forced(s, std::get<ForcedEvent>(e.params), v);
    case EventKind::update_blacklist:
        return update_blacklist(s, std::get<BlacklistPolicy>(e.params), v);
    case EventKind::upgrade_init:
        return upgrade_init(s, std::get<UpgradeAnnouncement>(e.params), v);
    case EventKind::upgrade_timeout:
        return upgrade_timeout(s, v);
    case EventKind::upgrade_deploy:
        return upgrade_deploy(s, v);
    case EventKind::admin_set_blacklist:
        return admin_set_blacklist(s, std::get<InputSet>(e.params), v);
    case EventKind::stutter:
        return s;
    }
    return std::nullopt;
}

std::vector<ForcedEvent> compact_queue(std::span<const ForcedEvent> queue, const Block& diff)
{
    std::vector<ForcedEvent> out;
    out.reserve(queue.size());
    for (const auto& f : queue) {
        const auto* fi = std::get_if<ForcedInput>(&f);
        if (fi == nullptr || !diff.contains(fi->tx))
            out.push_back(f);
    }
    return out;
}

bool is_frozen(const L1State& s)
{
    if (s.forced_queue.empty())
        return false;
    const auto* head = std::get_if<ForcedInput>(&s.forced_queue.front());
    return head != nullptr && s.blacklist.contains(head->tx);
}

Universe::Universe(const ScopeConfig& scope, const VariantConfig& variant)
{
    scope.validate();
    std::vector<InputId> prefix;
    extend_blocks(blocks, prefix, InputSet{}, scope.max_inputs, scope.max_block_size);
    std::ranges::sort(blocks);

    subsets = InputSet::all_subsets(scope.max_inputs);
    if (variant.forced_queue_enabled)
        for (std::size_t id = 0; id < scope.max_inputs; ++id)
            forced_events.emplace_back(ForcedInput{static_cast<InputId>(id)});
    if (variant.blacklist_via_queue)
        for (auto s : subsets)
            forced_events.emplace_back(BlacklistPolicy{s});
    if (variant.upgradeability)
        for (auto s : subsets)
            announcements.push_back(UpgradeAnnouncement{BlacklistPolicy{s}});
}

TransitionSystem::TransitionSystem(ScopeConfig scope, VariantConfig variant)
    : scope_(scope), variant_(variant), universe_(scope, variant)
{
    variant_.validate();
}

std::vector<Successor> TransitionSystem::successors(const L1State& s) const
{
    return successors(s, true);
}

std::vector<Successor> TransitionSystem::successors(const L1State& s, bool claim_receipts) const
{
    std::vector<Successor> out;
    auto emit = [&out](Event e, std::optional<L1State> next) {
        if (next)
            out.push_back(Successor{std::move(e), std::move(*next)});
    };

    // Fresh claims are built on exactly the finalized state; any other base
    // either fails the prefix guard or can never be processed.
    if (claim_receipts && s.commitments.size() + s.proofs.size() < scope_.max_pending_claims) {
        std::vector<Claim> fresh;
        for (const auto& b : universe_.blocks)
            if (!contains_block(s.finalized_state, b))
                fresh.push_back(Claim{s.finalized_state, b});
        for (const auto& c : fresh)
            emit(Event::receive_commitment(c), receive_commitment(s, c, variant_));
        for (const auto& p : fresh)
            emit(Event::receive_proof(p), receive_proof(s, p, variant_));
    }

    for (const auto& c : s.commitments)
        if (s.proofs.contains(c))
            emit(Event::rollup_process(c, c), rollup_process(s, c, c, variant_));

    for (const auto& f : universe_.forced_events)
        emit(Event::receive_forced(f), receive_forced(s, f, variant_));

    if (!s.forced_queue.empty())
        if (const auto* head = std::get_if<BlacklistPolicy>(&s.forced_queue.front()))
            emit(Event::update_blacklist(*head), update_blacklist(s, *head, variant_));

    for (const auto& a : universe_.announcements)
        emit(Event::upgrade_init(a), upgrade_init(s, a, variant_));
    emit(Event::upgrade_timeout(), upgrade_timeout(s, variant_));
    emit(Event::upgrade_deploy(), upgrade_deploy(s, variant_));

    if (variant_.flaw == Flaw::on_the_spot_blacklist)
        for (auto bl : universe_.subsets)
            emit(Event::admin_set_blacklist(bl), admin_set_blacklist(s, bl, variant_));

    out.push_back(Successor{Event::stutter(), s});
    return out;
}

std::vector<Successor> enumerate_events(const L1State& s, const ScopeConfig& scope, const VariantConfig& variant)
{
    return TransitionSystem(scope, variant).successors(s);
}

} // namespace rollup
