#include "rollup/monitor.hpp"

#include "rollup/encoding.hpp"

namespace rollup {

namespace {

using P = PropertyId;

void put_mask(std::string& out, InputSet s)
{
    out.push_back(static_cast<char>(s.mask() & 0xFF));
    out.push_back(static_cast<char>((s.mask() >> 8) & 0xFF));
}

InputSet get_mask(std::string_view in, std::size_t& pos)
{
    if (pos + 2 > in.size())
        throw precondition_violation("truncated history encoding");
    const auto lo = static_cast<unsigned char>(in[pos]);
    const auto hi = static_cast<unsigned char>(in[pos + 1]);
    pos += 2;
    return InputSet::from_mask(lo | (static_cast<std::uint32_t>(hi) << 8));
}

std::uint8_t get_byte(std::string_view in, std::size_t& pos)
{
    if (pos >= in.size())
        throw precondition_violation("truncated history encoding");
    return static_cast<std::uint8_t>(in[pos++]);
}

} // namespace

Monitor::Monitor(std::vector<PropertyId> properties, std::optional<ScenarioId> goal)
    : properties_(std::move(properties)), goal_(goal)
{
    for (auto id : properties_)
        mask_ |= bit(id);
    need_queued_ = watches(P::fqp6) || watches(P::up2);
}

void Monitor::observe(History& h, const L1State& s) const
{
    if (need_queued_)
        h.ever_queued |= queued_inputs(s);
    if (watches(P::srp3)) {
        for (const auto& c : s.commitments) {
            if (c.state != s.finalized_state || !justifies(s, c.diff))
                continue;
            auto it = std::ranges::lower_bound(h.justified, c.diff);
            if (it == h.justified.end() || *it != c.diff)
                h.justified.insert(it, c.diff);
        }
    }
    if (watches(P::bp2) && is_frozen(s))
        h.censored_seen = true;
    if (watches(P::fqp6)) {
        auto gone = h.ever_queued - queued_inputs(s);
        if (!gone.is_subset_of(derived_all_finalized_inputs(s)))
            h.latched |= bit(P::fqp6);
    }
    if (goal_) {
        switch (*goal_) {
        case ScenarioId::finalize_one:
            h.goal_reached = h.goal_reached || !s.finalized_state.empty();
            break;
        case ScenarioId::freeze:
            h.goal_reached = h.goal_reached || is_frozen(s);
            break;
        case ScenarioId::double_blacklist_update: {
            const auto fin = derived_all_finalized_inputs(s);
            if (h.goal_pending.intersects(fin))
                h.goal_reached = true;
            h.goal_pending |= s.blacklist - fin;
            break;
        }
        }
    }
    // Finalized inputs stay finalized, so they can no longer fail a pending
    // obligation; dropping them keeps equivalent histories equal.
    const auto fin = derived_all_finalized_inputs(s);
    h.ever_queued = h.ever_queued - fin;
    h.obligations = h.obligations - fin;
    h.goal_pending = h.goal_pending - fin;
}

std::uint32_t Monitor::state_violations(const History& h, const L1State& s) const
{
    std::uint32_t out = 0;
    for (auto id : properties_)
        if (is_state_predicate(id) && !holds_at_state(id, s))
            out |= bit(id);
    if (watches(P::srp3)) {
        for (const auto& b : s.finalized_state) {
            if (!std::ranges::binary_search(h.justified, b)) {
                out |= bit(P::srp3);
                break;
            }
        }
    }
    return out;
}

History Monitor::start(const L1State& s) const
{
    History h;
    observe(h, s);
    return h;
}

std::uint32_t Monitor::initial_violations(const History& h, const L1State& s) const
{
    return state_violations(h, s);
}

Monitor::StepResult Monitor::advance(const History& h, const L1State& pre, const Event& e, const L1State& post) const
{
    StepResult r{h, 0};
    History& n = r.history;
    for (auto id : properties_)
        if (is_step_predicate(id) && !holds_on_step(id, pre, e, post))
            r.violated |= bit(id);

    if (watches(P::bp2) && h.censored_seen && pre.finalized_state != post.finalized_state)
        n.latched |= bit(P::bp2);

    const bool blacklist_changed = pre.blacklist != post.blacklist;
    if (watches(P::up1)) {
        if (blacklist_changed) {
            const bool justified_change = pre.ongoing_upgrade && h.watch &&
                                          h.watch->announcement == *pre.ongoing_upgrade &&
                                          h.watch->blacklist_at_start == pre.blacklist &&
                                          h.watch->phase == UpgradeWatch::Phase::held;
            if (!justified_change)
                r.violated |= bit(P::up1);
        }
        if (!pre.ongoing_upgrade && post.ongoing_upgrade) {
            const bool fresh = !pre.timed_out.contains(*post.ongoing_upgrade);
            n.watch = UpgradeWatch{*post.ongoing_upgrade, pre.blacklist,
                                   fresh ? UpgradeWatch::Phase::open : UpgradeWatch::Phase::broken};
        }
        if (!post.ongoing_upgrade) {
            n.watch.reset();
        } else if (n.watch && n.watch->phase == UpgradeWatch::Phase::open) {
            if (post.blacklist != n.watch->blacklist_at_start)
                n.watch->phase = UpgradeWatch::Phase::broken;
            else if (post.timed_out.contains(n.watch->announcement))
                n.watch->phase = UpgradeWatch::Phase::held;
        }
    }
    if (watches(P::up2) && blacklist_changed)
        n.obligations |= h.ever_queued;

    observe(n, post);
    r.violated |= state_violations(n, post);
    return r;
}

std::uint32_t Monitor::closure_violations(const History& h, const L1State& s) const
{
    std::uint32_t out = h.latched & mask_;
    if (watches(P::up2) && !h.obligations.is_subset_of(derived_all_finalized_inputs(s)))
        out |= bit(P::up2);
    return out;
}

void Monitor::append_key(std::string& out, const History& h) const
{
    if (need_queued_)
        put_mask(out, h.ever_queued);
    if (watches(P::up2))
        put_mask(out, h.obligations);
    if (watches(P::srp3))
        append_encoding(out, std::span<const Block>(h.justified));
    if (watches(P::bp2))
        out.push_back(h.censored_seen ? 1 : 0);
    if (watches(P::up1)) {
        if (h.watch) {
            out.push_back(1);
            put_mask(out, h.watch->announcement.policy.predicate);
            put_mask(out, h.watch->blacklist_at_start);
            out.push_back(static_cast<char>(h.watch->phase));
        } else {
            out.push_back(0);
        }
    }
    if (goal_) {
        put_mask(out, h.goal_pending);
        out.push_back(h.goal_reached ? 1 : 0);
    }
    if (watches(P::fqp6) || watches(P::bp2))
        out.push_back(static_cast<char>(((h.latched & bit(P::fqp6)) ? 1 : 0) | ((h.latched & bit(P::bp2)) ? 2 : 0)));
}

History Monitor::decode(std::string_view in, std::size_t& pos) const
{
    History h;
    if (need_queued_)
        h.ever_queued = get_mask(in, pos);
    if (watches(P::up2))
        h.obligations = get_mask(in, pos);
    if (watches(P::srp3))
        h.justified = decode_blocks(in, pos);
    if (watches(P::bp2))
        h.censored_seen = get_byte(in, pos) != 0;
    if (watches(P::up1) && get_byte(in, pos) != 0) {
        UpgradeWatch w;
        w.announcement = UpgradeAnnouncement{BlacklistPolicy{get_mask(in, pos)}};
        w.blacklist_at_start = get_mask(in, pos);
        w.phase = static_cast<UpgradeWatch::Phase>(get_byte(in, pos));
        h.watch = w;
    }
    if (goal_) {
        h.goal_pending = get_mask(in, pos);
        h.goal_reached = get_byte(in, pos) != 0;
    }
    if (watches(P::fqp6) || watches(P::bp2)) {
        const auto b = get_byte(in, pos);
        if (b & 1)
            h.latched |= bit(P::fqp6);
        if (b & 2)
            h.latched |= bit(P::bp2);
    }
    return h;
}

} // namespace rollup
