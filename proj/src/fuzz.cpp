#include "rollup/fuzz.hpp"

#include <random>
#include <utility>

namespace rollup {

namespace {

// Applies `f` to every input id carried by the event. Returns std::nullopt
// when the mapped parameters are not well formed (duplicates or empty blocks).
template <class F>
std::optional<Event> map_inputs(const Event& e, F f)
{
    bool ok = true;
    auto map_set = [&](InputSet s) {
        InputSet out;
        for (auto id : s.elements())
            if (auto m = f(id))
                out.insert(*m);
        return out;
    };
    auto map_block = [&](const Block& b) {
        std::vector<InputId> ids;
        for (auto id : b.inputs())
            if (auto m = f(id))
                ids.push_back(*m);
        InputSet seen;
        for (auto id : ids) {
            if (seen.contains(id))
                ok = false;
            seen.insert(id);
        }
        if (ids.empty() || !ok) {
            ok = false;
            return Block{};
        }
        return Block(std::span<const InputId>(ids));
    };
    auto map_claim = [&](const Claim& c) {
        Claim out;
        for (const auto& b : c.state)
            out.state.push_back(map_block(b));
        out.diff = map_block(c.diff);
        if (ok && !is_well_formed(out))
            ok = false;
        return out;
    };
    auto map_forced = [&](const ForcedEvent& fe) -> ForcedEvent {
        if (const auto* in = std::get_if<ForcedInput>(&fe)) {
            auto m = f(in->tx);
            if (!m) {
                ok = false;
                return fe;
            }
            return ForcedInput{*m};
        }
        return BlacklistPolicy{map_set(std::get<BlacklistPolicy>(fe).predicate)};
    };

    Event out = e;
    std::visit(
        [&](const auto& p) {
            using T = std::decay_t<decltype(p)>;
            if constexpr (std::is_same_v<T, Claim>)
                out.params = map_claim(p);
            else if constexpr (std::is_same_v<T, RollupParams>)
                out.params = RollupParams{map_claim(p.commitment), map_claim(p.proof)};
            else if constexpr (std::is_same_v<T, ForcedEvent>)
                out.params = map_forced(p);
            else if constexpr (std::is_same_v<T, BlacklistPolicy>)
                out.params = BlacklistPolicy{map_set(p.predicate)};
            else if constexpr (std::is_same_v<T, UpgradeAnnouncement>)
                out.params = UpgradeAnnouncement{BlacklistPolicy{map_set(p.policy.predicate)}};
            else if constexpr (std::is_same_v<T, InputSet>)
                out.params = map_set(p);
        },
        e.params);
    if (!ok)
        return std::nullopt;
    return out;
}

// Sum of (id + 1) over every input occurrence in the parameters.
std::size_t weight(const Event& e)
{
    std::size_t w = 0;
    (void)map_inputs(e, [&](InputId id) -> std::optional<InputId> {
        w += id + 1U;
        return id;
    });
    return w;
}

using Measure = std::pair<std::size_t, std::size_t>;

Measure measure(const std::vector<Event>& events)
{
    std::size_t w = 0;
    for (const auto& e : events)
        w += weight(e);
    return {events.size(), w};
}

InputSet inputs_used(const std::vector<Event>& events)
{
    InputSet used;
    for (const auto& e : events)
        (void)map_inputs(e, [&](InputId id) -> std::optional<InputId> {
            used.insert(id);
            return id;
        });
    return used;
}

// Set-valued parameter of an event, if it has exactly one.
std::optional<InputSet> set_param(const Event& e)
{
    if (const auto* s = std::get_if<InputSet>(&e.params))
        return *s;
    if (const auto* b = std::get_if<BlacklistPolicy>(&e.params))
        return b->predicate;
    if (const auto* a = std::get_if<UpgradeAnnouncement>(&e.params))
        return a->policy.predicate;
    if (const auto* f = std::get_if<ForcedEvent>(&e.params))
        if (const auto* p = std::get_if<BlacklistPolicy>(f))
            return p->predicate;
    return std::nullopt;
}

Event with_set_param(const Event& e, InputSet s)
{
    Event out = e;
    if (std::holds_alternative<InputSet>(e.params))
        out.params = s;
    else if (std::holds_alternative<BlacklistPolicy>(e.params))
        out.params = BlacklistPolicy{s};
    else if (std::holds_alternative<UpgradeAnnouncement>(e.params))
        out.params = UpgradeAnnouncement{BlacklistPolicy{s}};
    else
        out.params = ForcedEvent{BlacklistPolicy{s}};
    return out;
}

// Single-event parameter reductions; claims are only changed globally.
std::vector<Event> local_reductions(const Event& e)
{
    std::vector<Event> out;
    if (auto s = set_param(e)) {
        for (auto x : s->elements()) {
            auto smaller = *s;
            smaller.erase(x);
            out.push_back(with_set_param(e, smaller));
            for (InputId y = 0; y < x; ++y) {
                if (s->contains(y))
                    continue;
                auto moved = smaller;
                moved.insert(y);
                out.push_back(with_set_param(e, moved));
            }
        }
    } else if (const auto* f = std::get_if<ForcedEvent>(&e.params)) {
        const auto& in = std::get<ForcedInput>(*f);
        for (InputId y = 0; y < in.tx; ++y)
            out.push_back(Event::receive_forced(ForcedInput{y}));
    }
    return out;
}

class Shrinker {
public:
    Shrinker(const PropertySpec& p, const VariantConfig& v, const ScopeConfig& scope)
        : p_(p), v_(v), scope_(scope)
    {
    }

    // Shortest violating prefix of `events`, if `events` replays and violates.
    std::optional<std::vector<Event>> violating(const std::vector<Event>& events) const
    {
        auto t = replay(initial_state(), events, v_);
        if (!t)
            return std::nullopt;
        for (const auto& s : t->states)
            if (!is_valid(s, scope_))
                return std::nullopt;
        auto verdict = evaluate(p_, *t, scope_);
        if (verdict.outcome != Outcome::violated)
            return std::nullopt;
        const auto idx = *verdict.violation_index;
        for (std::size_t len = idx; len <= std::min(idx + 1, events.size()); ++len) {
            std::vector<Event> prefix(events.begin(), events.begin() + static_cast<std::ptrdiff_t>(len));
            if (len == events.size())
                return prefix;
            auto pt = replay(initial_state(), prefix, v_);
            if (evaluate(p_, *pt, scope_).outcome == Outcome::violated)
                return prefix;
        }
        return events;
    }

    bool try_accept(std::vector<Event>& current, const std::vector<Event>& candidate) const
    {
        if (!(measure(candidate) < measure(current)))
            return false;
        auto v = violating(candidate);
        if (!v || !(measure(*v) < measure(current)))
            return false;
        current = std::move(*v);
        return true;
    }

    bool delete_events(std::vector<Event>& cur) const
    {
        const auto n = cur.size();
        auto without = [&](std::initializer_list<std::size_t> drop) {
            std::vector<Event> out;
            for (std::size_t i = 0; i < n; ++i)
                if (std::ranges::find(drop, i) == drop.end())
                    out.push_back(cur[i]);
            return out;
        };
        for (std::size_t i = 0; i < n; ++i)
            if (try_accept(cur, without({i})))
                return true;
        // A rollup needs its commitment, proof and process removed together.
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                if (try_accept(cur, without({i, j})))
                    return true;
        for (std::size_t i = 0; i < n; ++i)
            for (std::size_t j = i + 1; j < n; ++j)
                for (std::size_t k = j + 1; k < n; ++k)
                    if (try_accept(cur, without({i, j, k})))
                        return true;
        return false;
    }

    bool reduce_parameters(std::vector<Event>& cur) const
    {
        for (std::size_t i = 0; i < cur.size(); ++i) {
            for (auto& r : local_reductions(cur[i])) {
                auto cand = cur;
                cand[i] = std::move(r);
                if (try_accept(cur, cand))
                    return true;
            }
        }
        return false;
    }

    // Drops an input from, or renames it to a smaller id in, every event at once.
    bool rename_inputs(std::vector<Event>& cur) const
    {
        for (auto x : inputs_used(cur).elements()) {
            std::vector<std::optional<InputId>> targets{std::nullopt};
            for (InputId y = 0; y < x; ++y)
                targets.emplace_back(y);
            for (auto target : targets) {
                std::vector<Event> cand;
                bool ok = true;
                for (const auto& e : cur) {
                    auto m = map_inputs(e, [&](InputId id) -> std::optional<InputId> {
                        return id == x ? target : std::optional<InputId>(id);
                    });
                    if (!m) {
                        ok = false;
                        break;
                    }
                    cand.push_back(std::move(*m));
                }
                if (ok && try_accept(cur, cand))
                    return true;
            }
        }
        return false;
    }

    Trace run(std::vector<Event> events) const
    {
        auto start = violating(events);
        if (!start)
            throw precondition_violation("shrink needs a replayable violating trace");
        auto cur = std::move(*start);
        while (delete_events(cur) || reduce_parameters(cur) || rename_inputs(cur)) {
        }
        return *replay(initial_state(), cur, v_);
    }

private:
    const PropertySpec& p_;
    VariantConfig v_;
    ScopeConfig scope_;
};

} // namespace

void FuzzConfig::validate() const
{
    if (num_traces == 0)
        throw config_error("num_traces must be at least 1");
    if (max_len > kMaxStepsCap)
        throw config_error("max_len exceeds " + std::to_string(kMaxStepsCap));
    variant.validate();
    scope.validate();
}

std::uint64_t trace_seed(std::uint64_t seed, std::size_t n)
{
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(n), static_cast<std::uint32_t>(static_cast<std::uint64_t>(n) >> 32)};
    std::mt19937_64 rng(seq);
    return rng();
}

Trace random_trace(const TransitionSystem& ts, std::uint64_t seed, std::size_t len)
{
    std::mt19937_64 rng(seed);
    Trace t;
    t.states.push_back(initial_state());
    for (std::size_t i = 0; i < len; ++i) {
        auto succ = ts.successors(t.states.back());
        // Plain modulo keeps the choice identical across standard libraries.
        auto& pick = succ[rng() % succ.size()];
        t.events.push_back(std::move(pick.event));
        t.states.push_back(std::move(pick.state));
    }
    return t;
}

Trace shrink(const PropertySpec& p, std::vector<Event> events, const VariantConfig& variant,
             const ScopeConfig& scope)
{
    return Shrinker(p, variant, scope).run(std::move(events));
}

FuzzReport fuzz(const FuzzConfig& cfg, const std::vector<const PropertySpec*>& props)
{
    cfg.validate();
    std::vector<const PropertySpec*> safety;
    std::vector<PropertyId> ids;
    for (const auto* p : props) {
        if (!applies_to(*p, cfg.variant))
            throw config_error(std::string(p->name) + " does not apply to " + variant_name(cfg.variant));
        if (p->kind != PropertyKind::safety)
            continue;
        safety.push_back(p);
        ids.push_back(p->id);
    }

    FuzzReport report;
    for (const auto* p : safety)
        report.properties.emplace_back(p->name);
    const Monitor monitor(ids);
    const TransitionSystem ts(cfg.scope, cfg.variant);

    struct Found {
        std::size_t trace_number;
        std::vector<Event> events;
    };
    std::vector<std::optional<Found>> found(safety.size());
    std::uint32_t open = monitor.mask();

    for (std::size_t n = 0; n < cfg.num_traces; ++n) {
        const auto t = random_trace(ts, trace_seed(cfg.seed, n), cfg.max_len);
        ++report.traces_run;
        report.steps_run += t.length();
        auto record = [&](std::uint32_t violated, std::size_t len) {
            violated &= open;
            for (std::size_t k = 0; k < safety.size(); ++k) {
                if (!(violated & bit(safety[k]->id)))
                    continue;
                found[k] = Found{n, {t.events.begin(), t.events.begin() + static_cast<std::ptrdiff_t>(len)}};
                open &= ~bit(safety[k]->id);
            }
        };
        History h = monitor.start(t.states[0]);
        record(monitor.initial_violations(h, t.states[0]), 0);
        for (std::size_t i = 0; i < t.length() && open != 0; ++i) {
            auto r = monitor.advance(h, t.states[i], t.events[i], t.states[i + 1]);
            record(r.violated, i + 1);
            h = std::move(r.history);
        }
    }

    for (std::size_t k = 0; k < safety.size(); ++k) {
        if (!found[k])
            continue;
        const auto& p = *safety[k];
        auto prefix = *replay(initial_state(), found[k]->events, cfg.variant);
        if (evaluate(p, prefix, cfg.scope).outcome != Outcome::violated)
            throw std::logic_error("fuzz monitor reported " + std::string(p.name) +
                                   " but the evaluator does not confirm it");
        auto shrunk = shrink(p, found[k]->events, cfg.variant, cfg.scope);
        auto verdict = evaluate(p, shrunk, cfg.scope);
        if (verdict.outcome != Outcome::violated)
            throw std::logic_error("shrunk trace no longer violates " + std::string(p.name));
        report.violations.push_back(
            FuzzViolation{std::string(p.name), found[k]->trace_number, found[k]->events.size(),
                          *verdict.violation_index, std::move(shrunk)});
    }
    return report;
}

} // namespace rollup
