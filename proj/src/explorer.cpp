#include "rollup/explorer.hpp"

#include <array>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include "rollup/encoding.hpp"

namespace rollup {

namespace {

struct Move {
    std::vector<Successor> steps;
};

class Mover {
public:
    Mover(const TransitionSystem& ts, Strategy strategy) : ts_(ts), strategy_(strategy) {}

    [[nodiscard]] std::vector<Move> moves(const L1State& s) const
    {
        std::vector<Move> out;
        if (strategy_ == Strategy::full) {
            for (auto& succ : ts_.successors(s))
                out.push_back(Move{{std::move(succ)}});
            return out;
        }
        const auto& v = ts_.variant();
        if (ts_.scope().max_pending_claims >= 2 && s.commitments.empty() && s.proofs.empty()) {
            for (const auto& b : ts_.universe().blocks) {
                if (contains_block(s.finalized_state, b))
                    continue;
                const Claim c{s.finalized_state, b};
                auto committed = receive_commitment(s, c, v);
                if (!committed)
                    continue;
                auto proved = receive_proof(*committed, c, v);
                if (!proved)
                    continue;
                auto processed = rollup_process(*proved, c, c, v);
                if (!processed)
                    continue;
                Move m;
                m.steps.push_back({Event::receive_commitment(c), std::move(*committed)});
                m.steps.push_back({Event::receive_proof(c), std::move(*proved)});
                m.steps.push_back({Event::rollup_process(c, c), std::move(*processed)});
                out.push_back(std::move(m));
            }
        }
        for (auto& succ : ts_.successors(s, false))
            out.push_back(Move{{std::move(succ)}});
        return out;
    }

private:
    const TransitionSystem& ts_;
    Strategy strategy_;
};

struct Finding {
    std::size_t length = 0;
    std::uint32_t node = 0;
    int ordinal = -1;      // move taken from `node`, if any
    std::size_t substeps = 0; // steps of that move included
    bool lasso = false;       // closed by a stutter self-loop
};

struct NodeRec {
    const std::string* key = nullptr;
    std::uint32_t parent = 0;
    std::uint16_t ordinal = 0;
    std::uint8_t cost = 0;
};

// Uniform-cost search over (state, history) pairs. Costs are trace lengths;
// moves cost one step except on-demand rollups, which cost three.
class Search {
public:
    Search(const TransitionSystem& ts, Strategy strategy, const Monitor& monitor, std::size_t max_states)
        : ts_(ts), mover_(ts, strategy), monitor_(monitor), max_states_(max_states)
    {
        stats.strategy = strategy;
        for (auto id : monitor.properties())
            wanted_ |= bit(id);
        for (auto id : monitor.properties())
            if (property(id).kind == PropertyKind::liveness)
                liveness_ = true;
    }

    void execute()
    {
        const std::size_t max_steps = ts_.scope().max_steps;
        const L1State s0 = initial_state();
        const History h0 = monitor_.start(s0);
        insert(key_of(s0, h0), 0, 0, 0);
        buckets_.assign(max_steps + 1, {});
        buckets_[0].push_back(0);
        record(monitor_.initial_violations(h0, s0), Finding{0, 0, -1, 0, false});
        if (monitor_.goal() && h0.goal_reached)
            record_goal(Finding{0, 0, -1, 0, false});

        for (std::size_t c = 0; c <= max_steps; ++c) {
            if (settled(c))
                return;
            // Entries are appended only to later buckets while this one is walked.
            for (std::size_t i = 0; i < buckets_[c].size(); ++i) {
                const std::uint32_t id = buckets_[c][i];
                if (nodes_[id].cost != c)
                    continue;
                stats.deepest = c;
                std::size_t pos = 0;
                const std::string_view key = *nodes_[id].key;
                const L1State s = decode_state(key, pos);
                const History h = monitor_.decode(key, pos);

                if (liveness_ && c + 1 <= max_steps)
                    record(monitor_.closure_violations(h, s), Finding{c + 1, id, -1, 0, true});
                if (c == max_steps)
                    continue;

                const auto moves = mover_.moves(s);
                for (std::size_t o = 0; o < moves.size(); ++o) {
                    const auto& steps = moves[o].steps;
                    if (c + steps.size() > max_steps)
                        continue;
                    ++stats.transitions;
                    History cur = h;
                    const L1State* pre = &s;
                    for (std::size_t k = 0; k < steps.size(); ++k) {
                        auto r = monitor_.advance(cur, *pre, steps[k].event, steps[k].state);
                        const Finding f{c + k + 1, id, static_cast<int>(o), k + 1, false};
                        record(r.violated, f);
                        if (monitor_.goal() && r.history.goal_reached && !cur.goal_reached)
                            record_goal(f);
                        cur = std::move(r.history);
                        pre = &steps[k].state;
                    }
                    const auto cost = static_cast<std::uint8_t>(c + steps.size());
                    auto [it, fresh] = index_.try_emplace(key_of(steps.back().state, cur),
                                                          static_cast<std::uint32_t>(nodes_.size()));
                    if (fresh) {
                        nodes_.push_back(NodeRec{&it->first, id, static_cast<std::uint16_t>(o), cost});
                        buckets_[cost].push_back(it->second);
                        if (nodes_.size() > max_states_) {
                            hit_limit = true;
                            stats.states = nodes_.size();
                            return;
                        }
                    } else if (nodes_[it->second].cost > cost) {
                        auto& n = nodes_[it->second];
                        n.cost = cost;
                        n.parent = id;
                        n.ordinal = static_cast<std::uint16_t>(o);
                        buckets_[cost].push_back(it->second);
                    }
                }
            }
            stats.states = nodes_.size();
            buckets_[c].clear();
            buckets_[c].shrink_to_fit();
        }
        stats.states = nodes_.size();
    }

    [[nodiscard]] Trace witness(const Finding& f) const
    {
        std::vector<std::uint32_t> chain;
        for (std::uint32_t n = f.node; n != 0; n = nodes_[n].parent)
            chain.push_back(n);
        std::ranges::reverse(chain);

        Trace t;
        t.states.push_back(initial_state());
        auto take = [&t](const Move& m, std::size_t count) {
            for (std::size_t k = 0; k < count; ++k) {
                t.events.push_back(m.steps[k].event);
                t.states.push_back(m.steps[k].state);
            }
        };
        for (auto n : chain) {
            const auto moves = mover_.moves(t.states.back());
            const auto& m = moves.at(nodes_[n].ordinal);
            take(m, m.steps.size());
        }
        if (f.ordinal >= 0) {
            const auto moves = mover_.moves(t.states.back());
            take(moves.at(static_cast<std::size_t>(f.ordinal)), f.substeps);
        }
        if (f.lasso) {
            const L1State last = t.states.back();
            t.events.push_back(Event::stutter());
            t.states.push_back(last);
            t.lasso_to = t.states.size() - 2;
        }
        return t;
    }

    std::array<std::optional<Finding>, kPropertyCount> found;
    std::optional<Finding> goal_found;
    bool hit_limit = false;
    ExploreStats stats;

private:
    std::string key_of(const L1State& s, const History& h) const
    {
        std::string k = canonical_encode(s);
        monitor_.append_key(k, h);
        return k;
    }

    void insert(std::string key, std::uint32_t parent, std::uint16_t ordinal, std::uint8_t cost)
    {
        auto [it, fresh] = index_.try_emplace(std::move(key), static_cast<std::uint32_t>(nodes_.size()));
        if (fresh)
            nodes_.push_back(NodeRec{&it->first, parent, ordinal, cost});
    }

    void record(std::uint32_t violated, const Finding& f)
    {
        violated &= wanted_;
        for (std::size_t b = 0; violated != 0; ++b, violated >>= 1)
            if ((violated & 1U) && (!found[b] || found[b]->length > f.length))
                found[b] = f;
    }

    void record_goal(const Finding& f)
    {
        if (!goal_found || goal_found->length > f.length)
            goal_found = f;
    }

    // True once every target has a finding no later move can shorten: all
    // findings still to come are at least c + 1 long.
    [[nodiscard]] bool settled(std::size_t c) const
    {
        if (monitor_.goal())
            return goal_found && goal_found->length <= c + 1;
        if (wanted_ == 0)
            return true;
        for (std::size_t b = 0; b < kPropertyCount; ++b)
            if ((wanted_ >> b) & 1U)
                if (!found[b] || found[b]->length > c + 1)
                    return false;
        return true;
    }

    const TransitionSystem& ts_;
    Mover mover_;
    const Monitor& monitor_;
    std::size_t max_states_;
    std::uint32_t wanted_ = 0;
    bool liveness_ = false;
    std::unordered_map<std::string, std::uint32_t> index_;
    std::vector<NodeRec> nodes_;
    std::vector<std::vector<std::uint32_t>> buckets_;
};

PropertyVerdict confirmed_violation(const PropertySpec& p, const Trace& t, const ScopeConfig& scope,
                                    const VariantConfig& variant)
{
    if (auto bad = replay_mismatch(t, variant))
        throw std::logic_error("explorer produced a trace that does not replay at step " + std::to_string(*bad));
    auto v = evaluate(p, t, scope);
    if (v.outcome != Outcome::violated)
        throw std::logic_error("monitor and evaluator disagree on " + std::string(p.name));
    return v;
}

struct Group {
    VariantConfig variant;
    Strategy strategy;
    std::vector<std::size_t> members; // indices into the caller's property list
};

CheckResult resource_limited(const ExploreStats& stats)
{
    CheckResult r;
    r.verdict.outcome = Outcome::resource_limit_exceeded;
    r.stats = stats;
    return r;
}

void search_group(const Group& g, const ScopeConfig& scope, const VariantConfig& real,
                  const std::vector<const PropertySpec*>& props, const ExplorerOptions& opts,
                  std::vector<std::optional<CheckResult>>& results, std::vector<std::size_t>& refuted_in_projection)
{
    std::vector<PropertyId> ids;
    for (auto i : g.members)
        ids.push_back(props[i]->id);
    const TransitionSystem ts(scope, g.variant);
    const Monitor monitor(ids);
    Search search(ts, g.strategy, monitor, opts.max_states);
    search.execute();
    const bool projected = g.variant != real;
    for (auto i : g.members) {
        const auto& p = *props[i];
        const auto& f = search.found[static_cast<std::size_t>(p.id)];
        ExploreStats stats = search.stats;
        stats.projected = projected;
        if (f && projected) {
            refuted_in_projection.push_back(i);
            continue;
        }
        if (search.hit_limit) {
            results[i] = resource_limited(stats);
            continue;
        }
        CheckResult r;
        r.stats = stats;
        if (f)
            r.verdict = confirmed_violation(p, search.witness(*f), scope, real);
        else
            r.verdict.outcome = Outcome::no_counterexample_within_bound;
        results[i] = std::move(r);
    }
}

void validate(const VariantConfig& v, const ScopeConfig& s)
{
    v.validate();
    s.validate();
}

} // namespace

std::string_view to_string(Strategy s)
{
    return s == Strategy::full ? "full" : "claims-on-demand";
}

std::vector<CheckResult> check_all(const VariantConfig& variant, const ScopeConfig& scope,
                                   const std::vector<const PropertySpec*>& props, const ExplorerOptions& opts)
{
    validate(variant, scope);
    for (const auto* p : props)
        if (!applies_to(*p, variant))
            throw config_error(std::string(p->name) + " does not apply to variant " + variant_name(variant));

    std::vector<std::optional<CheckResult>> results(props.size());
    std::vector<std::size_t> refuted;
    const Strategy strategy = opts.strategy.value_or(Strategy::claims_on_demand);
    if (strategy == Strategy::full) {
        Group all{variant, Strategy::full, {}};
        for (std::size_t i = 0; i < props.size(); ++i)
            all.members.push_back(i);
        search_group(all, scope, variant, props, opts, results, refuted);
    } else {
        // Claim-blind properties see the same behaviours when claims arrive
        // just in time. Claim-reading ones are first checked on the strawman,
        // which contains every claim-level behaviour of every variant.
        Group blind{variant, Strategy::claims_on_demand, {}};
        Group claims{variant_by_name("strawman").value(), Strategy::full, {}};
        for (std::size_t i = 0; i < props.size(); ++i)
            (props[i]->reads_claims ? claims.members : blind.members).push_back(i);
        if (!blind.members.empty())
            search_group(blind, scope, variant, props, opts, results, refuted);
        if (!claims.members.empty())
            search_group(claims, scope, variant, props, opts, results, refuted);
        if (!refuted.empty()) {
            Group fallback{variant, Strategy::full, refuted};
            std::vector<std::size_t> unused;
            search_group(fallback, scope, variant, props, opts, results, unused);
        }
    }
    std::vector<CheckResult> out;
    for (auto& r : results)
        out.push_back(std::move(r.value()));
    return out;
}

CheckResult check(const CheckRequest& req, const ExplorerOptions& opts)
{
    const auto* p = find_property(req.target);
    if (p == nullptr)
        throw config_error("unknown property: " + req.target);
    return check_all(req.variant, req.scope, {p}, opts).front();
}

CheckResult run(const CheckRequest& req, const ExplorerOptions& opts)
{
    const auto* sc = find_scenario(req.target);
    if (sc == nullptr)
        throw config_error("unknown scenario: " + req.target);
    validate(req.variant, req.scope);
    if (!sc->applicable(req.variant))
        throw config_error(std::string(sc->name) + " does not apply to variant " + variant_name(req.variant));

    const TransitionSystem ts(req.scope, req.variant);
    const Monitor monitor({}, sc->id);
    Search search(ts, opts.strategy.value_or(Strategy::claims_on_demand), monitor, opts.max_states);
    search.execute();

    CheckResult r;
    r.stats = search.stats;
    if (search.goal_found) {
        const Trace t = search.witness(*search.goal_found);
        if (auto bad = replay_mismatch(t, req.variant))
            throw std::logic_error("explorer produced a witness that does not replay at step " + std::to_string(*bad));
        r.verdict = evaluate(*sc, t, req.scope);
        if (r.verdict.outcome != Outcome::holds)
            throw std::logic_error("monitor and evaluator disagree on scenario " + std::string(sc->name));
    } else if (search.hit_limit) {
        r.verdict.outcome = Outcome::resource_limit_exceeded;
    }
    return r;
}

CheckResult execute(const CheckRequest& req, const ExplorerOptions& opts)
{
    return req.mode == Mode::check ? check(req, opts) : run(req, opts);
}

Reachability reachable(const TransitionSystem& ts, std::size_t max_steps)
{
    Reachability out;
    std::map<std::string, std::uint64_t> layer{{canonical_encode(initial_state()), 1}};
    std::set<std::string> seen{layer.begin()->first};
    out.sequences_by_length.push_back(1);
    for (std::size_t k = 1; k <= max_steps; ++k) {
        std::map<std::string, std::uint64_t> next;
        for (const auto& [key, count] : layer)
            for (const auto& succ : ts.successors(canonical_decode(key)))
                next[canonical_encode(succ.state)] += count;
        std::uint64_t total = 0;
        for (const auto& [key, count] : next) {
            total += count;
            seen.insert(key);
        }
        out.sequences_by_length.push_back(total);
        layer = std::move(next);
    }
    out.states.assign(seen.begin(), seen.end());
    return out;
}

} // namespace rollup
