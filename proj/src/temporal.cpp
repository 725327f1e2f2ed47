#include "rollup/temporal.hpp"

#include <array>
#include <unordered_map>

namespace rollup {

enum class NodeKind : std::uint8_t {
    constant,
    state_atom,
    step_atom,
    negation,
    conjunction,
    disjunction,
    always,
    eventually,
    once,
    historically,
    releases,
};

struct Formula::Node {
    NodeKind kind = NodeKind::constant;
    bool value = false;
    StatePredicate state_pred;
    StepPredicate step_pred;
    std::vector<std::shared_ptr<const Node>> children;
};

namespace {

using NodePtr = std::shared_ptr<const Formula::Node>;

// -1 undefined, 0 false, 1 true.
using Label = std::vector<std::int8_t>;

constexpr std::int8_t kUndef = -1;

NodePtr make_node(NodeKind kind, std::vector<NodePtr> children)
{
    auto n = std::make_shared<Formula::Node>();
    n->kind = kind;
    n->children = std::move(children);
    return n;
}

std::size_t past_depth(const Formula::Node& n, std::unordered_map<const Formula::Node*, std::size_t>& memo)
{
    if (auto it = memo.find(&n); it != memo.end())
        return it->second;
    std::size_t d = 0;
    for (const auto& c : n.children)
        d = std::max(d, past_depth(*c, memo));
    if (n.kind == NodeKind::once || n.kind == NodeKind::historically)
        ++d;
    memo.emplace(&n, d);
    return d;
}

// Positions of a trace laid out as a finite graph. A lasso is written out
// with enough loop copies that past operators see every distinct history;
// the last position's successor wraps to the start of the final copy.
struct View {
    const Trace* trace = nullptr;
    std::vector<std::size_t> orig;
    bool lasso = false;
    std::size_t cycle_start = 0;

    [[nodiscard]] std::size_t size() const { return orig.size(); }
    [[nodiscard]] std::optional<std::size_t> succ(std::size_t p) const
    {
        if (p + 1 < orig.size())
            return p + 1;
        if (lasso)
            return cycle_start;
        return std::nullopt;
    }
    [[nodiscard]] const L1State& state(std::size_t p) const { return trace->states[orig[p]]; }
};

View make_view(const Trace& t, std::size_t depth)
{
    View v;
    v.trace = &t;
    const std::size_t n = t.states.size();
    if (!t.lasso_to) {
        for (std::size_t i = 0; i < n; ++i)
            v.orig.push_back(i);
        return v;
    }
    // Loop positions are lasso_to .. n-2; states[n-1] repeats states[lasso_to].
    const std::size_t j = *t.lasso_to;
    const std::size_t loop = n - 1 - j;
    const std::size_t copies = depth + 2;
    for (std::size_t i = 0; i < j; ++i)
        v.orig.push_back(i);
    for (std::size_t c = 0; c < copies; ++c)
        for (std::size_t i = 0; i < loop; ++i)
            v.orig.push_back(j + i);
    v.lasso = true;
    v.cycle_start = j + (copies - 1) * loop;
    return v;
}

class Labeler {
public:
    explicit Labeler(const View& v) : view_(v) {}

    const Label& label(const Formula::Node& n)
    {
        if (auto it = memo_.find(&n); it != memo_.end())
            return it->second;
        Label out = compute(n);
        return memo_.emplace(&n, std::move(out)).first->second;
    }

private:
    Label compute(const Formula::Node& n)
    {
        const std::size_t m = view_.size();
        Label out(m, kUndef);
        switch (n.kind) {
        case NodeKind::constant:
            std::ranges::fill(out, n.value ? 1 : 0);
            break;
        case NodeKind::state_atom:
            for (std::size_t p = 0; p < m; ++p)
                out[p] = n.state_pred(view_.state(p)) ? 1 : 0;
            break;
        case NodeKind::step_atom:
            for (std::size_t p = 0; p < m; ++p) {
                auto q = view_.succ(p);
                if (!q)
                    continue;
                const auto& e = view_.trace->events[view_.orig[p]];
                out[p] = n.step_pred(view_.state(p), e, view_.state(*q)) ? 1 : 0;
            }
            break;
        case NodeKind::negation: {
            const auto& a = label(*n.children[0]);
            for (std::size_t p = 0; p < m; ++p)
                out[p] = a[p] == kUndef ? kUndef : static_cast<std::int8_t>(1 - a[p]);
            break;
        }
        case NodeKind::conjunction:
        case NodeKind::disjunction: {
            const bool conj = n.kind == NodeKind::conjunction;
            std::ranges::fill(out, conj ? 1 : 0);
            for (const auto& c : n.children) {
                const auto& a = label(*c);
                for (std::size_t p = 0; p < m; ++p) {
                    if (out[p] == kUndef || a[p] == kUndef)
                        out[p] = kUndef;
                    else
                        out[p] = conj ? (out[p] & a[p]) : (out[p] | a[p]);
                }
            }
            break;
        }
        case NodeKind::always:
        case NodeKind::eventually:
            future(out, n);
            break;
        case NodeKind::once:
        case NodeKind::historically: {
            const auto& a = label(*n.children[0]);
            const bool hist = n.kind == NodeKind::historically;
            bool acc = hist;
            for (std::size_t p = 0; p < m; ++p) {
                if (a[p] != kUndef)
                    acc = hist ? (acc && a[p] == 1) : (acc || a[p] == 1);
                out[p] = acc ? 1 : 0;
            }
            break;
        }
        case NodeKind::releases:
            future(out, n);
            break;
        }
        return out;
    }

    // Backward pass for always / eventually / releases. Undefined operand
    // positions are skipped. On a lasso the value entering the last copy is
    // found by iterating from the extremal guess until it is stable.
    void future(Label& out, const Formula::Node& n)
    {
        const std::size_t m = view_.size();
        const Label* a = &label(*n.children[0]);
        const Label* b = n.children.size() > 1 ? &label(*n.children[1]) : nullptr;
        auto step = [&](std::size_t p, bool next) {
            switch (n.kind) {
            case NodeKind::always:
                return (*a)[p] == kUndef ? next : ((*a)[p] == 1 && next);
            case NodeKind::eventually:
                return (*a)[p] == kUndef ? next : ((*a)[p] == 1 || next);
            default: {
                // a = trigger, b = held
                if ((*a)[p] == kUndef || (*b)[p] == kUndef)
                    return next;
                return (*b)[p] == 1 && ((*a)[p] == 1 || next);
            }
            }
        };
        const bool greatest = n.kind != NodeKind::eventually;
        bool tail = greatest;
        if (view_.lasso) {
            for (int iter = 0; iter < 3; ++iter) {
                bool next = tail;
                for (std::size_t p = m; p-- > view_.cycle_start;)
                    next = step(p, next);
                if (next == tail)
                    break;
                tail = next;
            }
        }
        bool next = tail;
        for (std::size_t p = m; p-- > 0;) {
            next = step(p, next);
            out[p] = next ? 1 : 0;
        }
    }

    const View& view_;
    std::unordered_map<const Formula::Node*, Label> memo_;
};

} // namespace

Formula Formula::state(StatePredicate p)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::state_atom;
    n->state_pred = std::move(p);
    return Formula(n);
}

Formula Formula::step(StepPredicate p)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::step_atom;
    n->step_pred = std::move(p);
    return Formula(n);
}

Formula Formula::constant(bool value)
{
    auto n = std::make_shared<Node>();
    n->kind = NodeKind::constant;
    n->value = value;
    return Formula(n);
}

Formula operator!(const Formula& f)
{
    return Formula(make_node(NodeKind::negation, {f.node_}));
}

Formula operator&&(const Formula& a, const Formula& b)
{
    return Formula(make_node(NodeKind::conjunction, {a.node_, b.node_}));
}

Formula operator||(const Formula& a, const Formula& b)
{
    return Formula(make_node(NodeKind::disjunction, {a.node_, b.node_}));
}

Formula implies(const Formula& a, const Formula& b)
{
    return !a || b;
}

Formula all_of(std::vector<Formula> fs)
{
    std::vector<NodePtr> kids;
    for (auto& f : fs)
        kids.push_back(f.node_);
    return Formula(make_node(NodeKind::conjunction, std::move(kids)));
}

Formula any_of(std::vector<Formula> fs)
{
    std::vector<NodePtr> kids;
    for (auto& f : fs)
        kids.push_back(f.node_);
    return Formula(make_node(NodeKind::disjunction, std::move(kids)));
}

Formula always(const Formula& f)
{
    return Formula(make_node(NodeKind::always, {f.node_}));
}

Formula eventually(const Formula& f)
{
    return Formula(make_node(NodeKind::eventually, {f.node_}));
}

Formula once(const Formula& f)
{
    return Formula(make_node(NodeKind::once, {f.node_}));
}

Formula historically(const Formula& f)
{
    return Formula(make_node(NodeKind::historically, {f.node_}));
}

Formula releases(const Formula& trigger, const Formula& held)
{
    return Formula(make_node(NodeKind::releases, {trigger.node_, held.node_}));
}

void check_shape(const Trace& t)
{
    if (t.states.empty())
        throw precondition_violation("trace has no states");
    if (t.states.size() != t.events.size() + 1)
        throw precondition_violation("trace must have exactly one event between consecutive states");
    for (const auto& e : t.events)
        check_shape(e);
    if (t.lasso_to) {
        if (*t.lasso_to + 1 >= t.states.size())
            throw precondition_violation("lasso target must precede the last state");
        if (t.states.back() != t.states[*t.lasso_to])
            throw precondition_violation("lasso target differs from the last state");
    }
}

std::optional<std::size_t> replay_mismatch(const Trace& t, const VariantConfig& v)
{
    check_shape(t);
    for (std::size_t i = 0; i < t.events.size(); ++i) {
        auto next = apply(t.states[i], t.events[i], v);
        if (!next || *next != t.states[i + 1])
            return i;
    }
    return std::nullopt;
}

std::optional<Trace> replay(const L1State& initial, const std::vector<Event>& events, const VariantConfig& v)
{
    Trace t;
    t.states.push_back(initial);
    for (const auto& e : events) {
        auto next = apply(t.states.back(), e, v);
        if (!next)
            return std::nullopt;
        t.events.push_back(e);
        t.states.push_back(std::move(*next));
    }
    return t;
}

Trace unrolled(const Trace& t, std::size_t k)
{
    check_shape(t);
    if (!t.lasso_to || k == 0)
        throw precondition_violation("unrolling needs a lasso and k >= 1");
    const std::size_t j = *t.lasso_to;
    Trace out;
    out.lasso_to = j;
    out.states.assign(t.states.begin(), t.states.begin() + static_cast<std::ptrdiff_t>(j) + 1);
    out.events.assign(t.events.begin(), t.events.begin() + static_cast<std::ptrdiff_t>(j));
    for (std::size_t c = 0; c < k; ++c) {
        if (c + 1 == k)
            out.lasso_to = out.states.size() - 1;
        for (std::size_t i = j; i + 1 < t.states.size(); ++i) {
            out.events.push_back(t.events[i]);
            out.states.push_back(t.states[i + 1]);
        }
    }
    return out;
}

std::vector<std::optional<bool>> evaluate_positions(const Formula& f, const Trace& t)
{
    check_shape(t);
    std::unordered_map<const Formula::Node*, std::size_t> memo;
    const View view = make_view(t, past_depth(f.node(), memo));
    Labeler labeler(view);
    const Label& l = labeler.label(f.node());

    // Original position i maps to view position i (also for lasso traces,
    // where the last state sits at the start of the second loop copy).
    std::vector<std::optional<bool>> out(t.states.size());
    for (std::size_t i = 0; i < t.states.size(); ++i)
        if (l[i] != kUndef)
            out[i] = l[i] == 1;
    return out;
}

bool eval_at(const Formula& f, const Trace& t, std::size_t i)
{
    if (i >= t.states.size())
        throw precondition_violation("position beyond the end of the trace");
    auto values = evaluate_positions(f, t);
    if (!values[i])
        throw malformed_formula("primed formula evaluated at the last position of a finite trace");
    return *values[i];
}

namespace {
constexpr std::array<std::string_view, 4> kOutcomeNames = {
    "Holds", "Violated", "NoCounterexampleWithinBound", "ResourceLimitExceeded"};
}

std::string_view to_string(Outcome o)
{
    return kOutcomeNames.at(static_cast<std::size_t>(o));
}

std::optional<Outcome> outcome_by_name(std::string_view name)
{
    for (std::size_t i = 0; i < kOutcomeNames.size(); ++i)
        if (kOutcomeNames[i] == name)
            return static_cast<Outcome>(i);
    return std::nullopt;
}

} // namespace rollup
