#pragma once

#include <functional>
#include <memory>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include "rollup/transitions.hpp"

namespace rollup {

/// States joined by events; optionally closed into a lasso whose final state
/// revisits states[*lasso_to].
struct Trace {
    std::vector<L1State> states;
    std::vector<Event> events;
    std::optional<std::size_t> lasso_to;

    [[nodiscard]] std::size_t length() const { return events.size(); }
    [[nodiscard]] bool is_lasso() const { return lasso_to.has_value(); }
};

/// Shape check: |states| = |events| + 1 and a well-formed lasso marker.
/// Throws precondition_violation.
void check_shape(const Trace& t);

/// First position whose event does not reproduce the next state under the
/// variant, or std::nullopt if the trace replays.
[[nodiscard]] std::optional<std::size_t> replay_mismatch(const Trace& t, const VariantConfig& v);

/// Rebuilds states from an initial state and a list of events. Returns
/// std::nullopt if some event is not enabled.
[[nodiscard]] std::optional<Trace> replay(const L1State& initial, const std::vector<Event>& events,
                                          const VariantConfig& v);

/// The lasso with its loop written out k times (k >= 1); same infinite word.
[[nodiscard]] Trace unrolled(const Trace& t, std::size_t k);

/// A primed formula evaluated where no successor exists.
class malformed_formula : public std::logic_error {
public:
    using std::logic_error::logic_error;
};

/// Temporal formula over traces: state and step atoms, boolean connectives,
/// future (always, eventually, releases) and past (once, historically)
/// operators. Step atoms read the successor state, i.e. they are primed.
class Formula {
public:
    using StatePredicate = std::function<bool(const L1State&)>;
    using StepPredicate = std::function<bool(const L1State& pre, const Event& e, const L1State& post)>;

    struct Node;

    static Formula state(StatePredicate p);
    static Formula step(StepPredicate p);
    static Formula constant(bool value);

    friend Formula operator!(const Formula& f);
    friend Formula operator&&(const Formula& a, const Formula& b);
    friend Formula operator||(const Formula& a, const Formula& b);

    [[nodiscard]] const Node& node() const { return *node_; }

private:
    explicit Formula(std::shared_ptr<const Node> n) : node_(std::move(n)) {}
    std::shared_ptr<const Node> node_;

    friend Formula implies(const Formula& a, const Formula& b);
    friend Formula all_of(std::vector<Formula> fs);
    friend Formula any_of(std::vector<Formula> fs);
    friend Formula always(const Formula& f);
    friend Formula eventually(const Formula& f);
    friend Formula once(const Formula& f);
    friend Formula historically(const Formula& f);
    friend Formula releases(const Formula& trigger, const Formula& held);
};

Formula implies(const Formula& a, const Formula& b);
Formula all_of(std::vector<Formula> fs);
Formula any_of(std::vector<Formula> fs);
Formula always(const Formula& f);
Formula eventually(const Formula& f);
Formula once(const Formula& f);
Formula historically(const Formula& f);
/// `trigger releases held`: held at every position up to and including the
/// first one where trigger holds; if trigger never holds, held everywhere.
Formula releases(const Formula& trigger, const Formula& held);

/// Truth value of `f` at every position of `t` (nullopt where a primed
/// subformula has no successor). Lasso traces use infinite-word semantics.
[[nodiscard]] std::vector<std::optional<bool>> evaluate_positions(const Formula& f, const Trace& t);

/// Throws malformed_formula when `f` is undefined at i.
[[nodiscard]] bool eval_at(const Formula& f, const Trace& t, std::size_t i);

enum class Outcome : std::uint8_t { holds, violated, no_counterexample_within_bound, resource_limit_exceeded };

[[nodiscard]] std::string_view to_string(Outcome o);
[[nodiscard]] std::optional<Outcome> outcome_by_name(std::string_view name);

struct PropertyVerdict {
    Outcome outcome = Outcome::no_counterexample_within_bound;
    std::optional<std::size_t> violation_index;
    std::optional<Trace> witness;
};

} // namespace rollup
