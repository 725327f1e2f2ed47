#include "rollup/scenarios.hpp"

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
bool with_blacklist(const VariantConfig& v)
{
    return v.has_blacklist();
}

const std::vector<ScenarioSpec> kScenarios = {
    {ScenarioId::finalize_one, "finalize-one", "some block gets finalized", any_variant},
    {ScenarioId::freeze, "freeze", "the queue head becomes blacklisted", with_queue},
    {ScenarioId::double_blacklist_update, "double-blacklist-update",
     "an input is blacklisted while unfinalized and later finalized", with_blacklist},
};

} // namespace

const std::vector<ScenarioSpec>& scenarios()
{
    return kScenarios;
}

const ScenarioSpec* find_scenario(std::string_view name)
{
    for (const auto& s : kScenarios)
        if (s.name == name)
            return &s;
    return nullptr;
}

Formula scenario_goal(const ScenarioSpec& s, const ScopeConfig& scope)
{
    switch (s.id) {
    case ScenarioId::finalize_one:
        return eventually(Formula::state([](const L1State& st) { return !st.finalized_state.empty(); }));
    case ScenarioId::freeze:
        return eventually(Formula::state([](const L1State& st) { return is_frozen(st); }));
    case ScenarioId::double_blacklist_update: {
        std::vector<Formula> per_input;
        for (std::size_t id = 0; id < scope.max_inputs; ++id) {
            const auto x = static_cast<InputId>(id);
            auto barred = Formula::state([x](const L1State& st) {
                return st.blacklist.contains(x) && !derived_all_finalized_inputs(st).contains(x);
            });
            auto finalized =
                Formula::state([x](const L1State& st) { return derived_all_finalized_inputs(st).contains(x); });
            per_input.push_back(barred && eventually(finalized));
        }
        return eventually(any_of(std::move(per_input)));
    }
    }
    throw precondition_violation("unknown scenario");
}

PropertyVerdict evaluate(const ScenarioSpec& s, const Trace& t, const ScopeConfig& scope)
{
    PropertyVerdict v;
    if (eval_at(scenario_goal(s, scope), t, 0)) {
        v.outcome = Outcome::holds;
        v.violation_index = t.states.size() - 1;
        v.witness = t;
    }
    return v;
}

} // namespace rollup
