#include "rollup/report.hpp"

#include <fmt/format.h>

#include "rollup/encoding.hpp"

namespace rollup {

namespace {

InputId id_from_json(const Json& j)
{
    const auto v = j.get<std::int64_t>();
    if (v < 0 || v >= static_cast<std::int64_t>(kMaxInputs))
        throw report_error("input id out of range: " + j.dump());
    return static_cast<InputId>(v);
}

InputSet set_from_json(const Json& j)
{
    InputSet s;
    for (const auto& e : j)
        s.insert(id_from_json(e));
    return s;
}

Block block_from_json(const Json& j)
{
    std::vector<InputId> ids;
    for (const auto& e : j)
        ids.push_back(id_from_json(e));
    try {
        return Block(std::span<const InputId>(ids));
    } catch (const precondition_violation& e) {
        throw report_error(std::string("bad block: ") + e.what());
    }
}

Json blocks_json(std::span<const Block> seq)
{
    Json out = Json::array();
    for (const auto& b : seq)
        out.push_back(to_json(b));
    return out;
}

BlockSeq blocks_from_json(const Json& j)
{
    BlockSeq out;
    for (const auto& b : j)
        out.push_back(block_from_json(b));
    return out;
}

Claim claim_from_json(const Json& j)
{
    return Claim{blocks_from_json(j.at("state")), block_from_json(j.at("diff"))};
}

Json announcement_json(const UpgradeAnnouncement& a)
{
    Json out = Json::object();
    out["predicate"] = to_json(a.policy.predicate);
    return out;
}

UpgradeAnnouncement announcement_from_json(const Json& j)
{
    return UpgradeAnnouncement{BlacklistPolicy{set_from_json(j.at("predicate"))}};
}

ForcedEvent forced_from_json(const Json& j)
{
    const auto type = j.at("type").get<std::string>();
    if (type == "input")
        return ForcedInput{id_from_json(j.at("tx"))};
    if (type == "policy")
        return BlacklistPolicy{set_from_json(j.at("predicate"))};
    throw report_error("unknown forced event type: " + type);
}

Json variant_json(const VariantConfig& v)
{
    return variant_name(v);
}

std::optional<std::size_t> optional_index(const Json& j)
{
    if (j.is_null())
        return std::nullopt;
    return j.get<std::size_t>();
}

std::string outcome_line(const PropertyVerdict& v)
{
    std::string out(to_string(v.outcome));
    if (v.violation_index)
        out += fmt::format(" at position {}", *v.violation_index);
    return out;
}

void append_trace_text(std::string& out, const Trace& t)
{
    out += fmt::format("trace ({} events{}):\n", t.length(),
                       t.lasso_to ? fmt::format(", loops back to position {}", *t.lasso_to) : "");
    out += fmt::format("  0  {}\n", to_string(t.states[0]));
    for (std::size_t i = 0; i < t.length(); ++i) {
        out += fmt::format("     -- {}\n", to_string(t.events[i]));
        out += fmt::format("  {}  {}\n", i + 1, to_string(t.states[i + 1]));
    }
}

std::string scope_text(const ScopeConfig& s)
{
    return fmt::format("inputs={} block-size={} steps={} claims={}", s.max_inputs, s.max_block_size, s.max_steps,
                       s.max_pending_claims);
}

} // namespace

Json to_json(InputSet s)
{
    Json out = Json::array();
    for (auto id : s.elements())
        out.push_back(id);
    return out;
}

Json to_json(const Block& b)
{
    Json out = Json::array();
    for (auto id : b.inputs())
        out.push_back(id);
    return out;
}

Json to_json(const Claim& c)
{
    Json out = Json::object();
    out["state"] = blocks_json(c.state);
    out["diff"] = to_json(c.diff);
    return out;
}

Json to_json(const ForcedEvent& f)
{
    Json out = Json::object();
    if (const auto* in = std::get_if<ForcedInput>(&f)) {
        out["type"] = "input";
        out["tx"] = in->tx;
    } else {
        out["type"] = "policy";
        out["predicate"] = to_json(std::get<BlacklistPolicy>(f).predicate);
    }
    return out;
}

Json to_json(const L1State& s)
{
    Json out = Json::object();
    out["finalized_state"] = blocks_json(s.finalized_state);
    out["commitments"] = Json::array();
    for (const auto& c : s.commitments)
        out["commitments"].push_back(to_json(c));
    out["proofs"] = Json::array();
    for (const auto& p : s.proofs)
        out["proofs"].push_back(to_json(p));
    out["forced_queue"] = Json::array();
    for (const auto& f : s.forced_queue)
        out["forced_queue"].push_back(to_json(f));
    out["blacklist"] = to_json(s.blacklist);
    out["ongoing_upgrade"] = s.ongoing_upgrade ? announcement_json(*s.ongoing_upgrade) : Json(nullptr);
    out["timed_out"] = Json::array();
    for (const auto& a : s.timed_out)
        out["timed_out"].push_back(announcement_json(a));
    return out;
}

Json to_json(const Event& e)
{
    Json params = Json::object();
    switch (e.kind) {
    case EventKind::receive_commitment:
        params["commitment"] = to_json(std::get<Claim>(e.params));
        break;
    case EventKind::receive_proof:
        params["proof"] = to_json(std::get<Claim>(e.params));
        break;
    case EventKind::rollup_process: {
        const auto& r = std::get<RollupParams>(e.params);
        params["commitment"] = to_json(r.commitment);
        params["proof"] = to_json(r.proof);
        break;
    }
    case EventKind::receive_forced:
        params["forced"] = to_json(std::get<ForcedEvent>(e.params));
        break;
    case EventKind::update_blacklist:
        params["predicate"] = to_json(std::get<BlacklistPolicy>(e.params).predicate);
        break;
    case EventKind::upgrade_init:
        params["announcement"] = announcement_json(std::get<UpgradeAnnouncement>(e.params));
        break;
    case EventKind::admin_set_blacklist:
        params["blacklist"] = to_json(std::get<InputSet>(e.params));
        break;
    case EventKind::upgrade_timeout:
    case EventKind::upgrade_deploy:
    case EventKind::stutter:
        break;
    }
    Json out = Json::object();
    out["kind"] = std::string(to_string(e.kind));
    out["params"] = std::move(params);
    return out;
}

Json to_json(const ScopeConfig& s)
{
    Json out = Json::object();
    out["max_inputs"] = s.max_inputs;
    out["max_block_size"] = s.max_block_size;
    out["max_steps"] = s.max_steps;
    out["max_pending_claims"] = s.max_pending_claims;
    return out;
}

Json to_json(const Trace& t)
{
    Json out = Json::object();
    out["length"] = t.length();
    out["lasso_to"] = t.lasso_to ? Json(*t.lasso_to) : Json(nullptr);
    out["initial_state"] = to_json(t.states.at(0));
    out["steps"] = Json::array();
    for (std::size_t i = 0; i < t.length(); ++i) {
        Json step = Json::object();
        step["event"] = to_json(t.events[i]);
        step["state"] = to_json(t.states[i + 1]);
        out["steps"].push_back(std::move(step));
    }
    return out;
}

L1State state_from_json(const Json& j)
{
    L1State s;
    s.finalized_state = blocks_from_json(j.at("finalized_state"));
    for (const auto& c : j.at("commitments"))
        s.commitments.insert(claim_from_json(c));
    for (const auto& p : j.at("proofs"))
        s.proofs.insert(claim_from_json(p));
    for (const auto& f : j.at("forced_queue"))
        s.forced_queue.push_back(forced_from_json(f));
    s.blacklist = set_from_json(j.at("blacklist"));
    if (const auto& u = j.at("ongoing_upgrade"); !u.is_null())
        s.ongoing_upgrade = announcement_from_json(u);
    for (const auto& a : j.at("timed_out"))
        s.timed_out.insert(announcement_from_json(a));
    return s;
}

Event event_from_json(const Json& j)
{
    const auto name = j.at("kind").get<std::string>();
    const auto kind = event_kind_by_name(name);
    if (!kind)
        throw report_error("unknown event kind: " + name);
    const auto& p = j.at("params");
    switch (*kind) {
    case EventKind::receive_commitment:
        return Event::receive_commitment(claim_from_json(p.at("commitment")));
    case EventKind::receive_proof:
        return Event::receive_proof(claim_from_json(p.at("proof")));
    case EventKind::rollup_process:
        return Event::rollup_process(claim_from_json(p.at("commitment")), claim_from_json(p.at("proof")));
    case EventKind::receive_forced:
        return Event::receive_forced(forced_from_json(p.at("forced")));
    case EventKind::update_blacklist:
        return Event::update_blacklist(BlacklistPolicy{set_from_json(p.at("predicate"))});
    case EventKind::upgrade_init:
        return Event::upgrade_init(announcement_from_json(p.at("announcement")));
    case EventKind::upgrade_timeout:
        return Event::upgrade_timeout();
    case EventKind::upgrade_deploy:
        return Event::upgrade_deploy();
    case EventKind::admin_set_blacklist:
        return Event::admin_set_blacklist(set_from_json(p.at("blacklist")));
    case EventKind::stutter:
        return Event::stutter();
    }
    throw report_error("unhandled event kind: " + name);
}

ScopeConfig scope_from_json(const Json& j)
{
    ScopeConfig s;
    s.max_inputs = j.at("max_inputs").get<std::size_t>();
    s.max_block_size = j.at("max_block_size").get<std::size_t>();
    s.max_steps = j.at("max_steps").get<std::size_t>();
    s.max_pending_claims = j.at("max_pending_claims").get<std::size_t>();
    return s;
}

Trace trace_from_json(const Json& j, const VariantConfig& v)
{
    Trace t;
    try {
        t.states.push_back(state_from_json(j.at("initial_state")));
        for (const auto& step : j.at("steps")) {
            t.events.push_back(event_from_json(step.at("event")));
            t.states.push_back(state_from_json(step.at("state")));
        }
        t.lasso_to = optional_index(j.at("lasso_to"));
        if (j.at("length").get<std::size_t>() != t.length())
            throw report_error("trace length does not match its steps");
    } catch (const nlohmann::json::exception& e) {
        throw report_error(std::string("malformed trace: ") + e.what());
    }
    try {
        check_shape(t);
    } catch (const precondition_violation& e) {
        throw report_error(std::string("bad trace shape: ") + e.what());
    }
    if (t.states[0] != initial_state())
        throw report_error("trace does not start from the initial state");
    if (auto bad = replay_mismatch(t, v))
        throw report_error(fmt::format("event {} does not reproduce the recorded state", *bad));
    return t;
}

std::string encoding_hex(const L1State& s)
{
    std::string out;
    for (unsigned char c : canonical_encode(s))
        out += fmt::format("{:02x}", c);
    return out;
}

Json check_report(const CheckRequest& req, const CheckResult& result)
{
    const auto& v = result.verdict;
    Json out = Json::object();
    out["tool"] = std::string(kToolName);
    out["version"] = std::string(kToolVersion);
    out["command"] = req.mode == Mode::check ? "check" : "run";
    out["variant"] = variant_json(req.variant);
    out["update_blacklist_during_upgrade"] = req.variant.update_blacklist_during_upgrade;
    out["scope"] = to_json(req.scope);
    out[req.mode == Mode::check ? "property" : "scenario"] = req.target;
    out["outcome"] = std::string(to_string(v.outcome));
    out["violation_index"] = v.violation_index ? Json(*v.violation_index) : Json(nullptr);
    Json stats = Json::object();
    stats["strategy"] = std::string(to_string(result.stats.strategy));
    stats["projected"] = result.stats.projected;
    stats["states"] = result.stats.states;
    stats["transitions"] = result.stats.transitions;
    out["stats"] = std::move(stats);
    if (v.witness) {
        out["trace"] = to_json(*v.witness);
        out["final_state_encoding"] = encoding_hex(v.witness->states.back());
    } else {
        out["trace"] = nullptr;
        out["final_state_encoding"] = nullptr;
    }
    return out;
}

Json fuzz_report(const FuzzConfig& cfg, const FuzzReport& report)
{
    Json out = Json::object();
    out["tool"] = std::string(kToolName);
    out["version"] = std::string(kToolVersion);
    out["command"] = "fuzz";
    out["variant"] = variant_json(cfg.variant);
    out["update_blacklist_during_upgrade"] = cfg.variant.update_blacklist_during_upgrade;
    out["scope"] = to_json(cfg.scope);
    out["seed"] = cfg.seed;
    out["num_traces"] = cfg.num_traces;
    out["max_len"] = cfg.max_len;
    out["properties"] = report.properties;
    out["traces_run"] = report.traces_run;
    out["steps_run"] = report.steps_run;
    out["outcome"] = report.violations.empty() ? "Clean" : "Violated";
    out["violations"] = Json::array();
    for (const auto& v : report.violations) {
        Json item = Json::object();
        item["property"] = v.property;
        item["outcome"] = std::string(to_string(Outcome::violated));
        item["trace_number"] = v.trace_number;
        item["original_length"] = v.original_length;
        item["violation_index"] = v.violation_index;
        item["trace"] = to_json(v.shrunk);
        item["final_state_encoding"] = encoding_hex(v.shrunk.states.back());
        out["violations"].push_back(std::move(item));
    }
    return out;
}

std::string check_text(const CheckRequest& req, const CheckResult& result)
{
    std::string out = fmt::format("{} {}\n", kToolName, kToolVersion);
    out += fmt::format("variant: {}{}\n", variant_name(req.variant),
                       req.variant.update_blacklist_during_upgrade ? "" : " (no blacklist updates during upgrades)");
    out += fmt::format("scope: {}\n", scope_text(req.scope));
    out += fmt::format("{}: {}\n", req.mode == Mode::check ? "property" : "scenario", req.target);
    out += fmt::format("outcome: {}\n", outcome_line(result.verdict));
    out += fmt::format("explored: {} states, {} transitions ({}{})\n", result.stats.states, result.stats.transitions,
                       to_string(result.stats.strategy), result.stats.projected ? ", projected" : "");
    if (result.verdict.witness)
        append_trace_text(out, *result.verdict.witness);
    return out;
}

std::string fuzz_text(const FuzzConfig& cfg, const FuzzReport& report)
{
    std::string out = fmt::format("{} {}\n", kToolName, kToolVersion);
    out += fmt::format("variant: {}\n", variant_name(cfg.variant));
    out += fmt::format("scope: {}\n", scope_text(cfg.scope));
    out += fmt::format("fuzz: seed={} traces={} max-len={} ({} traces, {} steps run)\n", cfg.seed, cfg.num_traces,
                       cfg.max_len, report.traces_run, report.steps_run);
    out += fmt::format("outcome: {}\n", report.violations.empty() ? "Clean" : "Violated");
    for (const auto& v : report.violations) {
        out += fmt::format("\n{}: Violated at position {} (trace #{}, shrunk from {} to {} events)\n", v.property,
                           v.violation_index, v.trace_number, v.original_length, v.shrunk.length());
        append_trace_text(out, v.shrunk);
    }
    return out;
}

StoredVerdict stored_verdict_from_json(const Json& j)
{
    try {
        StoredVerdict out;
        const auto command = j.at("command").get<std::string>();
        if (command != "check" && command != "run")
            throw report_error("golden files must hold a check or run report, not " + command);
        out.request.mode = command == "check" ? Mode::check : Mode::run;
        const auto name = j.at("variant").get<std::string>();
        auto v = variant_by_name(name);
        if (!v)
            throw report_error("unknown variant: " + name);
        out.request.variant = *v;
        out.request.variant.update_blacklist_during_upgrade = j.at("update_blacklist_during_upgrade").get<bool>();
        out.request.scope = scope_from_json(j.at("scope"));
        out.request.target = j.at(out.request.mode == Mode::check ? "property" : "scenario").get<std::string>();
        const auto outcome = j.at("outcome").get<std::string>();
        auto o = outcome_by_name(outcome);
        if (!o)
            throw report_error("unknown outcome: " + outcome);
        out.outcome = *o;
        out.violation_index = optional_index(j.at("violation_index"));
        if (const auto& t = j.at("trace"); !t.is_null())
            out.trace = trace_from_json(t, out.request.variant);
        if (const auto& e = j.at("final_state_encoding"); !e.is_null())
            out.final_state_encoding = e.get<std::string>();
        return out;
    } catch (const nlohmann::json::exception& e) {
        throw report_error(std::string("malformed report: ") + e.what());
    }
}

std::optional<std::string> golden_mismatch(const StoredVerdict& stored, const ExplorerOptions& opts)
{
    const auto& req = stored.request;
    PropertyVerdict verdict;
    if (stored.trace) {
        if (req.mode == Mode::check) {
            const auto* p = find_property(req.target);
            if (p == nullptr)
                return "unknown property " + req.target;
            verdict = evaluate(*p, *stored.trace, req.scope);
        } else {
            const auto* s = find_scenario(req.target);
            if (s == nullptr)
                return "unknown scenario " + req.target;
            verdict = evaluate(*s, *stored.trace, req.scope);
        }
        const auto hex = encoding_hex(stored.trace->states.back());
        if (stored.final_state_encoding != hex)
            return "final state encoding differs: recorded " + stored.final_state_encoding.value_or("none") +
                   ", replayed " + hex;
    } else {
        verdict = execute(req, opts).verdict;
        if (verdict.witness)
            return "the search now finds a trace where the report has none";
    }
    if (verdict.outcome != stored.outcome)
        return fmt::format("outcome differs: recorded {}, replayed {}", to_string(stored.outcome),
                           to_string(verdict.outcome));
    if (verdict.violation_index != stored.violation_index)
        return "violation index differs";
    return std::nullopt;
}

} // namespace rollup
