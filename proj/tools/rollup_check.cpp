// rollup-check: bounded checking, scenario search and fuzzing of the rollup
// contract models.
//
// Exit codes: 0 holds / witness found / fuzz clean, 1 violation found,
// 2 usage, configuration or golden mismatch, 3 state cap exceeded.

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "rollup/report.hpp"

namespace fs = std::filesystem;
using namespace rollup;

namespace {

constexpr int kExitOk = 0;
constexpr int kExitViolation = 1;
constexpr int kExitUsage = 2;
constexpr int kExitResource = 3;

constexpr const char* kOutputDirEnv = "ROLLUP_CHECK_OUTPUT_DIR";

struct Options {
    std::string variant;
    std::string property;
    std::vector<std::string> properties;
    std::string scenario;
    ScopeConfig scope;
    bool no_update_during_upgrade = false;
    std::uint64_t seed = 42;
    std::size_t traces = 10'000;
    std::optional<std::size_t> max_len;
    std::string format = "text";
    std::string output;
    std::string golden;
    std::size_t max_states = ExplorerOptions{}.max_states;
    std::string strategy;
};

class usage_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

VariantConfig resolve_variant(const Options& o)
{
    if (o.variant.empty())
        throw usage_error("--variant is required");
    auto v = variant_by_name(o.variant);
    if (!v)
        throw usage_error("unknown variant: " + o.variant);
    if (o.no_update_during_upgrade)
        v->update_blacklist_during_upgrade = false;
    return *v;
}

ExplorerOptions explorer_options(const Options& o)
{
    ExplorerOptions opts;
    opts.max_states = o.max_states;
    if (o.strategy == "full")
        opts.strategy = Strategy::full;
    else if (o.strategy == "claims-on-demand")
        opts.strategy = Strategy::claims_on_demand;
    return opts;
}

int exit_code(Outcome o)
{
    switch (o) {
    case Outcome::violated:
        return kExitViolation;
    case Outcome::resource_limit_exceeded:
        return kExitResource;
    case Outcome::holds:
    case Outcome::no_counterexample_within_bound:
        break;
    }
    return kExitOk;
}

// Writes the rendered report to --output, or to stdout. With the output
// directory variable set, relative paths resolve against it and a report
// without --output is also saved there under `default_name`.
void emit(const Options& o, const std::string& rendered, const std::string& default_name)
{
    const char* dir = std::getenv(kOutputDirEnv);
    std::optional<fs::path> path;
    if (!o.output.empty()) {
        path = fs::path(o.output);
        if (dir != nullptr && *dir != '\0' && path->is_relative())
            path = fs::path(dir) / *path;
    } else if (dir != nullptr && *dir != '\0') {
        std::cout << rendered;
        path = fs::path(dir) / (default_name + (o.format == "json" ? ".json" : ".txt"));
    }
    if (!path) {
        std::cout << rendered;
        return;
    }
    if (path->has_parent_path())
        fs::create_directories(path->parent_path());
    std::ofstream out(*path, std::ios::binary);
    if (!out)
        throw std::runtime_error("cannot write " + path->string());
    out << rendered;
}

std::string render(const Options& o, const Json& j, const std::string& text)
{
    return o.format == "json" ? j.dump(2) + "\n" : text;
}

int golden(const Options& o)
{
    std::ifstream in(o.golden, std::ios::binary);
    if (!in)
        throw usage_error("cannot read golden file " + o.golden);
    StoredVerdict stored;
    try {
        stored = stored_verdict_from_json(Json::parse(in));
    } catch (const nlohmann::json::exception& e) {
        std::cerr << "golden mismatch: " << e.what() << "\n";
        return kExitUsage;
    } catch (const report_error& e) {
        std::cerr << "golden mismatch: " << e.what() << "\n";
        return kExitUsage;
    }
    if (auto diff = golden_mismatch(stored, explorer_options(o))) {
        std::cerr << "golden mismatch: " << *diff << "\n";
        return kExitUsage;
    }
    std::cout << "golden ok: " << variant_name(stored.request.variant) << " " << stored.request.target << " "
              << to_string(stored.outcome);
    if (stored.violation_index)
        std::cout << " at position " << *stored.violation_index;
    std::cout << "\n";
    return exit_code(stored.outcome);
}

int check_or_run(const Options& o, Mode mode)
{
    if (!o.golden.empty())
        return golden(o);
    CheckRequest req;
    req.variant = resolve_variant(o);
    req.scope = o.scope;
    req.mode = mode;
    req.target = mode == Mode::check ? o.property : o.scenario;
    if (req.target.empty())
        throw usage_error(mode == Mode::check ? "--property is required" : "--scenario is required");
    const auto result = execute(req, explorer_options(o));
    emit(o, render(o, check_report(req, result), check_text(req, result)),
         std::string(mode == Mode::check ? "check-" : "run-") + o.variant + "-" + req.target);
    return exit_code(result.verdict.outcome);
}

int fuzz_cmd(const Options& o)
{
    FuzzConfig cfg;
    cfg.variant = resolve_variant(o);
    cfg.scope = o.scope;
    cfg.seed = o.seed;
    cfg.num_traces = o.traces;
    cfg.max_len = o.max_len.value_or(o.scope.max_steps);
    std::vector<const PropertySpec*> props;
    if (o.properties.empty()) {
        props = applicable_properties(cfg.variant);
    } else {
        for (const auto& name : o.properties) {
            const auto* p = find_property(name);
            if (p == nullptr)
                throw usage_error("unknown property: " + name);
            props.push_back(p);
        }
    }
    const auto report = fuzz(cfg, props);
    emit(o, render(o, fuzz_report(cfg, report), fuzz_text(cfg, report)),
         "fuzz-" + o.variant + "-" + std::to_string(o.seed));
    return report.violations.empty() ? kExitOk : kExitViolation;
}

int list_cmd(const Options& o)
{
    Json j = Json::object();
    std::ostringstream text;
    j["variants"] = variant_names();
    text << "variants:\n";
    for (const auto& v : variant_names())
        text << "  " << v << "\n";
    j["properties"] = Json::array();
    text << "properties:\n";
    for (const auto& p : catalog()) {
        Json item = Json::object();
        item["name"] = std::string(p.name);
        item["kind"] = p.kind == PropertyKind::safety ? "safety" : "liveness";
        item["title"] = std::string(p.title);
        item["variants"] = Json::array();
        std::string applies;
        for (const auto& v : variant_names()) {
            if (applies_to(p, *variant_by_name(v))) {
                item["variants"].push_back(v);
                applies += (applies.empty() ? "" : ", ") + v;
            }
        }
        j["properties"].push_back(std::move(item));
        text << "  " << p.name << " (" << (p.kind == PropertyKind::safety ? "safety" : "liveness") << ") "
             << p.title << "\n      variants: " << applies << "\n";
    }
    j["scenarios"] = Json::array();
    text << "scenarios:\n";
    for (const auto& s : scenarios()) {
        Json item = Json::object();
        item["name"] = std::string(s.name);
        item["summary"] = std::string(s.summary);
        j["scenarios"].push_back(std::move(item));
        text << "  " << s.name << ": " << s.summary << "\n";
    }
    std::cout << render(o, j, text.str());
    return kExitOk;
}

void add_scope(CLI::App* cmd, Options& o)
{
    cmd->add_option("--variant", o.variant, "Model variant (see `list`)");
    cmd->add_option("--inputs", o.scope.max_inputs, "Number of distinct inputs")->capture_default_str();
    cmd->add_option("--block-size", o.scope.max_block_size, "Maximum inputs per block")->capture_default_str();
    cmd->add_option("--claims", o.scope.max_pending_claims, "Maximum pending commitments plus proofs")
        ->capture_default_str();
    cmd->add_option("--steps", o.scope.max_steps, "Maximum trace length")->capture_default_str();
    cmd->add_flag("--no-blacklist-update-during-upgrade", o.no_update_during_upgrade,
                  "Disable update_blacklist while an upgrade is ongoing");
    cmd->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}))
        ->capture_default_str();
    cmd->add_option("--output", o.output, "Write the report to this file");
}

void add_search(CLI::App* cmd, Options& o)
{
    cmd->add_option("--max-states", o.max_states, "Abort after this many stored search nodes")
        ->capture_default_str();
    cmd->add_option("--strategy", o.strategy, "Search strategy")
        ->check(CLI::IsMember({"full", "claims-on-demand"}));
    cmd->add_option("--golden", o.golden, "Replay a stored JSON report and re-verify its verdict");
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Bounded model checker and fuzzer for rollup L1 contract models"};
    app.set_version_flag("--version", std::string(kToolVersion));
    app.require_subcommand(1);
    Options o;

    auto* check = app.add_subcommand("check", "Search for a shortest counterexample to a property");
    add_scope(check, o);
    add_search(check, o);
    check->add_option("--property", o.property, "Property name (see `list`)");

    auto* run = app.add_subcommand("run", "Search for a shortest trace reaching a scenario goal");
    add_scope(run, o);
    add_search(run, o);
    run->add_option("--scenario", o.scenario, "Scenario name (see `list`)");

    auto* fz = app.add_subcommand("fuzz", "Random traces checked against the safety properties");
    add_scope(fz, o);
    fz->add_option("--property", o.properties, "Restrict to these properties (repeatable)");
    fz->add_option("--seed", o.seed, "Generator seed")->capture_default_str();
    fz->add_option("--traces", o.traces, "Number of random traces")->capture_default_str();
    fz->add_option("--max-len", o.max_len, "Events per trace (default: --steps)");

    auto* list = app.add_subcommand("list", "Print variants, properties and scenarios");
    list->add_option("--format", o.format, "Output format")->check(CLI::IsMember({"text", "json"}));

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int rc = app.exit(e);
        return rc == 0 ? kExitOk : kExitUsage;
    }

    try {
        if (*check)
            return check_or_run(o, Mode::check);
        if (*run)
            return check_or_run(o, Mode::run);
        if (*fz)
            return fuzz_cmd(o);
        return list_cmd(o);
    } catch (const usage_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const config_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    } catch (const report_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return kExitUsage;
    }
}
