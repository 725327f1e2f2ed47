// Acceptance run: one PASS/FAIL line per criterion, exit status 1 if any fails.

#include <sys/wait.h>

#include <chrono>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <set>
#include <string>
#include <variant>
#include <vector>

#include <fmt/core.h>

#include "rollup/explorer.hpp"
#include "rollup/fuzz.hpp"
#include "rollup/report.hpp"
#include "rollup/scenarios.hpp"
#include "support.hpp"

using namespace rollup;
namespace fs = std::filesystem;

namespace {

// Pinned limits.
constexpr double kSweepSeconds = 15 * 60;
constexpr double kOnTheSpotSeconds = 10;
constexpr double kTimeoutOnlySeconds = 30;
constexpr std::size_t kOnTheSpotLength = 2;
constexpr std::size_t kTimeoutOnlyLength = 4;
constexpr std::size_t kScenarioMaxLength = 10;
constexpr std::size_t kFuzzTraces = 10'000;
constexpr std::uint64_t kFuzzSeed = 42;

const ScopeConfig kAcceptance{.max_inputs = 3, .max_block_size = 2, .max_steps = 8, .max_pending_claims = 4};
const ScopeConfig kMicro{.max_inputs = 1, .max_block_size = 1, .max_steps = 4, .max_pending_claims = 4};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start)
{
    return std::chrono::duration<double>(Clock::now() - start).count();
}

struct Criterion {
    bool ok = true;
    std::vector<std::string> notes;

    void require(bool cond, const std::string& what)
    {
        if (!cond) {
            ok = false;
            notes.push_back("failed: " + what);
        }
    }
    void note(const std::string& s) { notes.push_back(s); }
};

int failures = 0;

void report(int n, const std::string& title, const Criterion& c)
{
    std::cout << (c.ok ? "PASS " : "FAIL ") << n << " " << title << "\n";
    for (const auto& s : c.notes)
        std::cout << "    " << s << "\n";
    std::cout.flush();
    if (!c.ok)
        ++failures;
}

VariantConfig variant(std::string_view name)
{
    return *variant_by_name(name);
}

// Reports written for the golden replay of criterion 8.
std::vector<std::pair<fs::path, int>> goldens;
fs::path work_dir;

void save_golden(const std::string& name, const CheckRequest& req, const CheckResult& r)
{
    const auto path = work_dir / (name + ".json");
    std::ofstream(path, std::ios::binary) << check_report(req, r).dump(2) << "\n";
    goldens.emplace_back(path, r.verdict.outcome == Outcome::violated ? 1 : 0);
}

std::string event_kinds(const Trace& t)
{
    std::string out;
    for (const auto& e : t.events)
        out += (out.empty() ? "" : " ") + std::string(to_string(e.kind));
    return out;
}

void criterion1()
{
    Criterion c;
    const auto start = Clock::now();
    std::size_t checks = 0;
    for (const auto* name : {"strawman", "forced", "blacklist", "upgrade", "upgrade-blacklist"}) {
        const auto v = variant(name);
        const auto props = applicable_properties(v);
        const auto t0 = Clock::now();
        const auto results = check_all(v, kAcceptance, props);
        for (std::size_t i = 0; i < props.size(); ++i) {
            ++checks;
            c.require(results[i].verdict.outcome == Outcome::no_counterexample_within_bound,
                      fmt::format("{} {} -> {}", name, props[i]->name, to_string(results[i].verdict.outcome)));
        }
        c.note(fmt::format("{}: {} properties, {:.1f} s", name, props.size(), seconds_since(t0)));
    }
    const auto elapsed = seconds_since(start);
    c.require(elapsed < kSweepSeconds, fmt::format("sweep took {:.1f} s", elapsed));
    c.note(fmt::format("{} checks, {:.1f} s total (limit {:.0f} s)", checks, elapsed, kSweepSeconds));
    report(1, "safe variants hold every applicable property at scope 3/2/4/8", c);
}

void criterion2()
{
    Criterion c;
    const auto start = Clock::now();
    for (const auto* prop : {"BP3", "FREEZE"}) {
        const CheckRequest req{variant("naive-blacklist"), kAcceptance, prop, Mode::check};
        const auto r = check(req);
        c.require(r.verdict.outcome == Outcome::violated, fmt::format("{} not violated", prop));
        if (!r.verdict.witness)
            continue;
        const auto& t = *r.verdict.witness;
        c.require(t.length() == kOnTheSpotLength, fmt::format("{} length {}", prop, t.length()));
        const bool shape = t.length() == 2 && t.events[0].kind == EventKind::receive_forced &&
                           std::holds_alternative<ForcedInput>(std::get<ForcedEvent>(t.events[0].params)) &&
                           t.events[1].kind == EventKind::admin_set_blacklist;
        c.require(shape, fmt::format("{} trace is {}", prop, event_kinds(t)));
        if (shape) {
            const auto tx = std::get<ForcedInput>(std::get<ForcedEvent>(t.events[0].params)).tx;
            c.require(std::get<InputSet>(t.events[1].params) == InputSet{tx},
                      fmt::format("{} blacklists a different input", prop));
        }
        c.note(fmt::format("{}: {}", prop, event_kinds(t)));
        save_golden(fmt::format("check-naive-blacklist-{}", prop), req, r);
    }
    const auto elapsed = seconds_since(start);
    c.require(elapsed < kOnTheSpotSeconds, fmt::format("took {:.2f} s", elapsed));
    c.note(fmt::format("{:.2f} s (limit {:.0f} s)", elapsed, kOnTheSpotSeconds));
    report(2, "on-the-spot blacklisting: BP3 and FREEZE violated in 2 transitions", c);
}

void criterion3()
{
    Criterion c;
    const auto start = Clock::now();
    auto scope = kAcceptance;
    scope.max_inputs = 1;
    const CheckRequest req{variant("naive-upgrade"), scope, "FREEZE", Mode::check};
    const auto r = check(req);
    const auto elapsed = seconds_since(start);
    c.require(r.verdict.outcome == Outcome::violated, "FREEZE not violated");
    if (r.verdict.witness) {
        const auto& t = *r.verdict.witness;
        c.require(t.length() == kTimeoutOnlyLength, fmt::format("length {}", t.length()));
        const std::vector<EventKind> fig{EventKind::receive_forced, EventKind::upgrade_init,
                                         EventKind::upgrade_timeout, EventKind::upgrade_deploy};
        std::vector<EventKind> got;
        for (const auto& e : t.events)
            got.push_back(e.kind);
        c.require(got == fig, "trace is " + event_kinds(t));
        c.require(is_frozen(t.states.back()), "final state is not frozen");
        c.note(event_kinds(t));
        save_golden("check-naive-upgrade-FREEZE", req, r);
    }
    c.require(elapsed < kTimeoutOnlySeconds, fmt::format("took {:.2f} s", elapsed));
    c.note(fmt::format("{:.2f} s (limit {:.0f} s)", elapsed, kTimeoutOnlySeconds));
    report(3, "timeout-only upgrade: FREEZE violated in 4 transitions", c);
}

void criterion4()
{
    Criterion c;
    const auto start = Clock::now();
    const CheckRequest req{variant("upgrade-blacklist"), kAcceptance, "freeze", Mode::run};
    const auto r = run(req);
    c.require(r.verdict.outcome == Outcome::no_counterexample_within_bound && !r.verdict.witness,
              fmt::format("outcome {}", to_string(r.verdict.outcome)));
    c.note(fmt::format("{} states, {:.1f} s", r.stats.states, seconds_since(start)));
    save_golden("run-upgrade-blacklist-freeze", req, r);
    report(4, "safe upgrade: no frozen state reachable within 8 steps", c);
}

void criterion5()
{
    Criterion c;
    const auto start = Clock::now();
    auto scope = kAcceptance;
    scope.max_steps = kScenarioMaxLength;
    const CheckRequest req{variant("upgrade-blacklist"), scope, "double-blacklist-update", Mode::run};
    const auto r = run(req);
    c.require(r.verdict.outcome == Outcome::holds && r.verdict.witness.has_value(), "no witness");
    if (r.verdict.witness) {
        const auto& t = *r.verdict.witness;
        c.require(t.length() <= kScenarioMaxLength, fmt::format("length {}", t.length()));
        c.require(!replay_mismatch(t, req.variant), "witness does not replay");
        const auto* sc = find_scenario("double-blacklist-update");
        c.require(evaluate(*sc, t, scope).outcome == Outcome::holds, "witness does not satisfy the goal");
        c.note(fmt::format("{} transitions: {}", t.length(), event_kinds(t)));
        save_golden("run-upgrade-blacklist-double-blacklist-update", req, r);
    }
    c.note(fmt::format("{:.1f} s", seconds_since(start)));
    report(5, "double blacklist update witness within 10 transitions", c);
}

const FuzzViolation* violation_of(const FuzzReport& r, std::string_view name)
{
    for (const auto& v : r.violations)
        if (v.property == name)
            return &v;
    return nullptr;
}

std::vector<std::pair<FuzzConfig, FuzzReport>> fuzz_runs;

void criterion6()
{
    Criterion c;
    const auto start = Clock::now();
    auto run_fuzz = [&](std::string_view name) {
        FuzzConfig cfg;
        cfg.seed = kFuzzSeed;
        cfg.num_traces = kFuzzTraces;
        cfg.variant = variant(name);
        cfg.scope = kAcceptance;
        cfg.max_len = kAcceptance.max_steps;
        const auto props = applicable_properties(cfg.variant);
        const auto first = fuzz(cfg, props);
        const auto second = fuzz(cfg, props);
        const auto a = fuzz_report(cfg, first).dump(2);
        c.require(a == fuzz_report(cfg, second).dump(2), fmt::format("{}: reports differ between runs", name));
        c.require(fuzz_text(cfg, first) == fuzz_text(cfg, second), fmt::format("{}: text differs", name));
        fuzz_runs.emplace_back(cfg, first);
        std::string found;
        for (const auto& v : first.violations)
            found += fmt::format(" {}:{}", v.property, v.shrunk.length());
        c.note(fmt::format("{}: {} traces, violations{}", name, first.traces_run, found.empty() ? " none" : found));
        return first;
    };

    const auto safe = run_fuzz("upgrade-blacklist");
    c.require(safe.violations.empty(), "upgrade-blacklist has violations");
    c.require(safe.traces_run == kFuzzTraces, "upgrade-blacklist ran too few traces");

    const auto blacklist = run_fuzz("naive-blacklist");
    for (const auto* prop : {"BP3", "FREEZE"}) {
        const auto* v = violation_of(blacklist, prop);
        c.require(v != nullptr, fmt::format("naive-blacklist {} not found", prop));
        if (v)
            c.require(v->shrunk.length() == kOnTheSpotLength,
                      fmt::format("naive-blacklist {} shrinks to {}", prop, v->shrunk.length()));
    }

    const auto upgrade = run_fuzz("naive-upgrade");
    const auto* v = violation_of(upgrade, "FREEZE");
    c.require(v != nullptr, "naive-upgrade FREEZE not found");
    if (v)
        c.require(v->shrunk.length() == kTimeoutOnlyLength,
                  fmt::format("naive-upgrade FREEZE shrinks to {}", v->shrunk.length()));
    c.note(fmt::format("{:.1f} s", seconds_since(start)));
    report(6, "fuzzing: safe variant clean, flaws shrink to minimal length, reports reproducible", c);
}

void criterion7()
{
    Criterion c;
    const auto start = Clock::now();
    std::size_t checks = 0;
    for (const auto& name : variant_names()) {
        const auto v = variant(name);
        const auto mine = reachable(TransitionSystem(kMicro, v), kMicro.max_steps);
        const auto theirs = oracle::enumerate(kMicro, v, kMicro.max_steps);
        const std::set<std::string> states(mine.states.begin(), mine.states.end());
        c.require(states == theirs.states,
                  fmt::format("{}: {} states vs {} from the oracle", name, states.size(), theirs.states.size()));
        c.require(mine.sequences_by_length == theirs.sequences, name + ": sequence counts differ");
        c.require(theirs.compaction_failures == 0,
                  fmt::format("{}: {} compaction failures", name, theirs.compaction_failures));
        checks += theirs.compaction_checks;
        c.note(fmt::format("{}: {} states", name, states.size()));
    }
    c.require(checks > 0, "no rollup step was checked");
    c.note(fmt::format("{} rollup steps checked against the queue constraints, {:.1f} s", checks,
                       seconds_since(start)));
    report(7, "micro scope: explorer states equal brute-force enumeration", c);
}

int exit_status(int raw)
{
    return WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
}

void criterion8(const std::string& cli)
{
    Criterion c;
    for (const auto& [cfg, r] : fuzz_runs) {
        for (const auto& v : r.violations) {
            const CheckRequest req{cfg.variant, cfg.scope, v.property, Mode::check};
            CheckResult res;
            res.verdict = PropertyVerdict{Outcome::violated, v.violation_index, v.shrunk};
            save_golden(fmt::format("fuzz-{}-{}", variant_name(cfg.variant), v.property), req, res);
        }
    }
    for (const auto& [path, expected] : goldens) {
        const auto cmd = fmt::format("\"{}\" check --golden \"{}\" > /dev/null 2>&1", cli, path.string());
        const int rc = exit_status(std::system(cmd.c_str()));
        c.require(rc == expected, fmt::format("{} exited {} (expected {})", path.filename().string(), rc, expected));
    }
    // A tampered copy must be rejected.
    if (!goldens.empty()) {
        std::ifstream in(goldens.front().first);
        auto j = Json::parse(in);
        j["violation_index"] = 0;
        const auto bad = work_dir / "tampered.json";
        std::ofstream(bad) << j.dump(2);
        const int rc = exit_status(std::system(
            fmt::format("\"{}\" check --golden \"{}\" > /dev/null 2>&1", cli, bad.string()).c_str()));
        c.require(rc == 2, fmt::format("tampered report exited {}", rc));
    }
    c.require(goldens.size() >= 5, "too few reports");
    c.note(fmt::format("{} reports replayed through {} --golden", goldens.size(), fs::path(cli).filename().string()));
    report(8, "every emitted trace replays through --golden to the same verdict", c);
}

} // namespace

int main(int argc, char** argv)
{
    const std::string cli = argc > 1 ? argv[1] : "rollup-check";
    work_dir = argc > 2 ? fs::path(argv[2]) : fs::temp_directory_path() / "rollup-acceptance";
    fs::create_directories(work_dir);

    criterion1();
    criterion2();
    criterion3();
    criterion4();
    criterion5();
    criterion6();
    criterion7();
    criterion8(cli);

    std::cout << (failures == 0 ? "all criteria passed" : fmt::format("{} criteria failed", failures)) << "\n";
    return failures == 0 ? 0 : 1;
}
