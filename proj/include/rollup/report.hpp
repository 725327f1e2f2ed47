#pragma once

#include <optional>
#include <stdexcept>
#include <string>

#include <json.hpp>

#include "rollup/explorer.hpp"
#include "rollup/fuzz.hpp"

namespace rollup {

inline constexpr std::string_view kToolName = "rollup-check";
inline constexpr std::string_view kToolVersion = "1.0.0";

/// Field order is insertion order, so serialized reports are stable.
using Json = nlohmann::ordered_json;

/// Malformed or inconsistent report documents.
class report_error : public std::runtime_error {
public:
    using std::runtime_error::runtime_error;
};

[[nodiscard]] Json to_json(InputSet s);
[[nodiscard]] Json to_json(const Block& b);
[[nodiscard]] Json to_json(const Claim& c);
[[nodiscard]] Json to_json(const ForcedEvent& f);
[[nodiscard]] Json to_json(const L1State& s);
[[nodiscard]] Json to_json(const Event& e);
[[nodiscard]] Json to_json(const ScopeConfig& s);
/// {length, lasso_to, initial_state, steps: [{event, state}, ...]}
[[nodiscard]] Json to_json(const Trace& t);

[[nodiscard]] L1State state_from_json(const Json& j);
[[nodiscard]] Event event_from_json(const Json& j);
[[nodiscard]] ScopeConfig scope_from_json(const Json& j);
/// Reads a trace and checks that its events reproduce its states under `v`.
[[nodiscard]] Trace trace_from_json(const Json& j, const VariantConfig& v);

/// Lowercase hex of the canonical encoding.
[[nodiscard]] std::string encoding_hex(const L1State& s);

[[nodiscard]] Json check_report(const CheckRequest& req, const CheckResult& result);
[[nodiscard]] Json fuzz_report(const FuzzConfig& cfg, const FuzzReport& report);

[[nodiscard]] std::string check_text(const CheckRequest& req, const CheckResult& result);
[[nodiscard]] std::string fuzz_text(const FuzzConfig& cfg, const FuzzReport& report);

/// A stored check or run report, as needed to re-verify it.
struct StoredVerdict {
    CheckRequest request;
    Outcome outcome = Outcome::no_counterexample_within_bound;
    std::optional<std::size_t> violation_index;
    std::optional<Trace> trace;
    std::optional<std::string> final_state_encoding;
};

[[nodiscard]] StoredVerdict stored_verdict_from_json(const Json& j);

/// Replays a stored report and re-derives its verdict: the trace is
/// re-evaluated when present, otherwise the search is repeated. Returns a
/// description of the first disagreement, or std::nullopt when it matches.
[[nodiscard]] std::optional<std::string> golden_mismatch(const StoredVerdict& stored,
                                                         const ExplorerOptions& opts = {});

} // namespace rollup
