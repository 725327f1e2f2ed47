#include "rollup/domain.hpp"

#include <set>
#include <sstream>

namespace rollup {

std::vector<InputSet> InputSet::all_subsets(std::size_t n)
{
    if (n > kMaxInputs)
        throw config_error("too many inputs for a subset universe");
    std::vector<InputSet> out;
    out.reserve(std::size_t{1} << n);
    for (std::uint32_t m = 0; m < (1U << n); ++m)
        out.push_back(from_mask(m));
    return out;
}

std::vector<InputId> InputSet::elements() const
{
    std::vector<InputId> out;
    for (std::uint32_t m = mask_; m != 0; m &= m - 1)
        out.push_back(static_cast<InputId>(std::countr_zero(m)));
    return out;
}

Block::Block(std::initializer_list<InputId> ids) : Block(std::span<const InputId>(ids.begin(), ids.size())) {}

Block::Block(std::span<const InputId> ids)
{
    if (ids.size() > kMaxBlockSize)
        throw precondition_violation("block exceeds the maximum block size");
    InputSet seen;
    for (auto id : ids) {
        if (seen.contains(id))
            throw precondition_violation("block contains a duplicate input");
        seen.insert(id);
        inputs_[size_++] = id;
    }
}

bool Block::contains(InputId id) const
{
    return std::ranges::find(inputs(), id) != inputs().end();
}

InputSet Block::input_set() const
{
    InputSet s;
    for (auto id : inputs())
        s.insert(id);
    return s;
}

void ScopeConfig::validate() const
{
    if (max_inputs == 0 || max_block_size == 0 || max_steps == 0 || max_pending_claims == 0)
        throw config_error("scope bounds must all be at least 1");
    if (max_inputs > kMaxInputs)
        throw config_error("max_inputs exceeds " + std::to_string(kMaxInputs));
    if (max_block_size > kMaxBlockSize)
        throw config_error("max_block_size exceeds " + std::to_string(kMaxBlockSize));
    if (max_steps > kMaxStepsCap)
        throw config_error("max_steps exceeds " + std::to_string(kMaxStepsCap));
}

void VariantConfig::validate() const
{
    if ((blacklist_via_queue || upgradeability) && !forced_queue_enabled)
        throw config_error("blacklisting and upgradeability require the forced queue");
    if (flaw == Flaw::on_the_spot_blacklist && !forced_queue_enabled)
        throw config_error("on-the-spot blacklisting requires the forced queue");
    if (flaw == Flaw::timeout_only_upgrade && !upgradeability)
        throw config_error("timeout-only upgrade requires upgradeability");
}

namespace {

const std::vector<std::pair<std::string, VariantConfig>>& variant_table()
{
    static const std::vector<std::pair<std::string, VariantConfig>> table = [] {
        std::vector<std::pair<std::string, VariantConfig>> t;
        t.emplace_back("strawman", VariantConfig{});
        t.emplace_back("forced", VariantConfig{.forced_queue_enabled = true});
        t.emplace_back("blacklist", VariantConfig{.forced_queue_enabled = true, .blacklist_via_queue = true});
        t.emplace_back("upgrade", VariantConfig{.forced_queue_enabled = true, .upgradeability = true});
        t.emplace_back("upgrade-blacklist", VariantConfig{.forced_queue_enabled = true,
                                                          .blacklist_via_queue = true,
                                                          .upgradeability = true});
        t.emplace_back("naive-blacklist", VariantConfig{.forced_queue_enabled = true,
                                                        .blacklist_via_queue = true,
                                                        .flaw = Flaw::on_the_spot_blacklist});
        t.emplace_back("naive-upgrade", VariantConfig{.forced_queue_enabled = true,
                                                      .upgradeability = true,
                                                      .flaw = Flaw::timeout_only_upgrade});
        return t;
    }();
    return table;
}

} // namespace

std::optional<VariantConfig> variant_by_name(std::string_view name)
{
    for (const auto& [n, v] : variant_table())
        if (n == name)
            return v;
    return std::nullopt;
}

const std::vector<std::string>& variant_names()
{
    static const std::vector<std::string> names = [] {
        std::vector<std::string> out;
        for (const auto& entry : variant_table())
            out.push_back(entry.first);
        return out;
    }();
    return names;
}

std::string variant_name(const VariantConfig& v)
{
    for (const auto& [n, cfg] : variant_table()) {
        auto probe = v;
        probe.update_blacklist_during_upgrade = cfg.update_blacklist_during_upgrade;
        if (probe == cfg)
            return n;
    }
    return "custom";
}

bool has_duplicates(std::span<const Block> seq)
{
    std::set<Block> seen;
    for (const auto& b : seq)
        if (!seen.insert(b).second)
            return true;
    return false;
}

bool is_prefix(std::span<const Block> prefix, std::span<const Block> seq)
{
    return prefix.size() <= seq.size() && std::equal(prefix.begin(), prefix.end(), seq.begin());
}

bool contains_block(std::span<const Block> seq, const Block& b)
{
    return std::ranges::find(seq, b) != seq.end();
}

bool is_well_formed(const Claim& c)
{
    return !has_duplicates(c.state) && !contains_block(c.state, c.diff);
}

InputSet derived_all_finalized_inputs(const L1State& s)
{
    InputSet out;
    for (const auto& b : s.finalized_state)
        out |= b.input_set();
    return out;
}

InputSet derived_new_finalized_inputs(const L1State& prev, const L1State& next)
{
    if (!is_prefix(prev.finalized_state, next.finalized_state))
        throw precondition_violation("previous finalized state is not a prefix of the next");
    InputSet out;
    for (std::size_t i = prev.finalized_state.size(); i < next.finalized_state.size(); ++i)
        out |= next.finalized_state[i].input_set();
    return out;
}

InputSet head_tx(std::span<const ForcedEvent> queue)
{
    if (queue.empty())
        return {};
    if (const auto* fi = std::get_if<ForcedInput>(&queue.front()))
        return InputSet{fi->tx};
    return {};
}

std::optional<std::size_t> index_of(std::span<const ForcedEvent> queue, const ForcedEvent& f)
{
    auto it = std::ranges::find(queue, f);
    if (it == queue.end())
        return std::nullopt;
    return static_cast<std::size_t>(it - queue.begin());
}

std::vector<std::string> invariant_violations(const L1State& s, const ScopeConfig& scope)
{
    std::vector<std::string> problems;
    const InputSet pool = InputSet::from_mask((1U << scope.max_inputs) - 1U);
    auto check_block = [&](const Block& b, const char* where) {
        if (b.size() > scope.max_block_size)
            problems.push_back(std::string(where) + ": block larger than max_block_size");
        if (!b.input_set().is_subset_of(pool))
            problems.push_back(std::string(where) + ": block input outside the pool");
    };

    if (has_duplicates(s.finalized_state))
        problems.emplace_back("finalized_state contains a duplicate block");
    for (const auto& b : s.finalized_state)
        check_block(b, "finalized_state");

    for (const auto* claims : {&s.commitments, &s.proofs}) {
        for (const auto& c : *claims) {
            if (!is_well_formed(c))
                problems.emplace_back("claim violates its invariants: " + to_string(c));
            check_block(c.diff, "claim diff");
        }
    }

    std::set<ForcedEvent> queued;
    for (const auto& f : s.forced_queue) {
        if (!queued.insert(f).second)
            problems.emplace_back("forced_queue contains a duplicate event");
        if (const auto* fi = std::get_if<ForcedInput>(&f)) {
            if (!pool.contains(fi->tx))
                problems.emplace_back("forced input outside the pool");
        } else if (!std::get<BlacklistPolicy>(f).predicate.is_subset_of(pool)) {
            problems.emplace_back("policy predicate outside the pool");
        }
    }

    if (!s.blacklist.is_subset_of(pool))
        problems.emplace_back("blacklist outside the pool");
    if (s.ongoing_upgrade && !s.ongoing_upgrade->policy.predicate.is_subset_of(pool))
        problems.emplace_back("announcement predicate outside the pool");
    for (const auto& a : s.timed_out)
        if (!a.policy.predicate.is_subset_of(pool))
            problems.emplace_back("timed-out announcement predicate outside the pool");
    return problems;
}

std::string to_string(InputSet s)
{
    std::string out = "{";
    bool first = true;
    for (auto id : s.elements()) {
        if (!first)
            out += ",";
        out += std::to_string(id);
        first = false;
    }
    return out + "}";
}

std::string to_string(const Block& b)
{
    std::string out = "B(";
    for (std::size_t i = 0; i < b.size(); ++i) {
        if (i != 0)
            out += ",";
        out += std::to_string(b.inputs()[i]);
    }
    return out + ")";
}

std::string to_string(std::span<const Block> seq)
{
    std::string out = "[";
    for (std::size_t i = 0; i < seq.size(); ++i) {
        if (i != 0)
            out += ",";
        out += to_string(seq[i]);
    }
    return out + "]";
}

std::string to_string(const Claim& c)
{
    return "C(" + to_string(c.state) + "," + to_string(c.diff) + ")";
}

std::string to_string(const ForcedEvent& f)
{
    if (const auto* fi = std::get_if<ForcedInput>(&f))
        return "F(" + std::to_string(fi->tx) + ")";
    return "P" + to_string(std::get<BlacklistPolicy>(f).predicate);
}

std::string to_string(const UpgradeAnnouncement& a)
{
    return "A" + to_string(a.policy.predicate);
}

std::string to_string(const L1State& s)
{
    std::ostringstream os;
    os << "finalized=" << to_string(s.finalized_state) << " commitments={";
    bool first = true;
    for (const auto& c : s.commitments) {
        os << (first ? "" : ",") << to_string(c);
        first = false;
    }
    os << "} proofs={";
    first = true;
    for (const auto& c : s.proofs) {
        os << (first ? "" : ",") << to_string(c);
        first = false;
    }
    os << "} queue=[";
    first = true;
    for (const auto& f : s.forced_queue) {
        os << (first ? "" : ",") << to_string(f);
        first = false;
    }
    os << "] blacklist=" << to_string(s.blacklist) << " ongoing="
       << (s.ongoing_upgrade ? to_string(*s.ongoing_upgrade) : std::string("none")) << " timed_out={";
    first = true;
    for (const auto& a : s.timed_out) {
        os << (first ? "" : ",") << to_string(a);
        first = false;
    }
    os << "}";
    return os.str();
}

} // namespace rollup
