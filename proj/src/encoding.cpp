#include "rollup/encoding.hpp"

#include <array>

namespace rollup {

namespace {

void put_u8(std::string& out, std::size_t v)
{
    if (v > 0xFF)
        throw precondition_violation("value too large for canonical encoding");
    out.push_back(static_cast<char>(v));
}

void put_set(std::string& out, InputSet s)
{
    auto ids = s.elements();
    put_u8(out, ids.size());
    for (auto id : ids)
        put_u8(out, id);
}

void put_block(std::string& out, const Block& b)
{
    put_u8(out, b.size());
    for (auto id : b.inputs())
        put_u8(out, id);
}

void put_blocks(std::string& out, std::span<const Block> seq)
{
    put_u8(out, seq.size());
    for (const auto& b : seq)
        put_block(out, b);
}

void put_claims(std::string& out, const ClaimSet& claims)
{
    put_u8(out, claims.size());
    for (const auto& c : claims) {
        put_blocks(out, c.state);
        put_block(out, c.diff);
    }
}

std::size_t get_u8(std::string_view in, std::size_t& pos)
{
    if (pos >= in.size())
        throw precondition_violation("truncated canonical encoding");
    return static_cast<unsigned char>(in[pos++]);
}

InputSet get_set(std::string_view in, std::size_t& pos)
{
    InputSet s;
    const auto n = get_u8(in, pos);
    for (std::size_t i = 0; i < n; ++i)
        s.insert(static_cast<InputId>(get_u8(in, pos)));
    return s;
}

Block get_block(std::string_view in, std::size_t& pos)
{
    const auto n = get_u8(in, pos);
    if (n > kMaxBlockSize)
        throw precondition_violation("encoded block too long");
    std::array<InputId, kMaxBlockSize> ids{};
    for (std::size_t i = 0; i < n; ++i)
        ids[i] = static_cast<InputId>(get_u8(in, pos));
    return Block(std::span<const InputId>(ids.data(), n));
}

ClaimSet get_claims(std::string_view in, std::size_t& pos)
{
    ClaimSet out;
    const auto n = get_u8(in, pos);
    for (std::size_t i = 0; i < n; ++i) {
        Claim c;
        c.state = decode_blocks(in, pos);
        c.diff = get_block(in, pos);
        out.insert(out.end(), std::move(c));
    }
    return out;
}

} // namespace

InputSet decode_input_set(std::string_view bytes, std::size_t& pos)
{
    return get_set(bytes, pos);
}

BlockSeq decode_blocks(std::string_view bytes, std::size_t& pos)
{
    BlockSeq seq;
    const auto n = get_u8(bytes, pos);
    seq.reserve(n);
    for (std::size_t i = 0; i < n; ++i)
        seq.push_back(get_block(bytes, pos));
    return seq;
}

L1State decode_state(std::string_view in, std::size_t& pos)
{
    L1State s;
    s.finalized_state = decode_blocks(in, pos);
    s.commitments = get_claims(in, pos);
    s.proofs = get_claims(in, pos);
    const auto q = get_u8(in, pos);
    s.forced_queue.reserve(q);
    for (std::size_t i = 0; i < q; ++i) {
        if (get_u8(in, pos) == 0)
            s.forced_queue.emplace_back(ForcedInput{static_cast<InputId>(get_u8(in, pos))});
        else
            s.forced_queue.emplace_back(BlacklistPolicy{get_set(in, pos)});
    }
    s.blacklist = get_set(in, pos);
    if (get_u8(in, pos) != 0)
        s.ongoing_upgrade = UpgradeAnnouncement{BlacklistPolicy{get_set(in, pos)}};
    const auto t = get_u8(in, pos);
    for (std::size_t i = 0; i < t; ++i)
        s.timed_out.insert(s.timed_out.end(), UpgradeAnnouncement{BlacklistPolicy{get_set(in, pos)}});
    return s;
}

L1State canonical_decode(std::string_view bytes)
{
    std::size_t pos = 0;
    L1State s = decode_state(bytes, pos);
    if (pos != bytes.size())
        throw precondition_violation("trailing bytes after canonical encoding");
    return s;
}

void append_encoding(std::string& out, InputSet s)
{
    put_set(out, s);
}

void append_encoding(std::string& out, std::span<const Block> seq)
{
    put_blocks(out, seq);
}

void append_encoding(std::string& out, const L1State& s)
{
    put_blocks(out, s.finalized_state);
    put_claims(out, s.commitments);
    put_claims(out, s.proofs);
    put_u8(out, s.forced_queue.size());
    for (const auto& f : s.forced_queue) {
        if (const auto* fi = std::get_if<ForcedInput>(&f)) {
            put_u8(out, 0);
            put_u8(out, fi->tx);
        } else {
            put_u8(out, 1);
            put_set(out, std::get<BlacklistPolicy>(f).predicate);
        }
    }
    put_set(out, s.blacklist);
    if (s.ongoing_upgrade) {
        put_u8(out, 1);
        put_set(out, s.ongoing_upgrade->policy.predicate);
    } else {
        put_u8(out, 0);
    }
    put_u8(out, s.timed_out.size());
    for (const auto& a : s.timed_out)
        put_set(out, a.policy.predicate);
}

std::string canonical_encode(const L1State& s)
{
    std::string out;
    out.reserve(64);
    append_encoding(out, s);
    return out;
}

} // namespace rollup
