#pragma once

#include <string>
#include <string_view>

#include "rollup/domain.hpp"

namespace rollup {

/// Byte-string key for an L1State: fixed field order, length-prefixed
/// sequences, set elements in sorted order. Injective over valid states and
/// independent of process, platform and insertion order.
[[nodiscard]] std::string canonical_encode(const L1State& s);

void append_encoding(std::string& out, const L1State& s);
void append_encoding(std::string& out, InputSet s);
void append_encoding(std::string& out, std::span<const Block> seq);

/// Reads one encoded state starting at `pos` and advances `pos` past it.
/// Throws precondition_violation on truncated or malformed input.
[[nodiscard]] L1State decode_state(std::string_view bytes, std::size_t& pos);
[[nodiscard]] L1State canonical_decode(std::string_view bytes);

[[nodiscard]] InputSet decode_input_set(std::string_view bytes, std::size_t& pos);
[[nodiscard]] BlockSeq decode_blocks(std::string_view bytes, std::size_t& pos);

} // namespace rollup
