#pragma once

#include <cstddef>
#include <span>
#include <string>
#include <string_view>
#include <vector>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"

namespace fatws::model {

inline constexpr std::size_t kDefaultBlockSize = 8;
inline constexpr char kFill = '\0';

/// A block is a string of exactly block-size characters.
using Block = std::string;

/// Splits text into ceil(len/block_size) blocks; the last one is zero-filled.
std::vector<Block> make_blocks(std::string_view text, std::size_t block_size);

/// Concatenates blocks and keeps the first `length` characters. Fails with
/// bad_length unless the blocks are exactly the ones needed for `length`.
Expected<std::string, Error> unmake_blocks(std::span<const Block> blocks, std::size_t length);

inline std::size_t blocks_needed(std::size_t length, std::size_t block_size) {
  return (length + block_size - 1) / block_size;
}

/// Replaces [start, start+len(text)) of `old`; a gap past the end is zero-filled.
std::string splice(std::string_view old, std::size_t start, std::string_view text);

}  // namespace fatws::model
