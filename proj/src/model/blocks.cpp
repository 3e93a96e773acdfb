#include "fatws/model/blocks.hpp"

#include <algorithm>

namespace fatws::model {

std::vector<Block> make_blocks(std::string_view text, std::size_t block_size) {
  std::vector<Block> blocks;
  blocks.reserve(blocks_needed(text.size(), block_size));
  for (std::size_t pos = 0; pos < text.size(); pos += block_size) {
    Block b(text.substr(pos, block_size));
    b.resize(block_size, kFill);
    blocks.push_back(std::move(b));
  }
  return blocks;
}

Expected<std::string, Error> unmake_blocks(std::span<const Block> blocks, std::size_t length) {
  std::size_t total = 0;
  for (const auto& b : blocks) total += b.size();
  if (length > total) return Unexpected{Error::bad_length};
  if (!blocks.empty() && length <= total - blocks.back().size()) return Unexpected{Error::bad_length};
  std::string out;
  out.reserve(total);
  for (const auto& b : blocks) out += b;
  out.resize(length);
  return out;
}

std::string splice(std::string_view old, std::size_t start, std::string_view text) {
  std::string out(old);
  if (out.size() < start + text.size()) out.resize(start + text.size(), kFill);
  std::copy(text.begin(), text.end(), out.begin() + static_cast<std::ptrdiff_t>(start));
  return out;
}

}  // namespace fatws::model
