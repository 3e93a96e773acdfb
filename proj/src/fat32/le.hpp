#pragma once

#include <cstddef>
#include <cstdint>
#include <span>

namespace fatws::fat32::le {

inline std::uint16_t load16(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint16_t>(b[off] | (b[off + 1] << 8));
}

inline std::uint32_t load32(std::span<const std::uint8_t> b, std::size_t off) {
  return static_cast<std::uint32_t>(b[off]) | (static_cast<std::uint32_t>(b[off + 1]) << 8) |
         (static_cast<std::uint32_t>(b[off + 2]) << 16) | (static_cast<std::uint32_t>(b[off + 3]) << 24);
}

inline void store16(std::span<std::uint8_t> b, std::size_t off, std::uint16_t v) {
  b[off] = static_cast<std::uint8_t>(v);
  b[off + 1] = static_cast<std::uint8_t>(v >> 8);
}

inline void store32(std::span<std::uint8_t> b, std::size_t off, std::uint32_t v) {
  for (int k = 0; k < 4; ++k) b[off + k] = static_cast<std::uint8_t>(v >> (8 * k));
}

}  // namespace fatws::fat32::le
