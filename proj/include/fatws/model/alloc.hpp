#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"

namespace fatws::model {

/// One mark per disk block; true means used.
using AllocationVector = std::vector<bool>;

/// Lowest-index-first choice of n free blocks, or nullopt if fewer exist.
std::optional<std::vector<std::size_t>> find_n_free_blocks(const AllocationVector& alv,
                                                           std::size_t n);

Expected<AllocationVector, Error> set_indices(AllocationVector alv,
                                              std::span<const std::size_t> indices, bool value);

std::size_t count_free_blocks(const AllocationVector& alv);

inline constexpr std::uint32_t kEocFloor = 0x0FFFFFF8;
inline constexpr std::uint32_t kEocWrite = 0x0FFFFFFF;
inline constexpr std::size_t kFirstDataIndex = 2;

/// Abstract file allocation table. Entry 0 = free; an entry at or above
/// eoc_floor ends a chain; anything else names the next index.
struct FaTable {
  std::vector<std::uint32_t> entries;
  std::uint32_t eoc_floor = kEocFloor;

  std::size_t size() const { return entries.size(); }
  bool is_eoc(std::uint32_t v) const { return v >= eoc_floor; }

  friend bool operator==(const FaTable&, const FaTable&) = default;
};

/// Non-zero entries (and the two reserved ones) map to used.
AllocationVector fa_table_to_alv(const FaTable& fat);

/// Follows the chain from `first`. The chain must hold at least
/// ceil(length/block_size) indices.
Expected<std::vector<std::size_t>, Error> l6_file_index_list(const FaTable& fat, std::size_t first,
                                                             std::size_t length,
                                                             std::size_t block_size);

}  // namespace fatws::model
