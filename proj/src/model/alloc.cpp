#include "fatws/model/alloc.hpp"

#include <algorithm>
#include <unordered_set>

namespace fatws::model {

std::optional<std::vector<std::size_t>> find_n_free_blocks(const AllocationVector& alv,
                                                           std::size_t n) {
  std::vector<std::size_t> out;
  out.reserve(n);
  for (std::size_t i = 0; i < alv.size() && out.size() < n; ++i)
    if (!alv[i]) out.push_back(i);
  if (out.size() < n) return std::nullopt;
  return out;
}

Expected<AllocationVector, Error> set_indices(AllocationVector alv,
                                              std::span<const std::size_t> indices, bool value) {
  for (auto i : indices)
    if (i >= alv.size()) return Unexpected{Error::index_out_of_range};
  for (auto i : indices) alv[i] = value;
  return alv;
}

std::size_t count_free_blocks(const AllocationVector& alv) {
  return static_cast<std::size_t>(std::count(alv.begin(), alv.end(), false));
}

AllocationVector fa_table_to_alv(const FaTable& fat) {
  AllocationVector alv(fat.size());
  for (std::size_t i = 0; i < fat.size(); ++i) alv[i] = i < kFirstDataIndex || fat.entries[i] != 0;
  return alv;
}

Expected<std::vector<std::size_t>, Error> l6_file_index_list(const FaTable& fat, std::size_t first,
                                                             std::size_t length,
                                                             std::size_t block_size) {
  std::vector<std::size_t> chain;
  std::unordered_set<std::size_t> seen;
  std::size_t cur = first;
  while (true) {
    if (cur < kFirstDataIndex || cur >= fat.size() || !seen.insert(cur).second)
      return Unexpected{Error::bad_chain};
    chain.push_back(cur);
    auto next = fat.entries[cur];
    if (next == 0) return Unexpected{Error::bad_chain};
    if (fat.is_eoc(next)) break;
    cur = next;
  }
  if (chain.size() * block_size < length) return Unexpected{Error::bad_chain};
  return chain;
}

}  // namespace fatws::model
