#include "fatws/model/levels.hpp"

#include <algorithm>
#include <set>
#include <unordered_set>

namespace fatws::model {

namespace {

std::optional<std::string> read_range(const std::optional<std::string>& contents, std::size_t start,
                                      std::size_t n) {
  if (!contents || start > contents->size() || n > contents->size() - start) return std::nullopt;
  return contents->substr(start, n);
}

std::optional<std::string> gather(const std::vector<Block>& disk, std::span<const std::size_t> indices,
                                  std::size_t length) {
  std::vector<Block> blocks;
  blocks.reserve(indices.size());
  for (auto i : indices) {
    if (i >= disk.size()) return std::nullopt;
    blocks.push_back(disk[i]);
  }
  auto text = unmake_blocks(blocks, length);
  if (!text) return std::nullopt;
  return std::move(*text);
}

// Blocks referenced by any file other than the one at `skip`.
template <class File>
std::unordered_set<std::size_t> referenced_except(const Node<File>& root, const Path& skip) {
  std::unordered_set<std::size_t> used;
  for_each_file(root, [&](const Path& p, const File& f) {
    if (p == skip) return;
    used.insert(f.blocks.begin(), f.blocks.end());
  });
  return used;
}

bool disk_shape_ok(const std::vector<Block>& disk, std::size_t block_size) {
  return block_size > 0 && std::all_of(disk.begin(), disk.end(),
                                       [&](const Block& b) { return b.size() == block_size; });
}

template <class File>
bool indexed_files_ok(const Node<File>& root, std::size_t disk_size, std::size_t block_size) {
  bool ok = true;
  for_each_file(root, [&](const Path&, const File& f) {
    if (f.blocks.size() != blocks_needed(f.length, block_size)) ok = false;
    for (auto i : f.blocks)
      if (i >= disk_size) ok = false;
  });
  return ok;
}

// Root/disk checks without the alv, shared by L3, L4 and L5.
template <class Fs>
bool well_formed_root(const Fs& fs) {
  return fs.root.is_dir() && disk_shape_ok(fs.disk, fs.block_size) &&
         indexed_files_ok(fs.root, fs.disk.size(), fs.block_size);
}

// Bounded-disk write shared by L4 and L5: free the target's blocks, take
// the lowest free ones for the new contents.
template <class Fs>
Expected<Fs, Error> bounded_write(const Fs& fs, const Path& path, std::size_t start,
                                  std::string_view text) {
  const auto* file = lookup_file(fs.root, path);
  if (file == nullptr) return Unexpected{Error::not_found};
  auto old = contents_of(fs, *file);
  if (!old) return Unexpected{Error::ill_formed};
  auto updated = splice(*old, start, text);
  auto blocks = make_blocks(updated, fs.block_size);

  auto alv = set_indices(fs.alv, file->blocks, false);
  if (!alv) return Unexpected{alv.error()};
  auto chosen = find_n_free_blocks(*alv, blocks.size());
  if (!chosen) return Unexpected{Error::no_space};

  Fs out = fs;
  out.alv = std::move(*set_indices(std::move(*alv), *chosen, true));
  for (std::size_t k = 0; k < blocks.size(); ++k) out.disk[(*chosen)[k]] = std::move(blocks[k]);
  auto* target = lookup(out.root, path)->as_file();
  target->blocks = std::move(*chosen);
  target->length = updated.size();
  return out;
}

template <class Fs>
bool stricter(const Fs& fs, const AllocationVector& alv) {
  if (!well_formed_root(fs) || alv.size() != fs.disk.size()) return false;
  auto all = l4_list_all_indices(fs);
  std::set<std::size_t> seen;
  for (auto i : all) {
    if (!seen.insert(i).second) return false;
    if (i >= alv.size() || !alv[i]) return false;
  }
  return true;
}

}  // namespace

L4Fs L4Fs::empty(std::size_t disk_blocks, std::size_t block_size) {
  L4Fs fs;
  fs.block_size = block_size;
  fs.disk.assign(disk_blocks, Block(block_size, kFill));
  fs.alv.assign(disk_blocks, false);
  return fs;
}

L6Fs L6Fs::empty(std::size_t disk_blocks, std::size_t block_size) {
  L6Fs fs;
  fs.block_size = block_size;
  fs.disk.assign(disk_blocks, Block(block_size, kFill));
  fs.fat.entries.assign(disk_blocks, 0);
  for (std::size_t i = 0; i < std::min(disk_blocks, kFirstDataIndex); ++i)
    fs.fat.entries[i] = kEocWrite;
  return fs;
}

const Node<L1File>* stat(const L1Fs& fs, const Path& path) { return lookup(fs.root, path); }
const Node<L2File>* stat(const L2Fs& fs, const Path& path) { return lookup(fs.root, path); }
const Node<L3File>* stat(const L3Fs& fs, const Path& path) { return lookup(fs.root, path); }
const Node<L3File>* stat(const L4Fs& fs, const Path& path) { return lookup(fs.root, path); }
const Node<L5File>* stat(const L5Fs& fs, const Path& path) { return lookup(fs.root, path); }
const Node<L6File>* stat(const L6Fs& fs, const Path& path) { return lookup(fs.root, path); }

std::optional<std::string> contents_of(const L3Fs& fs, const L3File& f) {
  return gather(fs.disk, f.blocks, f.length);
}
std::optional<std::string> contents_of(const L4Fs& fs, const L3File& f) {
  return gather(fs.disk, f.blocks, f.length);
}
std::optional<std::string> contents_of(const L5Fs& fs, const L5File& f) {
  return gather(fs.disk, f.blocks, f.length);
}
std::optional<std::string> contents_of(const L6Fs& fs, const L6File& f) {
  if (!f.first) {
    if (f.length != 0) return std::nullopt;
    return std::string{};
  }
  auto chain = l6_file_index_list(fs.fat, *f.first, f.length, fs.block_size);
  if (!chain) return std::nullopt;
  return gather(fs.disk, *chain, f.length);
}

std::optional<std::string> rdchs(const L1Fs& fs, const Path& path, std::size_t start, std::size_t n) {
  const auto* f = lookup_file(fs.root, path);
  if (f == nullptr) return std::nullopt;
  return read_range(f->contents, start, n);
}

std::optional<std::string> rdchs(const L2Fs& fs, const Path& path, std::size_t start, std::size_t n) {
  const auto* f = lookup_file(fs.root, path);
  if (f == nullptr) return std::nullopt;
  auto text = f->contents;
  text.resize(std::min(text.size(), f->length));
  return read_range(text, start, n);
}

template <class Fs>
static std::optional<std::string> indexed_read(const Fs& fs, const Path& path, std::size_t start,
                                               std::size_t n) {
  const auto* f = lookup_file(fs.root, path);
  if (f == nullptr) return std::nullopt;
  return read_range(contents_of(fs, *f), start, n);
}

std::optional<std::string> rdchs(const L3Fs& fs, const Path& path, std::size_t start, std::size_t n) {
  return indexed_read(fs, path, start, n);
}
std::optional<std::string> rdchs(const L4Fs& fs, const Path& path, std::size_t start, std::size_t n) {
  return indexed_read(fs, path, start, n);
}
std::optional<std::string> rdchs(const L5Fs& fs, const Path& path, std::size_t start, std::size_t n) {
  return indexed_read(fs, path, start, n);
}
std::optional<std::string> rdchs(const L6Fs& fs, const Path& path, std::size_t start, std::size_t n) {
  return indexed_read(fs, path, start, n);
}

Expected<L1Fs, Error> wrchs(const L1Fs& fs, const Path& path, std::size_t start, std::string_view text) {
  if (lookup_file(fs.root, path) == nullptr) return Unexpected{Error::not_found};
  L1Fs out = fs;
  auto* f = lookup(out.root, path)->as_file();
  f->contents = splice(f->contents, start, text);
  return out;
}

Expected<L2Fs, Error> wrchs(const L2Fs& fs, const Path& path, std::size_t start, std::string_view text) {
  if (lookup_file(fs.root, path) == nullptr) return Unexpected{Error::not_found};
  L2Fs out = fs;
  auto* f = lookup(out.root, path)->as_file();
  f->contents = splice(f->contents, start, text);
  f->length = f->contents.size();
  return out;
}

// The unbounded disk has no allocation vector: blocks not referenced by
// another file are free, and the disk grows when the free ones run out.
Expected<L3Fs, Error> wrchs(const L3Fs& fs, const Path& path, std::size_t start, std::string_view text) {
  const auto* file = lookup_file(fs.root, path);
  if (file == nullptr) return Unexpected{Error::not_found};
  auto old = contents_of(fs, *file);
  if (!old) return Unexpected{Error::ill_formed};
  auto updated = splice(*old, start, text);
  auto blocks = make_blocks(updated, fs.block_size);

  auto used = referenced_except(fs.root, path);
  L3Fs out = fs;
  std::vector<std::size_t> chosen;
  for (std::size_t i = 0; chosen.size() < blocks.size(); ++i) {
    if (i == out.disk.size()) out.disk.emplace_back(fs.block_size, kFill);
    if (!used.contains(i)) chosen.push_back(i);
  }
  for (std::size_t k = 0; k < blocks.size(); ++k) out.disk[chosen[k]] = std::move(blocks[k]);
  auto* target = lookup(out.root, path)->as_file();
  target->blocks = std::move(chosen);
  target->length = updated.size();
  return out;
}

Expected<L4Fs, Error> wrchs(const L4Fs& fs, const Path& path, std::size_t start, std::string_view text) {
  return bounded_write(fs, path, start, text);
}

Expected<L5Fs, Error> wrchs(const L5Fs& fs, const Path& path, std::size_t start, std::string_view text) {
  return bounded_write(fs, path, start, text);
}

Expected<L6Fs, Error> wrchs(const L6Fs& fs, const Path& path, std::size_t start, std::string_view text) {
  const auto* file = lookup_file(fs.root, path);
  if (file == nullptr) return Unexpected{Error::not_found};
  auto old = contents_of(fs, *file);
  if (!old) return Unexpected{Error::ill_formed};
  auto updated = splice(*old, start, text);
  auto blocks = make_blocks(updated, fs.block_size);

  FaTable fat = fs.fat;
  if (file->first) {
    auto chain = l6_file_index_list(fat, *file->first, file->length, fs.block_size);
    if (!chain) return Unexpected{Error::ill_formed};
    for (auto i : *chain) fat.entries[i] = 0;
  }
  auto chosen = find_n_free_blocks(fa_table_to_alv(fat), blocks.size());
  if (!chosen) return Unexpected{Error::no_space};

  for (std::size_t k = 0; k < chosen->size(); ++k)
    fat.entries[(*chosen)[k]] =
        k + 1 < chosen->size() ? static_cast<std::uint32_t>((*chosen)[k + 1]) : kEocWrite;

  L6Fs out = fs;
  out.fat = std::move(fat);
  for (std::size_t k = 0; k < blocks.size(); ++k) out.disk[(*chosen)[k]] = std::move(blocks[k]);
  auto* target = lookup(out.root, path)->as_file();
  target->first = chosen->empty() ? std::nullopt : std::optional<std::size_t>((*chosen)[0]);
  target->length = updated.size();
  return out;
}

template <class Fs>
Expected<Fs, Error> mknod(const Fs& fs, const Path& path) {
  using File = std::remove_cvref_t<decltype(*fs.root.as_file())>;
  Fs out = fs;
  auto r = insert(out.root, path, Node<File>::file(File{}));
  if (!r) return Unexpected{r.error()};
  return out;
}

template <class Fs>
Expected<Fs, Error> mkdir(const Fs& fs, const Path& path) {
  using File = std::remove_cvref_t<decltype(*fs.root.as_file())>;
  Fs out = fs;
  auto r = insert(out.root, path, Node<File>::directory());
  if (!r) return Unexpected{r.error()};
  return out;
}

#define FATWS_INSTANTIATE(Fs)                                        \
  template Expected<Fs, Error> mknod<Fs>(const Fs&, const Path&); \
  template Expected<Fs, Error> mkdir<Fs>(const Fs&, const Path&);
FATWS_INSTANTIATE(L1Fs)
FATWS_INSTANTIATE(L2Fs)
FATWS_INSTANTIATE(L3Fs)
FATWS_INSTANTIATE(L4Fs)
FATWS_INSTANTIATE(L5Fs)
FATWS_INSTANTIATE(L6Fs)
#undef FATWS_INSTANTIATE

bool well_formed(const L1Fs& fs) { return fs.root.is_dir(); }

bool well_formed(const L2Fs& fs) {
  if (!fs.root.is_dir()) return false;
  bool ok = true;
  for_each_file(fs.root, [&](const Path&, const L2File& f) {
    if (f.length != f.contents.size()) ok = false;
  });
  return ok;
}

bool well_formed(const L3Fs& fs) { return well_formed_root(fs); }

bool well_formed(const L4Fs& fs) { return well_formed_root(fs) && fs.alv.size() == fs.disk.size(); }

bool well_formed(const L5Fs& fs) {
  if (!well_formed_root(fs) || fs.alv.size() != fs.disk.size()) return false;
  bool ok = true;
  for_each_file(fs.root, [&](const Path&, const L5File& f) {
    if (f.meta.mode >= (1u << 12)) ok = false;
  });
  return ok;
}

bool well_formed(const L6Fs& fs) {
  if (!fs.root.is_dir() || !disk_shape_ok(fs.disk, fs.block_size)) return false;
  if (fs.fat.size() != fs.disk.size()) return false;
  bool ok = true;
  for_each_file(fs.root, [&](const Path&, const L6File& f) {
    if (!f.first) {
      if (f.length != 0) ok = false;
      return;
    }
    auto chain = l6_file_index_list(fs.fat, *f.first, f.length, fs.block_size);
    if (!chain || chain->size() != blocks_needed(f.length, fs.block_size)) ok = false;
  });
  return ok;
}

template <class Fs>
static std::vector<std::size_t> list_indices(const Fs& fs) {
  std::vector<std::size_t> all;
  for_each_file(fs.root, [&](const Path&, const auto& f) {
    all.insert(all.end(), f.blocks.begin(), f.blocks.end());
  });
  return all;
}

std::vector<std::size_t> l4_list_all_indices(const L4Fs& fs) { return list_indices(fs); }
std::vector<std::size_t> l4_list_all_indices(const L5Fs& fs) { return list_indices(fs); }

bool l4_stricter_fs_p(const L4Fs& fs, const AllocationVector& alv) { return stricter(fs, alv); }
bool l4_stricter_fs_p(const L5Fs& fs) { return well_formed(fs) && stricter(fs, fs.alv); }

Expected<L1Fs, Error> convert_down(const L2Fs& fs) {
  if (!well_formed(fs)) return Unexpected{Error::ill_formed};
  auto root = map_files<L1File>(fs.root, [](const L2File& f) -> Expected<L1File, Error> {
    return L1File{f.contents};
  });
  if (!root) return Unexpected{root.error()};
  return L1Fs{std::move(*root)};
}

Expected<L2Fs, Error> convert_down(const L3Fs& fs) {
  if (!well_formed(fs)) return Unexpected{Error::ill_formed};
  auto root = map_files<L2File>(fs.root, [&](const L3File& f) -> Expected<L2File, Error> {
    auto text = contents_of(fs, f);
    if (!text) return Unexpected{Error::ill_formed};
    return L2File{std::move(*text), f.length};
  });
  if (!root) return Unexpected{root.error()};
  return L2Fs{std::move(*root)};
}

Expected<L3Fs, Error> convert_down(const L4Fs& fs) {
  if (!l4_stricter_fs_p(fs)) return Unexpected{Error::ill_formed};
  return L3Fs{fs.root, fs.disk, fs.block_size};
}

Expected<L4Fs, Error> convert_down(const L5Fs& fs) {
  if (!l4_stricter_fs_p(fs)) return Unexpected{Error::ill_formed};
  auto root = map_files<L3File>(fs.root, [](const L5File& f) -> Expected<L3File, Error> {
    return L3File{f.blocks, f.length};
  });
  if (!root) return Unexpected{root.error()};
  return L4Fs{std::move(*root), fs.disk, fs.alv, fs.block_size};
}

Expected<L4Fs, Error> convert_down(const L6Fs& fs) {
  if (!well_formed(fs)) return Unexpected{Error::ill_formed};
  auto root = map_files<L3File>(fs.root, [&](const L6File& f) -> Expected<L3File, Error> {
    if (!f.first) return L3File{{}, 0};
    auto chain = l6_file_index_list(fs.fat, *f.first, f.length, fs.block_size);
    if (!chain) return Unexpected{Error::ill_formed};
    return L3File{std::move(*chain), f.length};
  });
  if (!root) return Unexpected{root.error()};
  return L4Fs{std::move(*root), fs.disk, fa_table_to_alv(fs.fat), fs.block_size};
}

}  // namespace fatws::model
