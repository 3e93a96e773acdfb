#include "fatws/hifat.hpp"

#include <algorithm>

#include "fatws/model/blocks.hpp"

namespace fatws::hifat {

using fat32::DirEntry;
using fat32::Fat32Image;

const HiFatFile* HiFatDir::find(std::string_view name) const {
  auto key = fat32::upper(name);
  for (const auto& e : entries)
    if (e.name == key) return &e;
  return nullptr;
}

HiFatFile* HiFatDir::find(std::string_view name) {
  return const_cast<HiFatFile*>(std::as_const(*this).find(name));
}

bool operator==(const HiFatDir& a, const HiFatDir& b) { return a.entries == b.entries; }

HiFatFile HiFatFile::regular(std::string_view name, Bytes data) {
  auto shortname = fat32::to_short_name(name).value_or(fat32::ShortName{});
  HiFatFile f;
  f.name = fat32::upper(name);
  f.meta = fat32::make_dir_entry(shortname, fat32::kAttrArchive, 0, data.size());
  f.contents = std::move(data);
  return f;
}

HiFatFile HiFatFile::directory(std::string_view name, HiFatDir dir) {
  auto shortname = fat32::to_short_name(name).value_or(fat32::ShortName{});
  HiFatFile f;
  f.name = fat32::upper(name);
  f.meta = fat32::make_dir_entry(shortname, fat32::kAttrDirectory, 0, 0);
  f.contents = std::move(dir);
  return f;
}

namespace {

Expected<HiFatDir, Error> read_dir(const Fat32Image& img, std::uint32_t first, std::size_t depth,
                                   std::size_t limit) {
  if (depth > limit) return Unexpected{Error::depth_exceeded};
  auto raw = fat32::read_directory_contents(img, first);
  if (!raw) return Unexpected{raw.error()};

  HiFatDir dir;
  for (std::size_t off = 0; off + fat32::kDirEntrySize <= raw->size(); off += fat32::kDirEntrySize) {
    auto e = fat32::decode_dir_entry(
        std::span<const std::uint8_t, fat32::kDirEntrySize>(raw->data() + off, fat32::kDirEntrySize));
    if (e.is_end()) break;
    if (e.kind == fat32::EntryKind::vacant || e.kind == fat32::EntryKind::long_name ||
        e.kind == fat32::EntryKind::volume_label || e.is_dot())
      continue;

    HiFatFile f;
    f.name = fat32::display_name(e.name);
    if (dir.find(f.name) != nullptr) return Unexpected{Error::ill_formed};
    if (e.kind == fat32::EntryKind::directory) {
      if (e.first_cluster < fat32::kFirstDataCluster) return Unexpected{Error::bad_chain};
      auto sub = read_dir(img, static_cast<std::uint32_t>(e.first_cluster), depth + 1, limit);
      if (!sub) return Unexpected{sub.error()};
      f.contents = std::move(*sub);
    } else if (e.first_cluster == 0) {
      if (e.file_size != 0) return Unexpected{Error::size_mismatch};
      f.contents = Bytes{};
    } else {
      auto data = fat32::read_file_contents(img, static_cast<std::uint32_t>(e.first_cluster), e.file_size);
      if (!data) return Unexpected{data.error()};
      f.contents = std::move(*data);
    }
    f.meta = std::move(e);
    dir.entries.push_back(std::move(f));
  }
  return dir;
}

std::size_t dir_clusters(std::size_t entries, std::size_t cluster_size) {
  return std::max<std::size_t>(1, model::blocks_needed(entries * fat32::kDirEntrySize, cluster_size));
}

std::size_t needed(const HiFatDir& dir, bool is_root, std::size_t cs) {
  std::size_t n = dir_clusters(dir.entries.size() + (is_root ? 0 : 2), cs);
  for (const auto& e : dir.entries)
    n += e.is_dir() ? needed(*e.dir(), false, cs) : model::blocks_needed(e.data()->size(), cs);
  return n;
}

bool names_valid(const HiFatDir& dir) {
  for (const auto& e : dir.entries) {
    if (!fat32::to_short_name(e.name)) return false;
    if (e.is_dir() && !names_valid(*e.dir())) return false;
  }
  return true;
}

void scatter(Fat32Image& img, const std::vector<std::uint32_t>& chain, const Bytes& data) {
  const std::size_t cs = img.cluster_size();
  for (std::size_t k = 0; k < chain.size(); ++k) {
    auto& cl = img.cluster(chain[k]);
    std::fill(cl.begin(), cl.end(), 0);
    auto begin = std::min(data.size(), k * cs);
    auto end = std::min(data.size(), begin + cs);
    std::copy(data.begin() + static_cast<std::ptrdiff_t>(begin),
              data.begin() + static_cast<std::ptrdiff_t>(end), cl.begin());
  }
}

void put_entry(Bytes& buf, std::size_t slot, const DirEntry& e) {
  auto raw = *fat32::encode_dir_entry(e);
  std::copy(raw.begin(), raw.end(), buf.begin() + static_cast<std::ptrdiff_t>(slot * fat32::kDirEntrySize));
}

DirEntry dot_entry(const char* name, std::uint32_t cluster) {
  fat32::ShortName n;
  n.fill(' ');
  std::copy(name, name + std::char_traits<char>::length(name), n.begin());
  return fat32::make_dir_entry(n, fat32::kAttrDirectory, cluster, 0);
}

// Allocates and writes one directory, recursing into subdirectories as
// they are met. Returns the directory's first cluster.
std::uint32_t place_dir(Fat32Image& img, const HiFatDir& dir, bool is_root, std::uint32_t parent) {
  const std::size_t cs = img.cluster_size();
  const std::size_t slots = dir.entries.size() + (is_root ? 0 : 2);
  auto chain = *fat32::allocate_clusters(img, dir_clusters(slots, cs));
  const std::uint32_t self = chain.front();

  Bytes buf(chain.size() * cs, 0);
  std::size_t slot = 0;
  if (!is_root) {
    put_entry(buf, slot++, dot_entry(".", self));
    put_entry(buf, slot++, dot_entry("..", parent));
  }
  for (const auto& child : dir.entries) {
    DirEntry e = child.meta;
    e.name = *fat32::to_short_name(child.name);
    if (child.is_dir()) {
      e.attributes = static_cast<std::uint8_t>(e.attributes | fat32::kAttrDirectory);
      e.first_cluster = place_dir(img, *child.dir(), false, is_root ? 0 : self);
      e.file_size = 0;
    } else {
      const auto& data = *child.data();
      e.attributes = static_cast<std::uint8_t>(e.attributes & ~fat32::kAttrDirectory);
      e.file_size = data.size();
      e.first_cluster = 0;
      if (!data.empty()) {
        auto file_chain = *fat32::allocate_clusters(img, model::blocks_needed(data.size(), cs));
        scatter(img, file_chain, data);
        e.first_cluster = file_chain.front();
      }
    }
    put_entry(buf, slot++, e);
  }
  scatter(img, chain, buf);
  return self;
}

bool dir_equiv(const HiFatDir& a, const HiFatDir& b) {
  if (a.entries.size() != b.entries.size()) return false;
  for (const auto& ea : a.entries) {
    const auto* eb = b.find(ea.name);
    if (eb == nullptr || ea.is_dir() != eb->is_dir()) return false;
    if (ea.is_dir()) {
      if (!dir_equiv(*ea.dir(), *eb->dir())) return false;
    } else if (*ea.data() != *eb->data() || ea.meta.file_size != eb->meta.file_size) {
      return false;
    }
  }
  return true;
}

HiFatFile* lookup_mut(HiFatFs& fs, const Path& path) {
  return const_cast<HiFatFile*>(lookup(std::as_const(fs), path));
}

// Walks to the directory at path: not_dir when a component is a regular
// file, not_found when one is missing.
Expected<HiFatDir*, Error> resolve_dir(HiFatFs& fs, const Path& path) {
  HiFatDir* dir = &fs.root;
  for (const auto& name : path.names()) {
    auto* f = dir->find(name);
    if (f == nullptr) return Unexpected{Error::not_found};
    if (!f->is_dir()) return Unexpected{Error::not_dir};
    dir = f->dir();
  }
  return dir;
}

Expected<HiFatFs, Error> create(const HiFatFs& fs, const Path& path, HiFatFile node) {
  if (path.is_root()) return Unexpected{Error::exists};
  HiFatFs out = fs;
  auto parent = resolve_dir(out, path.parent());
  if (!parent) return Unexpected{parent.error()};
  if ((*parent)->find(path.back()) != nullptr) return Unexpected{Error::exists};
  if (!fat32::to_short_name(path.back())) return Unexpected{Error::name_invalid};
  (*parent)->entries.push_back(std::move(node));
  return out;
}

}  // namespace

Expected<HiFatFs, Error> image_to_hifat(const Fat32Image& img, std::size_t depth_limit) {
  auto root = read_dir(img, img.reserved.root_cluster, 0, depth_limit);
  if (!root) return Unexpected{root.error()};
  return HiFatFs{std::move(*root)};
}

std::size_t clusters_needed(const HiFatFs& fs, std::size_t cluster_size) {
  return needed(fs.root, true, cluster_size);
}

Expected<Fat32Image, Error> hifat_to_image(const Fat32Image& tmpl, const HiFatFs& fs) {
  if (!names_valid(fs.root)) return Unexpected{Error::name_invalid};
  if (clusters_needed(fs, tmpl.cluster_size()) > fat32::count_of_clusters(tmpl))
    return Unexpected{Error::no_space};
  Fat32Image img = tmpl;
  for (auto& fat : img.fats)
    std::fill(fat.begin() + fat32::kFirstDataCluster,
              fat.begin() + static_cast<std::ptrdiff_t>(img.cluster_limit()), 0u);
  img.reserved.root_cluster = place_dir(img, fs.root, true, 0);
  return img;
}

bool hifat_equiv(const HiFatFs& a, const HiFatFs& b) { return dir_equiv(a.root, b.root); }

const HiFatFile* lookup(const HiFatFs& fs, const Path& path) {
  const HiFatDir* dir = &fs.root;
  const HiFatFile* cur = nullptr;
  for (const auto& name : path.names()) {
    if (dir == nullptr) return nullptr;
    cur = dir->find(name);
    if (cur == nullptr) return nullptr;
    dir = cur->dir();
  }
  return cur;
}

const HiFatDir* lookup_dir(const HiFatFs& fs, const Path& path) {
  if (path.is_root()) return &fs.root;
  const auto* f = lookup(fs, path);
  return f == nullptr ? nullptr : f->dir();
}

std::optional<Bytes> rdchs(const HiFatFs& fs, const Path& path, std::size_t start, std::size_t n) {
  const auto* f = lookup(fs, path);
  if (f == nullptr || f->is_dir()) return std::nullopt;
  const auto& data = *f->data();
  if (start > data.size() || n > data.size() - start) return std::nullopt;
  return Bytes(data.begin() + static_cast<std::ptrdiff_t>(start),
               data.begin() + static_cast<std::ptrdiff_t>(start + n));
}

Expected<HiFatFs, Error> wrchs(const HiFatFs& fs, const Path& path, std::size_t start,
                               std::span<const std::uint8_t> text) {
  const auto* f = lookup(fs, path);
  if (f == nullptr || f->is_dir()) return Unexpected{Error::not_found};
  HiFatFs out = fs;
  auto* target = lookup_mut(out, path);
  auto& data = *target->data();
  if (data.size() < start + text.size()) data.resize(start + text.size(), 0);
  std::copy(text.begin(), text.end(), data.begin() + static_cast<std::ptrdiff_t>(start));
  target->meta.file_size = data.size();
  return out;
}

Expected<HiFatFs, Error> mknod(const HiFatFs& fs, const Path& path) {
  if (path.is_root()) return Unexpected{Error::exists};
  return create(fs, path, HiFatFile::regular(path.back()));
}

Expected<HiFatFs, Error> mkdir(const HiFatFs& fs, const Path& path) {
  if (path.is_root()) return Unexpected{Error::exists};
  return create(fs, path, HiFatFile::directory(path.back()));
}

Expected<HiFatFs, Error> replace_contents(const HiFatFs& fs, const Path& path, Bytes data) {
  const auto* f = lookup(fs, path);
  if (f == nullptr || f->is_dir()) return Unexpected{Error::not_found};
  HiFatFs out = fs;
  auto* target = lookup_mut(out, path);
  target->meta.file_size = data.size();
  *target->data() = std::move(data);
  return out;
}

}  // namespace fatws::hifat
