#pragma once

// Directory-tree view of a FAT32 volume: decoded directory-entry metadata
// next to file contents, with translations to and from Fat32Image.

#include <cstddef>
#include <optional>
#include <span>
#include <string>
#include <string_view>
#include <variant>
#include <vector>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"
#include "fatws/fat32/dir_entry.hpp"
#include "fatws/fat32/image.hpp"
#include "fatws/path.hpp"

namespace fatws::hifat {

using fat32::Bytes;

struct HiFatFile;

/// Entries in on-disk order. Names are upper-case 8.3 display names and
/// never "." or "..".
struct HiFatDir {
  std::vector<HiFatFile> entries;

  const HiFatFile* find(std::string_view name) const;
  HiFatFile* find(std::string_view name);
  friend bool operator==(const HiFatDir&, const HiFatDir&);
};

struct HiFatFile {
  std::string name;
  fat32::DirEntry meta;
  std::variant<Bytes, HiFatDir> contents;

  bool is_dir() const { return contents.index() == 1; }
  const Bytes* data() const { return std::get_if<0>(&contents); }
  Bytes* data() { return std::get_if<0>(&contents); }
  const HiFatDir* dir() const { return std::get_if<1>(&contents); }
  HiFatDir* dir() { return std::get_if<1>(&contents); }

  static HiFatFile regular(std::string_view name, Bytes data = {});
  static HiFatFile directory(std::string_view name, HiFatDir dir = {});

  friend bool operator==(const HiFatFile&, const HiFatFile&) = default;
};

struct HiFatFs {
  HiFatDir root;
  friend bool operator==(const HiFatFs&, const HiFatFs&) = default;
};

inline constexpr std::size_t kDefaultDepthLimit = 64;

Expected<HiFatFs, Error> image_to_hifat(const fat32::Fat32Image& img,
                                        std::size_t depth_limit = kDefaultDepthLimit);

/// Re-lays the tree out on a copy of `tmpl`: FAT cleared, clusters handed
/// out lowest-first in depth-first entry order, directory entries encoded.
Expected<fat32::Fat32Image, Error> hifat_to_image(const fat32::Fat32Image& tmpl, const HiFatFs& fs);

/// Order-insensitive equality; time bytes are ignored.
bool hifat_equiv(const HiFatFs& a, const HiFatFs& b);

/// Clusters hifat_to_image will consume: every directory takes at least
/// one, empty regular files take none.
std::size_t clusters_needed(const HiFatFs& fs, std::size_t cluster_size);

/// Component lookup, case-insensitive. nullptr for the root or a miss.
const HiFatFile* lookup(const HiFatFs& fs, const Path& path);
/// Directory at path (the root for the empty path), or nullptr.
const HiFatDir* lookup_dir(const HiFatFs& fs, const Path& path);

std::optional<Bytes> rdchs(const HiFatFs& fs, const Path& path, std::size_t start, std::size_t n);
Expected<HiFatFs, Error> wrchs(const HiFatFs& fs, const Path& path, std::size_t start,
                               std::span<const std::uint8_t> text);

// Errors: not_found, not_dir, exists, name_invalid.
Expected<HiFatFs, Error> mknod(const HiFatFs& fs, const Path& path);
Expected<HiFatFs, Error> mkdir(const HiFatFs& fs, const Path& path);

/// Overwrites a regular file's contents wholesale (no splice).
Expected<HiFatFs, Error> replace_contents(const HiFatFs& fs, const Path& path, Bytes data);

}  // namespace fatws::hifat
