#pragma once

#include <array>
#include <cstdint>
#include <optional>
#include <span>
#include <string>
#include <string_view>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"

namespace fatws::fat32 {

inline constexpr std::size_t kDirEntrySize = 32;
inline constexpr std::uint8_t kAttrReadOnly = 0x01;
inline constexpr std::uint8_t kAttrVolumeId = 0x08;
inline constexpr std::uint8_t kAttrDirectory = 0x10;
inline constexpr std::uint8_t kAttrArchive = 0x20;
inline constexpr std::uint8_t kAttrLongName = 0x0F;
inline constexpr std::uint8_t kEntryEnd = 0x00;
inline constexpr std::uint8_t kEntryDeleted = 0xE5;

using RawEntry = std::array<std::uint8_t, kDirEntrySize>;
using ShortName = std::array<char, 11>;

enum class EntryKind { vacant, regular, directory, volume_label, long_name };

/// Decoded 32-byte directory entry. Fields the codec does not model (times,
/// NT reserved byte) live only in `raw` and round-trip untouched.
struct DirEntry {
  RawEntry raw{};
  ShortName name{};
  std::uint8_t attributes = 0;
  std::uint64_t first_cluster = 0;
  std::uint64_t file_size = 0;
  EntryKind kind = EntryKind::vacant;

  bool is_end() const { return raw[0] == kEntryEnd; }
  bool is_dot() const { return name[0] == '.'; }

  friend bool operator==(const DirEntry&, const DirEntry&) = default;
};

DirEntry decode_dir_entry(std::span<const std::uint8_t, kDirEntrySize> raw);
Expected<RawEntry, Error> encode_dir_entry(const DirEntry& e);

enum class NameCheck { ok, too_long, invalid };

/// Validates a display name ("INITRD.IMG") against the 8.3 rules after
/// upper-casing.
NameCheck check_short_name(std::string_view display);

/// "initrd.img" -> "INITRD  IMG"; nullopt unless check_short_name is ok.
std::optional<ShortName> to_short_name(std::string_view display);

/// "INITRD  IMG" -> "INITRD.IMG".
std::string display_name(const ShortName& name);

std::string upper(std::string_view s);

/// Fresh entry with zeroed time fields.
DirEntry make_dir_entry(const ShortName& name, std::uint8_t attributes, std::uint64_t first_cluster,
                        std::uint64_t file_size);

}  // namespace fatws::fat32
