#include "fatws/fat32/dir_entry.hpp"

#include <algorithm>
#include <cctype>

#include "le.hpp"

namespace fatws::fat32 {

namespace {

constexpr std::size_t kName = 0;
constexpr std::size_t kAttr = 11;
constexpr std::size_t kClusterHigh = 20;
constexpr std::size_t kClusterLow = 26;
constexpr std::size_t kFileSize = 28;

bool allowed_char(char ch) {
  auto c = static_cast<unsigned char>(ch);
  if (std::isupper(c) || std::isdigit(c)) return true;
  return std::string_view("$%'-_@~`!(){}^#&").find(ch) != std::string_view::npos;
}

}  // namespace

std::string upper(std::string_view s) {
  std::string out(s);
  std::transform(out.begin(), out.end(), out.begin(),
                 [](unsigned char c) { return static_cast<char>(std::toupper(c)); });
  return out;
}

DirEntry decode_dir_entry(std::span<const std::uint8_t, kDirEntrySize> raw) {
  DirEntry e;
  std::copy(raw.begin(), raw.end(), e.raw.begin());
  std::copy_n(raw.begin() + kName, e.name.size(), e.name.begin());
  e.attributes = raw[kAttr];
  // Cluster numbers are 28 bits wide; the top nibble of the high half stays in raw.
  e.first_cluster =
      ((std::uint64_t{le::load16(raw, kClusterHigh)} << 16) | le::load16(raw, kClusterLow)) & 0x0FFFFFFF;
  e.file_size = le::load32(raw, kFileSize);
  if (raw[0] == kEntryEnd || raw[0] == kEntryDeleted)
    e.kind = EntryKind::vacant;
  else if ((e.attributes & kAttrLongName) == kAttrLongName)
    e.kind = EntryKind::long_name;
  else if (e.attributes & kAttrVolumeId)
    e.kind = EntryKind::volume_label;
  else if (e.attributes & kAttrDirectory)
    e.kind = EntryKind::directory;
  else
    e.kind = EntryKind::regular;
  return e;
}

Expected<RawEntry, Error> encode_dir_entry(const DirEntry& e) {
  if (e.file_size > 0xFFFFFFFFull || e.first_cluster > 0x0FFFFFFFull)
    return Unexpected{Error::field_overflow};
  RawEntry out = e.raw;
  std::copy(e.name.begin(), e.name.end(), out.begin() + kName);
  out[kAttr] = e.attributes;
  const auto top = static_cast<std::uint16_t>(le::load16(out, kClusterHigh) & 0xF000);
  le::store16(out, kClusterHigh, static_cast<std::uint16_t>(top | (e.first_cluster >> 16)));
  le::store16(out, kClusterLow, static_cast<std::uint16_t>(e.first_cluster));
  le::store32(out, kFileSize, static_cast<std::uint32_t>(e.file_size));
  return out;
}

NameCheck check_short_name(std::string_view display) {
  auto name = upper(display);
  auto dot = name.find('.');
  std::string_view base = std::string_view(name).substr(0, dot);
  std::string_view ext =
      dot == std::string::npos ? std::string_view{} : std::string_view(name).substr(dot + 1);
  if (base.size() > 8 || ext.size() > 3) return NameCheck::too_long;
  if (base.empty() || (dot != std::string::npos && ext.empty())) return NameCheck::invalid;
  if (!std::all_of(base.begin(), base.end(), allowed_char) ||
      !std::all_of(ext.begin(), ext.end(), allowed_char))
    return NameCheck::invalid;
  return NameCheck::ok;
}

std::optional<ShortName> to_short_name(std::string_view display) {
  if (check_short_name(display) != NameCheck::ok) return std::nullopt;
  auto name = upper(display);
  ShortName out;
  out.fill(' ');
  auto dot = name.find('.');
  auto base = name.substr(0, dot);
  std::copy(base.begin(), base.end(), out.begin());
  if (dot != std::string::npos) {
    auto ext = name.substr(dot + 1);
    std::copy(ext.begin(), ext.end(), out.begin() + 8);
  }
  return out;
}

std::string display_name(const ShortName& name) {
  auto trim = [](std::string s) {
    while (!s.empty() && s.back() == ' ') s.pop_back();
    return s;
  };
  auto base = trim(std::string(name.begin(), name.begin() + 8));
  auto ext = trim(std::string(name.begin() + 8, name.end()));
  return ext.empty() ? base : base + "." + ext;
}

DirEntry make_dir_entry(const ShortName& name, std::uint8_t attributes, std::uint64_t first_cluster,
                        std::uint64_t file_size) {
  DirEntry e;
  e.name = name;
  e.attributes = attributes;
  e.first_cluster = first_cluster;
  e.file_size = file_size;
  e.raw = *encode_dir_entry(e);
  return decode_dir_entry(e.raw);
}

}  // namespace fatws::fat32
