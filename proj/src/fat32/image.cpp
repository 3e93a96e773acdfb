#include "fatws/fat32/image.hpp"

#include <algorithm>

#include "le.hpp"

namespace fatws::fat32 {

Bytes ReservedArea::encode() const {
  Bytes out = raw;
  if (out.size() < 512) out.resize(512, 0);
  le::store16(out, bpb::kBytesPerSector, bytes_per_sector);
  out[bpb::kSectorsPerCluster] = sectors_per_cluster;
  le::store16(out, bpb::kReservedSectors, reserved_sector_count);
  out[bpb::kNumFats] = num_fats;
  le::store32(out, bpb::kTotalSectors32, total_sectors_32);
  le::store32(out, bpb::kFatSize32, fat_size_32);
  le::store32(out, bpb::kRootCluster, root_cluster);
  return out;
}

std::uint8_t ReservedArea::media() const { return raw.at(bpb::kMedia); }
std::uint16_t ReservedArea::sectors_per_track() const { return le::load16(raw, bpb::kSectorsPerTrack); }
std::uint16_t ReservedArea::num_heads() const { return le::load16(raw, bpb::kNumHeads); }
std::uint32_t ReservedArea::hidden_sectors() const { return le::load32(raw, bpb::kHiddenSectors); }
std::uint8_t ReservedArea::drive_number() const { return raw.at(bpb::kDriveNumber); }
std::uint32_t ReservedArea::volume_id() const { return le::load32(raw, bpb::kVolumeId); }
std::string ReservedArea::volume_label() const {
  return std::string(raw.begin() + bpb::kVolumeLabel, raw.begin() + bpb::kVolumeLabel + 11);
}

bool operator==(const ReservedArea& a, const ReservedArea& b) {
  return a.bytes_per_sector == b.bytes_per_sector && a.sectors_per_cluster == b.sectors_per_cluster &&
         a.reserved_sector_count == b.reserved_sector_count && a.num_fats == b.num_fats &&
         a.fat_size_32 == b.fat_size_32 && a.root_cluster == b.root_cluster &&
         a.total_sectors_32 == b.total_sectors_32 && a.encode() == b.encode();
}

std::uint32_t count_of_clusters(const ReservedArea& r) {
  if (r.sectors_per_cluster == 0) return 0;
  std::uint64_t overhead = std::uint64_t{r.reserved_sector_count} +
                           std::uint64_t{r.num_fats} * r.fat_size_32;
  if (overhead >= r.total_sectors_32) return 0;
  return static_cast<std::uint32_t>((r.total_sectors_32 - overhead) / r.sectors_per_cluster);
}

bool compliant_fat32_p(const ReservedArea& r, Compliance c) {
  return r.bytes_per_sector >= kMinBytesPerSector && r.sectors_per_cluster >= 1 &&
         count_of_clusters(r) >= min_count_of_clusters(c) && r.root_cluster >= kFirstDataCluster;
}

namespace {

// Layout conditions parse needs beyond compliance to slice the volume.
bool layout_ok(const ReservedArea& r) {
  if (r.num_fats < 1 || r.reserved_sector_count < 1) return false;
  if (r.bytes_per_sector % 4 != 0) return false;
  if (r.fat_bytes() / 4 < std::size_t{count_of_clusters(r)} + kFirstDataCluster) return false;
  return r.root_cluster < std::size_t{count_of_clusters(r)} + kFirstDataCluster;
}

}  // namespace

Expected<ReservedArea, Error> parse_reserved(std::span<const std::uint8_t> bytes) {
  if (bytes.size() < 512) return Unexpected{Error::truncated};
  if (bytes[bpb::kSignature] != 0x55 || bytes[bpb::kSignature + 1] != 0xAA)
    return Unexpected{Error::bad_signature};
  ReservedArea r;
  r.bytes_per_sector = le::load16(bytes, bpb::kBytesPerSector);
  r.sectors_per_cluster = bytes[bpb::kSectorsPerCluster];
  r.reserved_sector_count = le::load16(bytes, bpb::kReservedSectors);
  r.num_fats = bytes[bpb::kNumFats];
  r.total_sectors_32 = le::load32(bytes, bpb::kTotalSectors32);
  r.fat_size_32 = le::load32(bytes, bpb::kFatSize32);
  r.root_cluster = le::load32(bytes, bpb::kRootCluster);
  r.raw.assign(bytes.begin(), bytes.begin() + 512);
  return r;
}

Expected<Fat32Image, Error> parse_image(std::span<const std::uint8_t> bytes, Compliance c) {
  auto head = parse_reserved(bytes);
  if (!head) return Unexpected{head.error()};
  Fat32Image img;
  img.reserved = std::move(*head);
  auto& r = img.reserved;
  if (!compliant_fat32_p(r, c) || !layout_ok(r)) return Unexpected{Error::non_compliant};

  const std::size_t reserved_bytes = std::size_t{r.reserved_sector_count} * r.bytes_per_sector;
  const std::size_t volume_bytes = std::size_t{r.total_sectors_32} * r.bytes_per_sector;
  if (bytes.size() < volume_bytes || reserved_bytes < 512) return Unexpected{Error::truncated};

  r.raw.assign(bytes.begin(), bytes.begin() + static_cast<std::ptrdiff_t>(reserved_bytes));
  std::size_t pos = reserved_bytes;
  const std::size_t words = r.fat_bytes() / 4;
  img.fats.resize(r.num_fats);
  for (auto& fat : img.fats) {
    fat.resize(words);
    for (std::size_t w = 0; w < words; ++w) fat[w] = le::load32(bytes, pos + 4 * w);
    pos += r.fat_bytes();
  }
  const std::size_t cs = r.cluster_size();
  img.clusters.resize(count_of_clusters(r));
  for (auto& cl : img.clusters) {
    cl.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos),
              bytes.begin() + static_cast<std::ptrdiff_t>(pos + cs));
    pos += cs;
  }
  img.tail.assign(bytes.begin() + static_cast<std::ptrdiff_t>(pos), bytes.end());
  return img;
}

Bytes serialize_image(const Fat32Image& img) {
  Bytes out = img.reserved.encode();
  for (const auto& fat : img.fats) {
    auto base = out.size();
    out.resize(base + 4 * fat.size());
    for (std::size_t w = 0; w < fat.size(); ++w) le::store32(out, base + 4 * w, fat[w]);
  }
  for (const auto& cl : img.clusters) out.insert(out.end(), cl.begin(), cl.end());
  out.insert(out.end(), img.tail.begin(), img.tail.end());
  return out;
}

Expected<std::uint32_t, Error> fat_entry(const Fat32Image& img, std::size_t i) {
  if (img.fats.empty() || i >= img.cluster_limit() || i >= img.fats[0].size())
    return Unexpected{Error::index_out_of_range};
  return img.fats[0][i] & kEntryMask;
}

Expected<Ok, Error> set_fat_entry(Fat32Image& img, std::size_t i, std::uint32_t value) {
  if (i < kFirstDataCluster) return Unexpected{Error::reserved_index};
  if (img.fats.empty() || i >= img.cluster_limit() || i >= img.fats[0].size())
    return Unexpected{Error::index_out_of_range};
  if (value > kEntryMask) return Unexpected{Error::field_overflow};
  for (auto& fat : img.fats) fat[i] = (fat[i] & ~kEntryMask) | value;
  return Ok{};
}

Expected<std::vector<std::uint32_t>, Error> get_clusterchain(const Fat32Image& img,
                                                             std::uint32_t first) {
  const std::size_t limit = img.cluster_limit();
  std::vector<bool> seen(limit, false);
  std::vector<std::uint32_t> chain;
  std::uint32_t cur = first;
  while (true) {
    if (cur < kFirstDataCluster || cur >= limit || seen[cur]) return Unexpected{Error::bad_chain};
    seen[cur] = true;
    chain.push_back(cur);
    auto next = fat_entry(img, cur);
    if (!next || *next == 0) return Unexpected{Error::bad_chain};
    if (is_eoc(*next)) return chain;
    cur = *next;
  }
}

Expected<Bytes, Error> read_directory_contents(const Fat32Image& img, std::uint32_t first) {
  auto chain = get_clusterchain(img, first);
  if (!chain) return Unexpected{chain.error()};
  Bytes out;
  out.reserve(chain->size() * img.cluster_size());
  for (auto c : *chain) {
    const auto& cl = img.cluster(c);
    out.insert(out.end(), cl.begin(), cl.end());
  }
  return out;
}

Expected<Bytes, Error> read_file_contents(const Fat32Image& img, std::uint32_t first,
                                          std::uint64_t file_size) {
  auto data = read_directory_contents(img, first);
  if (!data) return data;
  if (file_size > data->size()) return Unexpected{Error::size_mismatch};
  data->resize(static_cast<std::size_t>(file_size));
  return data;
}

std::size_t count_free_clusters(const Fat32Image& img) {
  std::size_t n = 0;
  for (std::size_t i = kFirstDataCluster; i < img.cluster_limit(); ++i)
    if (auto e = fat_entry(img, i); e && *e == 0) ++n;
  return n;
}

Expected<std::vector<std::uint32_t>, Error> allocate_clusters(Fat32Image& img, std::size_t n) {
  std::vector<std::uint32_t> chosen;
  for (std::size_t i = kFirstDataCluster; i < img.cluster_limit() && chosen.size() < n; ++i)
    if (*fat_entry(img, i) == 0) chosen.push_back(static_cast<std::uint32_t>(i));
  if (chosen.size() < n) return Unexpected{Error::no_space};
  for (std::size_t k = 0; k < chosen.size(); ++k)
    (void)set_fat_entry(img, chosen[k], k + 1 < chosen.size() ? chosen[k + 1] : kEocHigh);
  return chosen;
}

model::FaTable abstract_fat(const Fat32Image& img) {
  model::FaTable t;
  t.eoc_floor = kEocLow;
  t.entries.resize(img.cluster_limit());
  for (std::size_t i = 0; i < t.entries.size(); ++i) t.entries[i] = img.fats[0][i] & kEntryMask;
  return t;
}

}  // namespace fatws::fat32
