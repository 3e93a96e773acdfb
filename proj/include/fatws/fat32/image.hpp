#pragma once

#include <cstddef>
#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"
#include "fatws/model/alloc.hpp"

namespace fatws::fat32 {

using Bytes = std::vector<std::uint8_t>;

inline constexpr std::uint32_t kEntryMask = 0x0FFFFFFF;
inline constexpr std::uint32_t kEocLow = 0x0FFFFFF8;
inline constexpr std::uint32_t kEocHigh = 0x0FFFFFFF;
inline constexpr std::uint32_t kFirstDataCluster = 2;
inline constexpr std::uint16_t kMinBytesPerSector = 512;
inline constexpr std::uint32_t kStrictMinCountOfClusters = 65525;

/// strict uses the FAT32 cluster-count discriminant; relaxed accepts any
/// non-empty data region so small test images stay usable.
enum class Compliance { strict, relaxed };

constexpr std::uint32_t min_count_of_clusters(Compliance c) {
  return c == Compliance::strict ? kStrictMinCountOfClusters : 1;
}

// Boot sector offsets of the fields we decode.
namespace bpb {
inline constexpr std::size_t kBytesPerSector = 11;
inline constexpr std::size_t kSectorsPerCluster = 13;
inline constexpr std::size_t kReservedSectors = 14;
inline constexpr std::size_t kNumFats = 16;
inline constexpr std::size_t kMedia = 21;
inline constexpr std::size_t kSectorsPerTrack = 24;
inline constexpr std::size_t kNumHeads = 26;
inline constexpr std::size_t kHiddenSectors = 28;
inline constexpr std::size_t kTotalSectors32 = 32;
inline constexpr std::size_t kFatSize32 = 36;
inline constexpr std::size_t kRootCluster = 44;
inline constexpr std::size_t kDriveNumber = 64;
inline constexpr std::size_t kVolumeId = 67;
inline constexpr std::size_t kVolumeLabel = 71;
inline constexpr std::size_t kSignature = 510;
}  // namespace bpb

/// Reserved area: decoded geometry plus every byte of the area verbatim.
/// The decoded fields win over `raw` when the area is re-encoded.
struct ReservedArea {
  std::uint16_t bytes_per_sector = 512;
  std::uint8_t sectors_per_cluster = 1;
  std::uint16_t reserved_sector_count = 32;
  std::uint8_t num_fats = 2;
  std::uint32_t fat_size_32 = 1;
  std::uint32_t root_cluster = 2;
  std::uint32_t total_sectors_32 = 0;
  Bytes raw;

  std::size_t cluster_size() const {
    return std::size_t{bytes_per_sector} * sectors_per_cluster;
  }
  std::size_t fat_bytes() const { return std::size_t{fat_size_32} * bytes_per_sector; }

  /// raw with the decoded fields written over it.
  Bytes encode() const;

  // Pass-through fields, read from raw.
  std::uint8_t media() const;
  std::uint16_t sectors_per_track() const;
  std::uint16_t num_heads() const;
  std::uint32_t hidden_sectors() const;
  std::uint8_t drive_number() const;
  std::uint32_t volume_id() const;
  std::string volume_label() const;

  friend bool operator==(const ReservedArea& a, const ReservedArea& b);
};

/// In-memory FAT32 volume. Each FAT copy is kept as the full array of
/// on-disk words; `clusters[k]` holds cluster index k + 2. Bytes past the
/// last whole cluster are kept in `tail` so serialization is lossless.
struct Fat32Image {
  ReservedArea reserved;
  std::vector<std::vector<std::uint32_t>> fats;
  std::vector<Bytes> clusters;
  Bytes tail;

  std::size_t cluster_size() const { return reserved.cluster_size(); }
  /// One past the highest valid cluster index.
  std::size_t cluster_limit() const { return clusters.size() + kFirstDataCluster; }

  Bytes& cluster(std::size_t index) { return clusters.at(index - kFirstDataCluster); }
  const Bytes& cluster(std::size_t index) const { return clusters.at(index - kFirstDataCluster); }

  friend bool operator==(const Fat32Image&, const Fat32Image&) = default;
};

std::uint32_t count_of_clusters(const ReservedArea& r);
inline std::uint32_t count_of_clusters(const Fat32Image& img) { return count_of_clusters(img.reserved); }

bool compliant_fat32_p(const ReservedArea& r, Compliance c = Compliance::strict);
inline bool compliant_fat32_p(const Fat32Image& img, Compliance c = Compliance::strict) {
  return compliant_fat32_p(img.reserved, c);
}

/// Boot-sector fields only, no compliance or layout checks; `raw` holds
/// just the first 512 bytes.
Expected<ReservedArea, Error> parse_reserved(std::span<const std::uint8_t> bytes);

Expected<Fat32Image, Error> parse_image(std::span<const std::uint8_t> bytes,
                                        Compliance c = Compliance::strict);
Bytes serialize_image(const Fat32Image& img);

constexpr bool is_eoc(std::uint32_t value) { return value >= kEocLow && value <= kEocHigh; }

/// Low 28 bits of entry i in the first FAT copy.
Expected<std::uint32_t, Error> fat_entry(const Fat32Image& img, std::size_t i);

/// Replaces the low 28 bits of entry i in every FAT copy, keeping the top
/// nibble. Image untouched on error.
Expected<Ok, Error> set_fat_entry(Fat32Image& img, std::size_t i, std::uint32_t value);

Expected<std::vector<std::uint32_t>, Error> get_clusterchain(const Fat32Image& img,
                                                             std::uint32_t first);

/// Chain contents truncated to file_size.
Expected<Bytes, Error> read_file_contents(const Fat32Image& img, std::uint32_t first,
                                          std::uint64_t file_size);
/// Whole chain, untruncated (directory files record size 0).
Expected<Bytes, Error> read_directory_contents(const Fat32Image& img, std::uint32_t first);

std::size_t count_free_clusters(const Fat32Image& img);

/// Links n lowest free clusters into a fresh chain ending in 0x0FFFFFFF.
Expected<std::vector<std::uint32_t>, Error> allocate_clusters(Fat32Image& img, std::size_t n);

/// First FAT copy as an abstract table over indices [0, cluster_limit).
model::FaTable abstract_fat(const Fat32Image& img);

}  // namespace fatws::fat32
