#include "fatws/fat32/format.hpp"

#include <bit>
#include <cstring>

#include "le.hpp"

namespace fatws::fat32 {

namespace {

constexpr std::uint16_t kFsInfoSector = 1;
constexpr std::uint16_t kBackupBootSector = 6;

void write_boot_sector(std::span<std::uint8_t> s, const FormatOptions& o, std::uint8_t spc,
                       std::uint32_t fat_size, std::uint32_t total) {
  const std::uint8_t jump[] = {0xEB, 0x58, 0x90};
  std::memcpy(s.data(), jump, 3);
  std::memcpy(s.data() + 3, "mkfs.fat", 8);
  le::store16(s, bpb::kBytesPerSector, o.bytes_per_sector);
  s[bpb::kSectorsPerCluster] = spc;
  le::store16(s, bpb::kReservedSectors, o.reserved_sectors);
  s[bpb::kNumFats] = o.num_fats;
  s[bpb::kMedia] = 0xF8;
  le::store16(s, bpb::kSectorsPerTrack, 32);
  le::store16(s, bpb::kNumHeads, 64);
  le::store32(s, bpb::kTotalSectors32, total);
  le::store32(s, bpb::kFatSize32, fat_size);
  le::store32(s, bpb::kRootCluster, kFirstDataCluster);
  le::store16(s, 48, kFsInfoSector);
  le::store16(s, 50, kBackupBootSector);
  s[bpb::kDriveNumber] = 0x80;
  s[66] = 0x29;
  le::store32(s, bpb::kVolumeId, o.volume_id);
  std::memcpy(s.data() + bpb::kVolumeLabel, "NO NAME    ", 11);
  std::memcpy(s.data() + 82, "FAT32   ", 8);
  s[bpb::kSignature] = 0x55;
  s[bpb::kSignature + 1] = 0xAA;
}

void write_fsinfo(std::span<std::uint8_t> s, std::uint32_t free_count) {
  le::store32(s, 0, 0x41615252);
  le::store32(s, 484, 0x61417272);
  le::store32(s, 488, free_count);
  le::store32(s, 492, kFirstDataCluster + 1);
  le::store32(s, 508, 0xAA550000);
}

}  // namespace

Expected<Bytes, Error> format_image(const FormatOptions& o) {
  const std::uint32_t bps = o.bytes_per_sector;
  if (bps < kMinBytesPerSector || !std::has_single_bit(bps) || o.cluster_size % bps != 0 ||
      o.cluster_count == 0 || o.num_fats == 0 || o.reserved_sectors < 2)
    return Unexpected{Error::non_compliant};
  const std::uint32_t spc = o.cluster_size / bps;
  if (spc > 128 || !std::has_single_bit(spc)) return Unexpected{Error::non_compliant};

  const std::uint64_t fat_entries = std::uint64_t{o.cluster_count} + kFirstDataCluster;
  const std::uint64_t fat_size = (fat_entries * 4 + bps - 1) / bps;
  const std::uint64_t total =
      o.reserved_sectors + std::uint64_t{o.num_fats} * fat_size + std::uint64_t{o.cluster_count} * spc;
  if (total > 0xFFFFFFFFull || o.cluster_count > 0x0FFFFFF5u) return Unexpected{Error::non_compliant};

  Bytes img(total * bps, 0);
  std::span<std::uint8_t> all(img);
  write_boot_sector(all.subspan(0, bps), o, static_cast<std::uint8_t>(spc),
                    static_cast<std::uint32_t>(fat_size), static_cast<std::uint32_t>(total));
  write_fsinfo(all.subspan(kFsInfoSector * bps, bps), o.cluster_count - 1);
  if (o.reserved_sectors > kBackupBootSector + 1) {
    std::memcpy(&img[kBackupBootSector * bps], &img[0], bps);
    std::memcpy(&img[(kBackupBootSector + 1) * bps], &img[kFsInfoSector * bps], bps);
  }
  for (std::uint32_t f = 0; f < o.num_fats; ++f) {
    auto off = (o.reserved_sectors + f * fat_size) * bps;
    le::store32(all, off, 0x0FFFFF00u | 0xF8);
    le::store32(all, off + 4, 0x0FFFFFFF);
    le::store32(all, off + 8, kEocHigh);  // root directory
  }
  return img;
}

}  // namespace fatws::fat32
