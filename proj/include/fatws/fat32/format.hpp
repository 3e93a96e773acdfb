#pragma once

#include <cstdint>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"
#include "fatws/fat32/image.hpp"

namespace fatws::fat32 {

struct FormatOptions {
  std::uint32_t cluster_count = 8;
  std::uint32_t cluster_size = 512;
  std::uint16_t bytes_per_sector = 512;
  std::uint16_t reserved_sectors = 32;
  std::uint8_t num_fats = 2;
  std::uint32_t volume_id = 0x12345678;
};

/// Builds a volume with an empty root directory at cluster 2. Fails with
/// non_compliant when the geometry cannot be expressed.
Expected<Bytes, Error> format_image(const FormatOptions& opts);

}  // namespace fatws::fat32
