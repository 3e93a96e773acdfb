#pragma once

// Command bodies behind the fatws CLI. Each returns its exit code and the
// text destined for stdout and stderr so tests can drive them in-process.

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>

#include "fatws/fat32/image.hpp"
#include "fatws/path.hpp"

namespace fatws::cosim {

struct CmdResult {
  int exit_code = 0;
  std::string out;
  std::string err;
};

/// `img.fat:/inner/path`
struct ImageRef {
  std::filesystem::path image;
  Path inner;
};

std::optional<ImageRef> parse_image_ref(std::string_view arg);

/// mkfs.fat -v style summary. `name` stands in for the device name.
std::string verbose_report(const fat32::ReservedArea& r, std::string_view name);
/// One key=value line per field.
std::string field_report(const fat32::ReservedArea& r, fat32::Compliance c);

CmdResult cmd_info(const std::filesystem::path& image, bool verbose,
                   fat32::Compliance c = fat32::Compliance::relaxed);
CmdResult cmd_cp(std::string_view src, std::string_view dst);
CmdResult cmd_mkimage(const std::filesystem::path& out, std::uint32_t cluster_count,
                      std::uint32_t cluster_size);

std::optional<fat32::Bytes> read_file(const std::filesystem::path& p);
/// Writes through a sibling temporary and renames it into place.
bool write_file_atomic(const std::filesystem::path& p, const fat32::Bytes& data);

}  // namespace fatws::cosim
