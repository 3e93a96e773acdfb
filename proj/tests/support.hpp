#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "fatws/cosim.hpp"
#include "fatws/fat32/image.hpp"

namespace fatws::test {

inline std::filesystem::path fixture(std::string_view name) {
  return std::filesystem::path(FATWS_FIXTURE_DIR) / std::string(name);
}

inline fat32::Bytes load(std::string_view name) { return *cosim::read_file(fixture(name)); }

inline fat32::Bytes bytes(std::string_view s) { return fat32::Bytes(s.begin(), s.end()); }

inline std::string text(const fat32::Bytes& b) { return std::string(b.begin(), b.end()); }

inline fat32::Fat32Image parse_fixture(std::string_view name) {
  return *fat32::parse_image(load(name), fat32::Compliance::relaxed);
}

/// Scratch directory removed with the object.
class TempDir {
 public:
  TempDir() {
    std::random_device rd;
    path_ = std::filesystem::temp_directory_path() / ("fatws-test-" + std::to_string(rd()));
    std::filesystem::create_directories(path_);
  }
  ~TempDir() {
    std::error_code ec;
    std::filesystem::remove_all(path_, ec);
  }
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  std::filesystem::path operator/(std::string_view name) const { return path_ / std::string(name); }
  const std::filesystem::path& path() const { return path_; }

 private:
  std::filesystem::path path_;
};

}  // namespace fatws::test
