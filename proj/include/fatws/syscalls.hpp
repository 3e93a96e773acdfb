#pragma once

// POSIX subset over a HiFatFs: lstat, open, pread, pwrite, close, mkdir,
// mknod. Every call either succeeds or returns one Errno and leaves the
// state exactly as it was.

#include <cstdint>
#include <map>
#include <optional>
#include <span>
#include <string_view>

#include "fatws/expected.hpp"
#include "fatws/hifat.hpp"
#include "fatws/path.hpp"

namespace fatws::sys {

// Linux x86-64 numbering.
enum class Errno : int {
  enoent = 2,
  ebadf = 9,
  eexist = 17,
  enotdir = 20,
  eisdir = 21,
  enospc = 28,
  enametoolong = 36,
};

std::string_view errno_name(Errno e);
constexpr int errno_value(Errno e) { return static_cast<int>(e); }

using Pid = std::uint32_t;
using Fd = std::uint32_t;

inline constexpr Pid kDefaultPid = 1;

struct StatResult {
  enum class Kind { regular, directory };
  std::uint64_t size = 0;
  Kind kind = Kind::regular;
  friend bool operator==(const StatResult&, const StatResult&) = default;
};

struct FileTableEntry {
  Path path;
  std::uint64_t offset = 0;
  friend bool operator==(const FileTableEntry&, const FileTableEntry&) = default;
};

/// When set, the state stands for a volume of `cluster_count` clusters and
/// any change whose layout would not fit fails with ENOSPC.
struct Capacity {
  std::size_t cluster_size = 512;
  std::size_t cluster_count = 0;
};

class FsState {
 public:
  explicit FsState(hifat::HiFatFs fs = {}, std::optional<Capacity> capacity = std::nullopt);

  Expected<StatResult, Errno> lstat(Pid pid, const Path& path) const;
  Expected<Fd, Errno> open(Pid pid, const Path& path);
  Expected<hifat::Bytes, Errno> pread(Pid pid, Fd fd, std::size_t count, std::uint64_t offset) const;
  Expected<std::size_t, Errno> pwrite(Pid pid, Fd fd, std::span<const std::uint8_t> buf,
                                      std::uint64_t offset);
  Expected<Ok, Errno> close(Pid pid, Fd fd);
  Expected<Ok, Errno> mkdir(Pid pid, const Path& path);
  Expected<Ok, Errno> mknod(Pid pid, const Path& path);

  const hifat::HiFatFs& fs() const { return fs_; }
  /// Swaps the tree underneath open descriptors (used to splice in a
  /// round-tripped copy of the same tree).
  void replace_fs(hifat::HiFatFs fs) { fs_ = std::move(fs); }
  const std::optional<Capacity>& capacity() const { return capacity_; }
  const std::map<std::uint32_t, FileTableEntry>& file_table() const { return file_table_; }
  const std::map<Fd, std::uint32_t>* fd_table(Pid pid) const;

 private:
  Expected<Ok, Errno> fits(const hifat::HiFatFs& candidate) const;
  Expected<Ok, Errno> create(Pid pid, const Path& path, bool directory);
  const FileTableEntry* entry_for(Pid pid, Fd fd) const;

  hifat::HiFatFs fs_;
  std::optional<Capacity> capacity_;
  std::map<std::uint32_t, FileTableEntry> file_table_;
  std::map<Pid, std::map<Fd, std::uint32_t>> fd_tables_;
};

}  // namespace fatws::sys
