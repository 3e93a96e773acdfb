#include "fatws/syscalls.hpp"

namespace fatws::sys {

std::string_view errno_name(Errno e) {
  switch (e) {
    case Errno::enoent: return "ENOENT";
    case Errno::ebadf: return "EBADF";
    case Errno::eexist: return "EEXIST";
    case Errno::enotdir: return "ENOTDIR";
    case Errno::eisdir: return "EISDIR";
    case Errno::enospc: return "ENOSPC";
    case Errno::enametoolong: return "ENAMETOOLONG";
  }
  return "E?";
}

namespace {

Errno to_errno(Error e) {
  switch (e) {
    case Error::not_dir: return Errno::enotdir;
    case Error::exists: return Errno::eexist;
    case Error::no_space: return Errno::enospc;
    case Error::name_invalid: return Errno::enametoolong;
    default: return Errno::enoent;
  }
}

// Walk the path; ENOTDIR when a non-final component is a regular file.
Expected<const hifat::HiFatFile*, Errno> resolve(const hifat::HiFatFs& fs, const Path& path) {
  const hifat::HiFatDir* dir = &fs.root;
  const hifat::HiFatFile* cur = nullptr;
  for (const auto& name : path.names()) {
    if (dir == nullptr) return Unexpected{Errno::enotdir};
    cur = dir->find(name);
    if (cur == nullptr) return Unexpected{Errno::enoent};
    dir = cur->dir();
  }
  return cur;
}

template <class Map>
typename Map::key_type lowest_unused(const Map& m) {
  typename Map::key_type k = 0;
  for (const auto& [key, _] : m) {
    if (key != k) break;
    ++k;
  }
  return k;
}

}  // namespace

FsState::FsState(hifat::HiFatFs fs, std::optional<Capacity> capacity)
    : fs_(std::move(fs)), capacity_(capacity) {}

const std::map<Fd, std::uint32_t>* FsState::fd_table(Pid pid) const {
  auto it = fd_tables_.find(pid);
  return it == fd_tables_.end() ? nullptr : &it->second;
}

const FileTableEntry* FsState::entry_for(Pid pid, Fd fd) const {
  const auto* fds = fd_table(pid);
  if (fds == nullptr) return nullptr;
  auto it = fds->find(fd);
  if (it == fds->end()) return nullptr;
  return &file_table_.at(it->second);
}

Expected<Ok, Errno> FsState::fits(const hifat::HiFatFs& candidate) const {
  if (capacity_ &&
      hifat::clusters_needed(candidate, capacity_->cluster_size) > capacity_->cluster_count)
    return Unexpected{Errno::enospc};
  return Ok{};
}

Expected<StatResult, Errno> FsState::lstat(Pid, const Path& path) const {
  auto node = resolve(fs_, path);
  if (!node) return Unexpected{node.error()};
  if (*node == nullptr || (*node)->is_dir()) return StatResult{0, StatResult::Kind::directory};
  return StatResult{(*node)->data()->size(), StatResult::Kind::regular};
}

Expected<Fd, Errno> FsState::open(Pid pid, const Path& path) {
  auto node = resolve(fs_, path);
  if (!node) return Unexpected{node.error()};
  if (*node == nullptr || (*node)->is_dir()) return Unexpected{Errno::eisdir};
  auto& fds = fd_tables_[pid];
  const Fd fd = lowest_unused(fds);
  const auto index = lowest_unused(file_table_);
  file_table_.emplace(index, FileTableEntry{path, 0});
  fds.emplace(fd, index);
  return fd;
}

Expected<hifat::Bytes, Errno> FsState::pread(Pid pid, Fd fd, std::size_t count,
                                             std::uint64_t offset) const {
  const auto* entry = entry_for(pid, fd);
  if (entry == nullptr) return Unexpected{Errno::ebadf};
  const auto* f = hifat::lookup(fs_, entry->path);
  if (f == nullptr || f->is_dir()) return Unexpected{Errno::ebadf};
  const auto& data = *f->data();
  if (offset >= data.size()) return hifat::Bytes{};
  auto begin = static_cast<std::size_t>(offset);
  auto end = begin + std::min(count, data.size() - begin);
  return hifat::Bytes(data.begin() + static_cast<std::ptrdiff_t>(begin),
                      data.begin() + static_cast<std::ptrdiff_t>(end));
}

Expected<std::size_t, Errno> FsState::pwrite(Pid pid, Fd fd, std::span<const std::uint8_t> buf,
                                             std::uint64_t offset) {
  const auto* entry = entry_for(pid, fd);
  if (entry == nullptr) return Unexpected{Errno::ebadf};
  if (buf.empty()) return std::size_t{0};
  auto next = hifat::wrchs(fs_, entry->path, static_cast<std::size_t>(offset), buf);
  if (!next) return Unexpected{Errno::ebadf};
  if (auto ok = fits(*next); !ok) return Unexpected{ok.error()};
  fs_ = std::move(*next);
  return buf.size();
}

Expected<Ok, Errno> FsState::close(Pid pid, Fd fd) {
  auto pit = fd_tables_.find(pid);
  if (pit == fd_tables_.end()) return Unexpected{Errno::ebadf};
  auto it = pit->second.find(fd);
  if (it == pit->second.end()) return Unexpected{Errno::ebadf};
  const auto index = it->second;
  pit->second.erase(it);
  if (pit->second.empty()) fd_tables_.erase(pit);

  bool referenced = false;
  for (const auto& [_, fds] : fd_tables_)
    for (const auto& [__, idx] : fds) referenced |= idx == index;
  if (!referenced) file_table_.erase(index);
  return Ok{};
}

Expected<Ok, Errno> FsState::create(Pid, const Path& path, bool directory) {
  if (path.is_root()) return Unexpected{Errno::eexist};
  auto parent = resolve(fs_, path.parent());
  if (!parent) return Unexpected{parent.error()};
  if (*parent != nullptr && !(*parent)->is_dir()) return Unexpected{Errno::enotdir};
  if (hifat::lookup(fs_, path) != nullptr) return Unexpected{Errno::eexist};
  if (fat32::check_short_name(path.back()) != fat32::NameCheck::ok)
    return Unexpected{Errno::enametoolong};

  auto next = directory ? hifat::mkdir(fs_, path) : hifat::mknod(fs_, path);
  if (!next) return Unexpected{to_errno(next.error())};
  if (auto ok = fits(*next); !ok) return Unexpected{ok.error()};
  fs_ = std::move(*next);
  return Ok{};
}

Expected<Ok, Errno> FsState::mkdir(Pid pid, const Path& path) { return create(pid, path, true); }
Expected<Ok, Errno> FsState::mknod(Pid pid, const Path& path) { return create(pid, path, false); }

}  // namespace fatws::sys
