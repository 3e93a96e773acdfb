#include "fatws/cosim.hpp"

#include <cstdio>
#include <fstream>
#include <iterator>
#include <system_error>

#include "fatws/fat32/format.hpp"
#include "fatws/hifat.hpp"
#include "fatws/syscalls.hpp"

namespace fatws::cosim {

namespace fs = std::filesystem;

namespace {

template <class... Args>
std::string format(const char* fmt, Args... args) {
  const int n = std::snprintf(nullptr, 0, fmt, args...);
  std::string s(static_cast<std::size_t>(n), '\0');
  std::snprintf(s.data(), s.size() + 1, fmt, args...);
  return s;
}

const char* plural(unsigned long n) { return n != 1 ? "s" : ""; }

CmdResult errno_failure(std::string_view what, sys::Errno e) {
  return {1, "", "fatws cp: " + std::string(what) + ": " + std::string(sys::errno_name(e)) + "\n"};
}

CmdResult usage_failure(std::string msg) { return {2, "", "fatws: " + msg + "\n"}; }

struct LoadedImage {
  fat32::Fat32Image img;
  sys::FsState state;
};

Expected<LoadedImage, std::string> load_image(const fs::path& p) {
  auto bytes = read_file(p);
  if (!bytes) return Unexpected{p.string() + ": cannot read image"};
  auto img = fat32::parse_image(*bytes, fat32::Compliance::relaxed);
  if (!img) return Unexpected{p.string() + ": " + std::string(to_string(img.error()))};
  auto tree = hifat::image_to_hifat(*img);
  if (!tree) return Unexpected{p.string() + ": " + std::string(to_string(tree.error()))};
  sys::Capacity cap{img->cluster_size(), fat32::count_of_clusters(*img)};
  return LoadedImage{std::move(*img), sys::FsState(std::move(*tree), cap)};
}

// Host-side errno mapping for the cases cp reports.
std::optional<sys::Errno> host_source_error(const fs::path& p) {
  std::error_code ec;
  auto st = fs::status(p, ec);
  if (!fs::exists(st)) return sys::Errno::enoent;
  if (fs::is_directory(st)) return sys::Errno::eisdir;
  return std::nullopt;
}

std::optional<sys::Errno> host_target_error(const fs::path& p) {
  std::error_code ec;
  if (fs::is_directory(p, ec)) return sys::Errno::eisdir;
  auto parent = p.parent_path();
  if (!parent.empty() && !fs::is_directory(parent, ec)) return sys::Errno::enoent;
  return std::nullopt;
}

CmdResult copy_out(const ImageRef& src, const fs::path& dst) {
  auto loaded = load_image(src.image);
  if (!loaded) return usage_failure(loaded.error());
  auto& st = loaded->state;
  auto fd = st.open(sys::kDefaultPid, src.inner);
  if (!fd) return errno_failure(src.inner.str(), fd.error());
  const auto size = st.lstat(sys::kDefaultPid, src.inner)->size;
  auto data = st.pread(sys::kDefaultPid, *fd, size, 0);
  if (!data) return errno_failure(src.inner.str(), data.error());
  if (auto e = host_target_error(dst)) return errno_failure(dst.string(), *e);
  if (!write_file_atomic(dst, *data)) return errno_failure(dst.string(), sys::Errno::enoent);
  return {};
}

CmdResult copy_in(const fs::path& src, const ImageRef& dst) {
  if (auto e = host_source_error(src)) return errno_failure(src.string(), *e);
  auto data = read_file(src);
  if (!data) return errno_failure(src.string(), sys::Errno::enoent);
  auto loaded = load_image(dst.image);
  if (!loaded) return usage_failure(loaded.error());
  auto& st = loaded->state;

  auto existing = st.lstat(sys::kDefaultPid, dst.inner);
  if (!existing) {
    if (existing.error() != sys::Errno::enoent) return errno_failure(dst.inner.str(), existing.error());
    if (auto made = st.mknod(sys::kDefaultPid, dst.inner); !made)
      return errno_failure(dst.inner.str(), made.error());
  } else if (existing->kind == sys::StatResult::Kind::directory) {
    return errno_failure(dst.inner.str(), sys::Errno::eisdir);
  } else if (existing->size > data->size()) {
    // No truncate call exists; cp still has to leave exactly the new bytes.
    st.replace_fs(*hifat::replace_contents(st.fs(), dst.inner, {}));
  }
  auto fd = st.open(sys::kDefaultPid, dst.inner);
  if (!fd) return errno_failure(dst.inner.str(), fd.error());
  auto n = st.pwrite(sys::kDefaultPid, *fd, *data, 0);
  if (!n) return errno_failure(dst.inner.str(), n.error());

  auto out = hifat::hifat_to_image(loaded->img, st.fs());
  if (!out) return errno_failure(dst.inner.str(), sys::Errno::enospc);
  if (!write_file_atomic(dst.image, fat32::serialize_image(*out)))
    return usage_failure(dst.image.string() + ": cannot write image");
  return {};
}

CmdResult copy_host(const fs::path& src, const fs::path& dst) {
  if (auto e = host_source_error(src)) return errno_failure(src.string(), *e);
  auto data = read_file(src);
  if (!data) return errno_failure(src.string(), sys::Errno::enoent);
  if (auto e = host_target_error(dst)) return errno_failure(dst.string(), *e);
  if (!write_file_atomic(dst, *data)) return errno_failure(dst.string(), sys::Errno::enoent);
  return {};
}

}  // namespace

std::optional<ImageRef> parse_image_ref(std::string_view arg) {
  const auto colon = arg.find(":/");
  if (colon == std::string_view::npos || colon == 0) return std::nullopt;
  return ImageRef{fs::path(std::string(arg.substr(0, colon))), Path::parse(arg.substr(colon + 1))};
}

std::optional<fat32::Bytes> read_file(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  if (!in) return std::nullopt;
  return fat32::Bytes(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
}

bool write_file_atomic(const fs::path& p, const fat32::Bytes& data) {
  auto tmp = p;
  tmp += ".fatws-tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) return false;
    out.write(reinterpret_cast<const char*>(data.data()), static_cast<std::streamsize>(data.size()));
    if (!out) {
      out.close();
      std::error_code ec;
      fs::remove(tmp, ec);
      return false;
    }
  }
  std::error_code ec;
  fs::rename(tmp, p, ec);
  if (ec) fs::remove(tmp, ec);
  return !ec;
}

std::string verbose_report(const fat32::ReservedArea& r, std::string_view name) {
  const unsigned heads = r.num_heads(), spt = r.sectors_per_track();
  const unsigned spc = r.sectors_per_cluster, nfats = r.num_fats;
  const unsigned long fatsz = r.fat_size_32, count = fat32::count_of_clusters(r);
  const unsigned rsvd = r.reserved_sector_count;
  std::string label = r.volume_label();
  while (!label.empty() && label.back() == ' ') label.pop_back();

  std::string s;
  s += format("%s has %u head%s and %u sector%s per track,\n", std::string(name).c_str(), heads,
              plural(heads), spt, plural(spt));
  s += format("hidden sectors 0x%04x;\n", static_cast<unsigned>(r.hidden_sectors()));
  s += format("logical sector size is %u,\n", static_cast<unsigned>(r.bytes_per_sector));
  s += format("using 0x%02x media descriptor, with %u sectors;\n", static_cast<unsigned>(r.media()),
              static_cast<unsigned>(r.total_sectors_32));
  s += format("drive number 0x%02x;\n", static_cast<unsigned>(r.drive_number()));
  s += format("filesystem has %u 32-bit FAT%s and %u sector%s per cluster.\n", nfats, plural(nfats), spc,
              plural(spc));
  s += format("FAT size is %lu sector%s, and provides %lu cluster%s.\n", fatsz, plural(fatsz), count,
              plural(count));
  s += format("There %s %u reserved sector%s.\n", rsvd != 1 ? "are" : "is", rsvd, plural(rsvd));
  s += format("Volume ID is %08lx, ", static_cast<unsigned long>(r.volume_id()));
  s += label.empty() || label == "NO NAME" ? std::string("no volume label.\n") : "volume label " + label + ".\n";
  s += format("Root directory starts at cluster %lu.\n", static_cast<unsigned long>(r.root_cluster));
  return s;
}

std::string field_report(const fat32::ReservedArea& r, fat32::Compliance c) {
  std::string s;
  s += format("bytes_per_sector=%u\n", static_cast<unsigned>(r.bytes_per_sector));
  s += format("sectors_per_cluster=%u\n", static_cast<unsigned>(r.sectors_per_cluster));
  s += format("reserved_sectors=%u\n", static_cast<unsigned>(r.reserved_sector_count));
  s += format("fat_count=%u\n", static_cast<unsigned>(r.num_fats));
  s += format("fat_size=%lu\n", static_cast<unsigned long>(r.fat_size_32));
  s += format("root_cluster=%lu\n", static_cast<unsigned long>(r.root_cluster));
  s += format("total_sectors=%lu\n", static_cast<unsigned long>(r.total_sectors_32));
  s += format("cluster_count=%lu\n", static_cast<unsigned long>(fat32::count_of_clusters(r)));
  s += format("compliant=%s (%s)\n", fat32::compliant_fat32_p(r, c) ? "yes" : "no",
              c == fat32::Compliance::strict ? "strict" : "relaxed");
  return s;
}

CmdResult cmd_info(const fs::path& image, bool verbose, fat32::Compliance c) {
  auto bytes = read_file(image);
  if (!bytes) return usage_failure(image.string() + ": cannot read image");
  auto head = fat32::parse_reserved(*bytes);
  if (!head) return usage_failure(image.string() + ": " + std::string(to_string(head.error())));

  CmdResult res;
  res.out = verbose ? verbose_report(*head, image.filename().string()) : field_report(*head, c);
  if (!fat32::compliant_fat32_p(*head, c)) {
    res.exit_code = 1;
    res.err = "fatws: " + image.string() + ": not a compliant FAT32 volume\n";
    return res;
  }
  if (auto full = fat32::parse_image(*bytes, fat32::Compliance::relaxed); !full)
    return usage_failure(image.string() + ": " + std::string(to_string(full.error())));
  return res;
}

CmdResult cmd_cp(std::string_view src, std::string_view dst) {
  auto s = parse_image_ref(src);
  auto d = parse_image_ref(dst);
  if (s && d) return usage_failure("cp: at most one side may be an image path");
  if (s) return copy_out(*s, fs::path(std::string(dst)));
  if (d) return copy_in(fs::path(std::string(src)), *d);
  return copy_host(fs::path(std::string(src)), fs::path(std::string(dst)));
}

CmdResult cmd_mkimage(const fs::path& out, std::uint32_t cluster_count, std::uint32_t cluster_size) {
  fat32::FormatOptions opts;
  opts.cluster_count = cluster_count;
  opts.cluster_size = cluster_size;
  auto bytes = fat32::format_image(opts);
  if (!bytes) return usage_failure("mkimage: unsatisfiable geometry");
  if (!write_file_atomic(out, *bytes)) return usage_failure(out.string() + ": cannot write image");
  return {};
}

}  // namespace fatws::cosim
