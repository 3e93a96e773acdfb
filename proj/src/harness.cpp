#include "fatws/harness.hpp"

#include <algorithm>
#include <cctype>
#include <set>
#include <sstream>

#include "fatws/fat32/format.hpp"
#include "fatws/fat32/image.hpp"
#include "fatws/syscalls.hpp"

namespace fatws::harness {

using namespace model;

namespace {

// Every pool name is a valid 8.3 name so the same shapes serve HiFat.
constexpr std::string_view kNames[] = {"A", "B", "C.TXT", "D", "E.BIN", "F"};
constexpr char kAlphabet[] = {'a', 'b', 'c', 'x', 'y', 'z', '\0'};

std::size_t uniform(Rng& rng, std::size_t lo, std::size_t hi) {
  return std::uniform_int_distribution<std::size_t>(lo, hi)(rng);
}

bool coin(Rng& rng, double p) { return std::bernoulli_distribution(p)(rng); }

std::string random_text(Rng& rng, std::size_t max_len) {
  std::string s(uniform(rng, 0, max_len), 'a');
  for (auto& c : s) c = kAlphabet[uniform(rng, 0, std::size(kAlphabet) - 1)];
  return s;
}

std::string printable(std::string_view s) {
  std::string out;
  for (char c : s) out += c == '\0' ? std::string("\\0") : std::string(1, c);
  return "\"" + out + "\"";
}

std::string printable_opt(const std::optional<std::string>& s) { return s ? printable(std::string_view(*s)) : "none"; }

// Level-independent tree shape.
struct Shape {
  std::vector<Path> dirs;
  std::vector<std::pair<Path, std::string>> files;
};

Shape gen_shape(Rng& rng, const Budget& b) {
  Shape s;
  s.dirs.push_back(Path{});
  std::size_t blocks_left = b.max_disk_blocks - 2;  // two reserved L6 entries
  auto add_file = [&](Path p) {
    auto text = random_text(rng, std::min(b.max_text, blocks_left * b.block_size));
    blocks_left -= blocks_needed(text.size(), b.block_size);
    s.files.emplace_back(std::move(p), std::move(text));
  };
  add_file(Path{std::string(kNames[uniform(rng, 0, std::size(kNames) - 1)])});

  auto taken = [&](const Path& p) {
    return std::find(s.dirs.begin(), s.dirs.end(), p) != s.dirs.end() ||
           std::any_of(s.files.begin(), s.files.end(), [&](const auto& f) { return f.first == p; });
  };
  const std::size_t want = uniform(rng, 1, b.max_files);
  for (std::size_t attempt = 0; attempt < 64 && s.files.size() < want; ++attempt) {
    const Path parent = s.dirs[uniform(rng, 0, s.dirs.size() - 1)];
    auto p = parent.child(std::string(kNames[uniform(rng, 0, std::size(kNames) - 1)]));
    if (taken(p)) continue;
    if (p.depth() < b.max_depth && coin(rng, 0.25))
      s.dirs.push_back(std::move(p));
    else
      add_file(std::move(p));
  }
  return s;
}

template <class File, class Make>
Node<File> build_tree(const Shape& s, Make make) {
  auto root = Node<File>::directory();
  for (std::size_t i = 1; i < s.dirs.size(); ++i) (void)insert(root, s.dirs[i], Node<File>::directory());
  for (std::size_t i = 0; i < s.files.size(); ++i)
    (void)insert(root, s.files[i].first, Node<File>::file(make(i)));
  return root;
}

// Scatters every file's blocks over a shuffled disk of `reserved` unused
// leading blocks plus the needed ones plus some spare.
struct Placement {
  std::vector<std::vector<std::size_t>> indices;
  std::vector<Block> disk;
};

Placement place(Rng& rng, const Shape& s, const Budget& b, std::size_t reserved) {
  std::size_t used = 0;
  for (const auto& [_, text] : s.files) used += blocks_needed(text.size(), b.block_size);
  const std::size_t room = b.max_disk_blocks > reserved + used ? b.max_disk_blocks - reserved - used : 0;
  const std::size_t spare = coin(rng, 0.3) ? 0 : uniform(rng, 0, room);
  const std::size_t size = reserved + used + spare;

  Placement pl;
  pl.disk.resize(size);
  for (auto& blk : pl.disk) {
    blk = random_text(rng, 0);
    blk.resize(b.block_size, 'q');
  }
  std::vector<std::size_t> slots(size - reserved);
  for (std::size_t i = 0; i < slots.size(); ++i) slots[i] = reserved + i;
  std::shuffle(slots.begin(), slots.end(), rng);

  std::size_t next = 0;
  for (const auto& [_, text] : s.files) {
    auto blocks = make_blocks(text, b.block_size);
    std::vector<std::size_t> mine;
    for (auto& blk : blocks) {
      mine.push_back(slots[next++]);
      pl.disk[mine.back()] = std::move(blk);
    }
    pl.indices.push_back(std::move(mine));
  }
  return pl;
}

AllocationVector exact_alv(const Placement& pl) {
  AllocationVector alv(pl.disk.size(), false);
  for (const auto& ix : pl.indices)
    for (auto i : ix) alv[i] = true;
  return alv;
}

// Structural invariants re-checked on every state a property builds.
bool level_invariant(const L1Fs& fs) { return well_formed(fs); }
bool level_invariant(const L2Fs& fs) { return well_formed(fs); }
bool level_invariant(const L3Fs& fs) { return well_formed(fs); }
bool level_invariant(const L4Fs& fs) { return l4_stricter_fs_p(fs); }
bool level_invariant(const L5Fs& fs) { return l4_stricter_fs_p(fs); }
bool level_invariant(const L6Fs& fs) {
  auto down = convert_down(fs);
  return down && l4_stricter_fs_p(*down);
}

template <class Fs>
constexpr bool kBounded = std::is_same_v<Fs, L4Fs> || std::is_same_v<Fs, L5Fs> || std::is_same_v<Fs, L6Fs>;

template <class Fs>
std::vector<Path> file_paths(const Fs& fs) {
  std::vector<Path> out;
  for_each_file(fs.root, [&](const Path& p, const auto&) { out.push_back(p); });
  return out;
}

template <class Fs>
std::size_t file_length(const Fs& fs, const Path& p) {
  const auto* f = lookup_file(fs.root, p);
  if constexpr (std::is_same_v<Fs, L1Fs>)
    return f->contents.size();
  else
    return f->length;
}

Path random_pool_path(Rng& rng) {
  Path p;
  const std::size_t depth = uniform(rng, 1, 2);
  for (std::size_t i = 0; i < depth; ++i)
    p = p.child(std::string(kNames[uniform(rng, 0, std::size(kNames) - 1)]));
  return p;
}

// Mostly existing files, sometimes a directory, the root or a random path.
Path random_path(Rng& rng, const std::vector<Path>& files) {
  const auto roll = uniform(rng, 0, 9);
  if (roll < 7) return files[uniform(rng, 0, files.size() - 1)];
  if (roll == 7) return files[uniform(rng, 0, files.size() - 1)].parent();
  return random_pool_path(rng);
}

// A path distinct from p, usually another regular file when one exists.
Path other_path(Rng& rng, const std::vector<Path>& files, const Path& p) {
  if (files.size() > 1 && coin(rng, 0.8)) {
    Path q = p;
    while (q == p) q = files[uniform(rng, 0, files.size() - 1)];
    return q;
  }
  Path q = random_path(rng, files);
  while (q == p) q = random_path(rng, files);
  return q;
}

template <class Fs>
WriteFn<Fs> default_write() {
  return [](const Fs& fs, const Path& p, std::size_t s, std::string_view t) { return wrchs(fs, p, s, t); };
}

struct Recorder {
  Report r;
  void fail(std::uint64_t seed, std::string what) {
    if (r.failures++ == 0) {
      r.failing_seed = seed;
      r.counterexample = std::move(what);
    }
  }
};

template <class Fs>
std::string level_name() {
  if constexpr (std::is_same_v<Fs, L1Fs>) return "L1";
  if constexpr (std::is_same_v<Fs, L2Fs>) return "L2";
  if constexpr (std::is_same_v<Fs, L3Fs>) return "L3";
  if constexpr (std::is_same_v<Fs, L4Fs>) return "L4";
  if constexpr (std::is_same_v<Fs, L5Fs>) return "L5";
  if constexpr (std::is_same_v<Fs, L6Fs>) return "L6";
  if constexpr (std::is_same_v<Fs, hifat::HiFatFs>) return "hifat";
  return "?";
}

hifat::Bytes to_bytes(std::string_view s) { return hifat::Bytes(s.begin(), s.end()); }

}  // namespace

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial) {
  // splitmix64 step over base + trial
  std::uint64_t z = base + 0x9E3779B97F4A7C15ull * (trial + 1);
  z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ull;
  z = (z ^ (z >> 27)) * 0x94D049BB133111EBull;
  return z ^ (z >> 31);
}

std::string Report::summary() const {
  std::ostringstream os;
  os << property << ": " << (passed() ? "PASS" : "FAIL") << " " << (trials - failures) << "/" << trials;
  if (vacuous != 0) os << " (" << vacuous << " vacuous)";
  if (!coverage.empty()) {
    os << " [";
    const char* sep = "";
    for (const auto& [k, v] : coverage) {
      os << sep << k << "=" << v;
      sep = " ";
    }
    os << "]";
  }
  if (failing_seed) os << " first failing seed " << *failing_seed << ": " << counterexample;
  return os.str();
}

template <>
L1Fs gen_fs<L1Fs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  return L1Fs{build_tree<L1File>(s, [&](std::size_t i) { return L1File{s.files[i].second}; })};
}

template <>
L2Fs gen_fs<L2Fs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  return L2Fs{build_tree<L2File>(s, [&](std::size_t i) {
    return L2File{s.files[i].second, s.files[i].second.size()};
  })};
}

template <>
L3Fs gen_fs<L3Fs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  auto pl = place(rng, s, b, 0);
  auto root = build_tree<L3File>(s, [&](std::size_t i) {
    return L3File{pl.indices[i], s.files[i].second.size()};
  });
  return L3Fs{std::move(root), std::move(pl.disk), b.block_size};
}

template <>
L4Fs gen_fs<L4Fs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  auto pl = place(rng, s, b, 0);
  auto root = build_tree<L3File>(s, [&](std::size_t i) {
    return L3File{pl.indices[i], s.files[i].second.size()};
  });
  auto alv = exact_alv(pl);
  return L4Fs{std::move(root), std::move(pl.disk), std::move(alv), b.block_size};
}

template <>
L5Fs gen_fs<L5Fs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  auto pl = place(rng, s, b, 0);
  auto root = build_tree<L5File>(s, [&](std::size_t i) {
    L5Meta meta{static_cast<std::uint32_t>(uniform(rng, 0, 1000)),
                static_cast<std::uint32_t>(uniform(rng, 0, 07777))};
    return L5File{pl.indices[i], s.files[i].second.size(), meta};
  });
  auto alv = exact_alv(pl);
  return L5Fs{std::move(root), std::move(pl.disk), std::move(alv), b.block_size};
}

template <>
L6Fs gen_fs<L6Fs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  auto pl = place(rng, s, b, kFirstDataIndex);
  FaTable fat;
  fat.entries.assign(pl.disk.size(), 0);
  fat.entries[0] = 0x0FFFFFF8;
  fat.entries[1] = kEocWrite;
  for (const auto& ix : pl.indices)
    for (std::size_t k = 0; k < ix.size(); ++k)
      fat.entries[ix[k]] = k + 1 < ix.size() ? static_cast<std::uint32_t>(ix[k + 1])
                                             : static_cast<std::uint32_t>(uniform(rng, kEocFloor, kEocWrite));
  auto root = build_tree<L6File>(s, [&](std::size_t i) {
    std::optional<std::size_t> first;
    if (!pl.indices[i].empty()) first = pl.indices[i].front();
    return L6File{first, s.files[i].second.size()};
  });
  return L6Fs{std::move(root), std::move(pl.disk), std::move(fat), b.block_size};
}

template <>
hifat::HiFatFs gen_fs<hifat::HiFatFs>(std::uint64_t seed, const Budget& b) {
  Rng rng(seed);
  auto s = gen_shape(rng, b);
  hifat::HiFatFs fs;
  for (std::size_t i = 1; i < s.dirs.size(); ++i) fs = *hifat::mkdir(fs, s.dirs[i]);
  for (const auto& [p, text] : s.files) {
    fs = *hifat::mknod(fs, p);
    fs = *hifat::replace_contents(fs, p, to_bytes(text));
  }
  return fs;
}

std::optional<Target> parse_target(std::string_view s) {
  std::string k(s);
  std::transform(k.begin(), k.end(), k.begin(), [](unsigned char c) { return std::tolower(c); });
  if (k == "l1" || k == "1") return Target::l1;
  if (k == "l2" || k == "2") return Target::l2;
  if (k == "l3" || k == "3") return Target::l3;
  if (k == "l4" || k == "4") return Target::l4;
  if (k == "l5" || k == "5") return Target::l5;
  if (k == "l6" || k == "6") return Target::l6;
  if (k == "hifat" || k == "m1") return Target::hifat;
  if (k == "syscall" || k == "sys") return Target::syscall;
  return std::nullopt;
}

std::optional<Pair> pair_for_upper(Target upper) {
  switch (upper) {
    case Target::l2: return Pair::l2_l1;
    case Target::l3: return Pair::l3_l2;
    case Target::l4: return Pair::l4_l3;
    case Target::l5: return Pair::l5_l4;
    case Target::l6: return Pair::l6_l4;
    default: return std::nullopt;
  }
}

// ---------------------------------------------------------------------------
// Model-level properties

template <class Fs>
Report check_row1(std::size_t trials, std::uint64_t seed, WriteFn<Fs> write, const Budget& b) {
  if (!write) write = default_write<Fs>();
  Recorder rec;
  rec.r.property = "row1[" + level_name<Fs>() + "]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto fs = gen_fs<Fs>(s, b);
    Rng rng(s ^ 0xA5A5A5A5u);
    const auto files = file_paths(fs);
    const auto p = files[uniform(rng, 0, files.size() - 1)];
    const auto start = uniform(rng, 0, file_length(fs, p) + 4);
    const auto text = random_text(rng, 12);

    auto w = write(fs, p, start, text);
    if (!w) {
      if (kBounded<Fs> && w.error() == Error::no_space)
        ++rec.r.vacuous;
      else
        rec.fail(s, "write to " + p.str() + " failed: " + std::string(to_string(w.error())));
      continue;
    }
    if (!level_invariant(*w)) {
      rec.fail(s, "invariant broken after write to " + p.str());
      continue;
    }
    auto got = rdchs(*w, p, start, text.size());
    if (got != text)
      rec.fail(s, "wrote " + printable(text) + " at " + p.str() + "@" + std::to_string(start) +
                      ", read " + printable_opt(got));
  }
  return rec.r;
}

template <class Fs>
Report check_row2(std::size_t trials, std::uint64_t seed, WriteFn<Fs> write, const Budget& b) {
  if (!write) write = default_write<Fs>();
  Recorder rec;
  rec.r.property = "row2[" + level_name<Fs>() + "]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto fs = gen_fs<Fs>(s, b);
    Rng rng(s ^ 0x5A5A5A5Au);
    const auto files = file_paths(fs);
    const auto p1 = files[uniform(rng, 0, files.size() - 1)];
    const Path p2 = other_path(rng, files, p1);
    const auto len1 = file_length(fs, p1);
    const auto s1 = uniform(rng, 0, len1 + 2);
    const auto n1 = uniform(rng, 0, len1 + 2);
    const auto s2 = uniform(rng, 0, 16);
    const auto text2 = random_text(rng, 12);

    const auto before = rdchs(fs, p1, s1, n1);
    auto w = write(fs, p2, s2, text2);
    if (!w) {
      if (w.error() != Error::not_found && w.error() != Error::no_space)
        rec.fail(s, "unexpected write error " + std::string(to_string(w.error())));
      ++rec.r.vacuous;
      continue;
    }
    if (!level_invariant(*w)) {
      rec.fail(s, "invariant broken after write to " + p2.str());
      continue;
    }
    const auto after = rdchs(*w, p1, s1, n1);
    if (before != after)
      rec.fail(s, "write to " + p2.str() + " changed read of " + p1.str() + ": " + printable_opt(before) +
                      " -> " + printable_opt(after));
  }
  return rec.r;
}

template <class Fs>
Report check_compose(std::size_t trials, std::uint64_t seed, const Budget& b) {
  Recorder rec;
  rec.r.property = "compose[" + level_name<Fs>() + "]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto fs = gen_fs<Fs>(s, b);
    Rng rng(s ^ 0x3C3C3C3Cu);
    const auto files = file_paths(fs);
    const auto p1 = files[uniform(rng, 0, files.size() - 1)];
    const Path p2 = other_path(rng, files, p1);
    const auto s1 = uniform(rng, 0, file_length(fs, p1) + 4);
    const auto text1 = random_text(rng, 12);
    const auto s2 = uniform(rng, 0, 40);
    const auto text2 = random_text(rng, 12);

    auto w1 = wrchs(fs, p1, s1, text1);
    if (!w1) {
      ++rec.r.vacuous;
      continue;
    }
    auto w2 = wrchs(*w1, p2, s2, text2);
    const auto& final_fs = w2 ? *w2 : *w1;
    if (!level_invariant(final_fs)) {
      rec.fail(s, "invariant broken");
      continue;
    }
    auto got = rdchs(final_fs, p1, s1, text1.size());
    if (got != text1)
      rec.fail(s, "wrote " + printable(text1) + " to " + p1.str() + " then " + p2.str() + ", read " +
                      printable_opt(got));
  }
  return rec.r;
}

template <class Upper, class Lower>
Report check_commute(std::size_t trials, std::uint64_t seed, ConvertFn<Upper, Lower> convert,
                     const Budget& b) {
  if (!convert) convert = [](const Upper& u) { return convert_down(u); };
  Recorder rec;
  rec.r.property = "commute[" + level_name<Upper>() + "->" + level_name<Lower>() + "]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto up = gen_fs<Upper>(s, b);
    Rng rng(s ^ 0xC3C3C3C3u);
    auto lo = convert(up);
    if (!lo) {
      rec.fail(s, "conversion of generated instance failed");
      continue;
    }
    if (!level_invariant(*lo)) {
      rec.fail(s, "converted instance breaks lower invariant");
      continue;
    }
    const auto files = file_paths(up);

    // Read triangle.
    const auto rp = random_path(rng, files);
    const auto rs = uniform(rng, 0, 20);
    const auto rn = uniform(rng, 0, 20);
    if (rdchs(up, rp, rs, rn) != rdchs(*lo, rp, rs, rn)) {
      rec.fail(s, "read of " + rp.str() + " differs across conversion");
      continue;
    }

    // Write square.
    const auto wp = random_path(rng, files);
    const auto ws = uniform(rng, 0, 24);
    const auto text = random_text(rng, 16);
    auto wu = wrchs(up, wp, ws, text);
    if (!wu) {
      ++rec.r.vacuous;
      continue;
    }
    auto wl = wrchs(*lo, wp, ws, text);
    if (!wl) {
      rec.fail(s, "lower write failed where upper succeeded at " + wp.str());
      continue;
    }
    auto down = convert(*wu);
    if (!down || !(*down == *wl)) {
      rec.fail(s, "write square does not commute at " + wp.str());
      continue;
    }
    // Composite: read after write through either route.
    if (rdchs(*wu, wp, ws, text.size()) != text || rdchs(*wl, wp, ws, text.size()) != text)
      rec.fail(s, "read-after-write differs across conversion at " + wp.str());
  }
  return rec.r;
}

#define FATWS_LEVEL(Fs)                                                                    \
  template Report check_row1<Fs>(std::size_t, std::uint64_t, WriteFn<Fs>, const Budget&); \
  template Report check_row2<Fs>(std::size_t, std::uint64_t, WriteFn<Fs>, const Budget&); \
  template Report check_compose<Fs>(std::size_t, std::uint64_t, const Budget&);
FATWS_LEVEL(L1Fs)
FATWS_LEVEL(L2Fs)
FATWS_LEVEL(L3Fs)
FATWS_LEVEL(L4Fs)
FATWS_LEVEL(L5Fs)
FATWS_LEVEL(L6Fs)
#undef FATWS_LEVEL

template Report check_commute<L2Fs, L1Fs>(std::size_t, std::uint64_t, ConvertFn<L2Fs, L1Fs>, const Budget&);
template Report check_commute<L3Fs, L2Fs>(std::size_t, std::uint64_t, ConvertFn<L3Fs, L2Fs>, const Budget&);
template Report check_commute<L4Fs, L3Fs>(std::size_t, std::uint64_t, ConvertFn<L4Fs, L3Fs>, const Budget&);
template Report check_commute<L5Fs, L4Fs>(std::size_t, std::uint64_t, ConvertFn<L5Fs, L4Fs>, const Budget&);
template Report check_commute<L6Fs, L4Fs>(std::size_t, std::uint64_t, ConvertFn<L6Fs, L4Fs>, const Budget&);

// ---------------------------------------------------------------------------
// HiFat and syscall layers

namespace {

std::vector<Path> hifat_files(const hifat::HiFatDir& dir, const Path& prefix = {}) {
  std::vector<Path> out;
  for (const auto& e : dir.entries) {
    auto p = prefix.child(e.name);
    if (e.is_dir()) {
      auto sub = hifat_files(*e.dir(), p);
      out.insert(out.end(), sub.begin(), sub.end());
    } else {
      out.push_back(std::move(p));
    }
  }
  return out;
}

std::optional<std::string> as_text(const std::optional<hifat::Bytes>& b) {
  if (!b) return std::nullopt;
  return std::string(b->begin(), b->end());
}

Report hifat_row(bool second, std::size_t trials, std::uint64_t seed) {
  Recorder rec;
  rec.r.property = std::string(second ? "row2" : "row1") + "[hifat]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto fs = gen_fs<hifat::HiFatFs>(s);
    Rng rng(s ^ 0x0F0F0F0Fu);
    const auto files = hifat_files(fs.root);
    const auto p1 = files[uniform(rng, 0, files.size() - 1)];
    const auto len1 = hifat::lookup(fs, p1)->data()->size();
    if (!second) {
      const auto start = uniform(rng, 0, len1 + 4);
      const auto text = to_bytes(random_text(rng, 12));
      auto w = hifat::wrchs(fs, p1, start, text);
      if (!w || hifat::rdchs(*w, p1, start, text.size()) != text)
        rec.fail(s, "hifat read-after-write mismatch at " + p1.str());
      continue;
    }
    const Path p2 = other_path(rng, files, p1);
    const auto s1 = uniform(rng, 0, len1 + 2);
    const auto n1 = uniform(rng, 0, len1 + 2);
    const auto before = hifat::rdchs(fs, p1, s1, n1);
    auto w = hifat::wrchs(fs, p2, uniform(rng, 0, 40), to_bytes(random_text(rng, 12)));
    if (!w) {
      ++rec.r.vacuous;
      continue;
    }
    if (hifat::rdchs(*w, p1, s1, n1) != before)
      rec.fail(s, "hifat write to " + p2.str() + " changed " + p1.str() + ": was " +
                      printable_opt(as_text(before)));
  }
  return rec.r;
}

Report syscall_row(bool second, std::size_t trials, std::uint64_t seed) {
  using sys::kDefaultPid;
  Recorder rec;
  rec.r.property = std::string(second ? "row2" : "row1") + "[syscall]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    sys::FsState st(gen_fs<hifat::HiFatFs>(s));
    Rng rng(s ^ 0xF0F0F0F0u);
    const auto files = hifat_files(st.fs().root);
    const auto p1 = files[uniform(rng, 0, files.size() - 1)];
    auto fd1 = st.open(kDefaultPid, p1);
    if (!fd1) {
      rec.fail(s, "open " + p1.str() + " failed");
      continue;
    }
    const auto len1 = st.lstat(kDefaultPid, p1)->size;
    if (!second) {
      const auto off = uniform(rng, 0, len1 + 4);
      const auto text = to_bytes(random_text(rng, 12));
      auto n = st.pwrite(kDefaultPid, *fd1, text, off);
      auto got = st.pread(kDefaultPid, *fd1, text.size(), off);
      if (!n || *n != text.size() || !got || *got != text)
        rec.fail(s, "pwrite/pread mismatch on " + p1.str() + "@" + std::to_string(off));
      continue;
    }
    // A second regular file, created if the tree has only one.
    Path p2;
    for (const auto& f : files)
      if (f != p1) p2 = f;
    if (p2.is_root()) {
      p2 = Path{"NEW.TXT"};
      (void)st.mknod(kDefaultPid, p2);
    }
    auto fd2 = st.open(kDefaultPid, p2);
    if (!fd2) {
      rec.fail(s, "open " + p2.str() + " failed");
      continue;
    }
    const auto off1 = uniform(rng, 0, len1 + 2);
    const auto count1 = uniform(rng, 0, len1 + 2);
    const auto before = st.pread(kDefaultPid, *fd1, count1, off1);
    (void)st.pwrite(kDefaultPid, *fd2, to_bytes(random_text(rng, 12)), uniform(rng, 0, 40));
    const auto after = st.pread(kDefaultPid, *fd1, count1, off1);
    if (!before || !after || *before != *after)
      rec.fail(s, "pwrite via " + p2.str() + " changed pread of " + p1.str());
  }
  return rec.r;
}

Report hifat_compose(std::size_t trials, std::uint64_t seed) {
  Recorder rec;
  rec.r.property = "compose[hifat]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto fs = gen_fs<hifat::HiFatFs>(s);
    Rng rng(s ^ 0x3C3C3C3Cu);
    const auto files = hifat_files(fs.root);
    const auto p1 = files[uniform(rng, 0, files.size() - 1)];
    const Path p2 = other_path(rng, files, p1);
    const auto s1 = uniform(rng, 0, hifat::lookup(fs, p1)->data()->size() + 4);
    const auto text1 = to_bytes(random_text(rng, 12));
    auto w1 = hifat::wrchs(fs, p1, s1, text1);
    if (!w1) {
      rec.fail(s, "hifat write to " + p1.str() + " failed");
      continue;
    }
    auto w2 = hifat::wrchs(*w1, p2, uniform(rng, 0, 40), to_bytes(random_text(rng, 12)));
    const auto& final_fs = w2 ? *w2 : *w1;
    if (hifat::rdchs(final_fs, p1, s1, text1.size()) != text1)
      rec.fail(s, "hifat write to " + p2.str() + " clobbered " + p1.str());
  }
  return rec.r;
}

Report syscall_compose(std::size_t trials, std::uint64_t seed) {
  using sys::kDefaultPid;
  Recorder rec;
  rec.r.property = "compose[syscall]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    sys::FsState st(gen_fs<hifat::HiFatFs>(s));
    Rng rng(s ^ 0x3C3C3C3Cu);
    const auto files = hifat_files(st.fs().root);
    const auto p1 = files[uniform(rng, 0, files.size() - 1)];
    Path p2 = other_path(rng, files, p1);
    if (!hifat::lookup(st.fs(), p2)) (void)st.mknod(kDefaultPid, p2);
    auto fd1 = st.open(kDefaultPid, p1);
    auto fd2 = st.open(kDefaultPid, p2);
    if (!fd1) {
      rec.fail(s, "open " + p1.str() + " failed");
      continue;
    }
    const auto off1 = uniform(rng, 0, st.lstat(kDefaultPid, p1)->size + 4);
    const auto text1 = to_bytes(random_text(rng, 12));
    auto n = st.pwrite(kDefaultPid, *fd1, text1, off1);
    if (fd2) (void)st.pwrite(kDefaultPid, *fd2, to_bytes(random_text(rng, 12)), uniform(rng, 0, 40));
    auto got = st.pread(kDefaultPid, *fd1, text1.size(), off1);
    if (!n || !got || *got != text1)
      rec.fail(s, "pwrite via " + p2.str() + " clobbered " + p1.str());
  }
  return rec.r;
}

}  // namespace

Report check_row1(Target t, std::size_t trials, std::uint64_t seed) {
  switch (t) {
    case Target::l1: return check_row1<L1Fs>(trials, seed);
    case Target::l2: return check_row1<L2Fs>(trials, seed);
    case Target::l3: return check_row1<L3Fs>(trials, seed);
    case Target::l4: return check_row1<L4Fs>(trials, seed);
    case Target::l5: return check_row1<L5Fs>(trials, seed);
    case Target::l6: return check_row1<L6Fs>(trials, seed);
    case Target::hifat: return hifat_row(false, trials, seed);
    case Target::syscall: return syscall_row(false, trials, seed);
  }
  return {};
}

Report check_row2(Target t, std::size_t trials, std::uint64_t seed) {
  switch (t) {
    case Target::l1: return check_row2<L1Fs>(trials, seed);
    case Target::l2: return check_row2<L2Fs>(trials, seed);
    case Target::l3: return check_row2<L3Fs>(trials, seed);
    case Target::l4: return check_row2<L4Fs>(trials, seed);
    case Target::l5: return check_row2<L5Fs>(trials, seed);
    case Target::l6: return check_row2<L6Fs>(trials, seed);
    case Target::hifat: return hifat_row(true, trials, seed);
    case Target::syscall: return syscall_row(true, trials, seed);
  }
  return {};
}

Report check_compose(Target t, std::size_t trials, std::uint64_t seed) {
  switch (t) {
    case Target::l1: return check_compose<L1Fs>(trials, seed);
    case Target::l2: return check_compose<L2Fs>(trials, seed);
    case Target::l3: return check_compose<L3Fs>(trials, seed);
    case Target::l4: return check_compose<L4Fs>(trials, seed);
    case Target::l5: return check_compose<L5Fs>(trials, seed);
    case Target::l6: return check_compose<L6Fs>(trials, seed);
    case Target::hifat: return hifat_compose(trials, seed);
    case Target::syscall: return syscall_compose(trials, seed);
  }
  return {};
}

Report check_commute(Pair p, std::size_t trials, std::uint64_t seed) {
  switch (p) {
    case Pair::l2_l1: return check_commute<L2Fs, L1Fs>(trials, seed);
    case Pair::l3_l2: return check_commute<L3Fs, L2Fs>(trials, seed);
    case Pair::l4_l3: return check_commute<L4Fs, L3Fs>(trials, seed);
    case Pair::l5_l4: return check_commute<L5Fs, L4Fs>(trials, seed);
    case Pair::l6_l4: return check_commute<L6Fs, L4Fs>(trials, seed);
  }
  return {};
}

// ---------------------------------------------------------------------------
// Allocation properties

Report check_space_iff(std::size_t trials, std::uint64_t seed) {
  Recorder rec;
  rec.r.property = "space[L4]";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto fs = gen_fs<L4Fs>(s);
    Rng rng(s ^ 0x1234567u);
    const auto files = file_paths(fs);
    const auto p = files[uniform(rng, 0, files.size() - 1)];
    const auto* f = lookup_file(fs.root, p);
    const auto start = uniform(rng, 0, f->length + 16);
    const auto text = random_text(rng, 48);

    // Independent arithmetic: free marks + the target's own blocks against
    // ceil(new length / block size).
    std::size_t free_marks = 0;
    for (bool used : fs.alv) free_marks += used ? 0 : 1;
    const std::size_t new_len = std::max(f->length, start + text.size());
    const std::size_t needed = new_len / fs.block_size + (new_len % fs.block_size != 0 ? 1 : 0);
    const bool expect = free_marks + f->blocks.size() >= needed;

    auto w = wrchs(fs, p, start, text);
    if (w.has_value() != expect || (!w && w.error() != Error::no_space)) {
      rec.fail(s, "write of " + std::to_string(new_len) + " chars with " + std::to_string(free_marks) +
                      " free + " + std::to_string(f->blocks.size()) + " own blocks: expected " +
                      (expect ? "success" : "no-space"));
      continue;
    }
    if (w) {
      ++rec.r.coverage["success"];
      if (free_marks == 0) ++rec.r.coverage["full-disk-success"];
      if (!l4_stricter_fs_p(*w)) rec.fail(s, "invariant broken after write");
    } else {
      ++rec.r.coverage["no-space"];
      if (free_marks == 0) ++rec.r.coverage["full-disk-no-space"];
    }
  }
  return rec.r;
}

Report check_alloc_refinement(std::size_t trials, std::uint64_t seed) {
  Recorder rec;
  rec.r.property = "alloc-refinement";
  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    Rng rng(s);
    FaTable fat;
    fat.entries.resize(uniform(rng, 0, 64));
    for (auto& e : fat.entries) {
      switch (uniform(rng, 0, 3)) {
        case 0: e = 0; break;
        case 1: e = static_cast<std::uint32_t>(uniform(rng, kEocFloor, kEocWrite)); break;
        default: e = static_cast<std::uint32_t>(uniform(rng, 0, 0xFFFFFFFFu)); break;
      }
    }
    std::size_t zeros = 0;
    for (std::size_t i = 2; i < fat.entries.size(); ++i) zeros += fat.entries[i] == 0 ? 1 : 0;
    auto alv = fa_table_to_alv(fat);
    if (count_free_blocks(alv) != zeros || alv.size() != fat.size()) {
      rec.fail(s, "abstract table of " + std::to_string(fat.size()) + " entries");
      continue;
    }

    // The same relation on a concrete volume after a few allocations.
    if (t % 10 == 0) {
      fat32::FormatOptions opts;
      opts.cluster_count = static_cast<std::uint32_t>(uniform(rng, 1, 64));
      auto img = fat32::parse_image(*fat32::format_image(opts), fat32::Compliance::relaxed);
      for (int k = 0; k < 3; ++k) (void)fat32::allocate_clusters(*img, uniform(rng, 0, 8));
      if (count_free_blocks(fa_table_to_alv(fat32::abstract_fat(*img))) != fat32::count_free_clusters(*img))
        rec.fail(s, "concrete FAT of " + std::to_string(opts.cluster_count) + " clusters");
    }
  }
  return rec.r;
}

// ---------------------------------------------------------------------------
// Differential syscall scripts

namespace {

struct Call {
  enum class Op { lstat, open, pread, pwrite, close, mkdir, mknod } op;
  Path path;
  sys::Fd fd = 0;
  std::size_t count = 0;
  std::uint64_t offset = 0;
  hifat::Bytes buf;
};

Path script_path(Rng& rng) {
  static const char* const kOdd[] = {"TOOLONGNAME.TXT", "A.LONG", "BAD NAME"};
  if (coin(rng, 0.1)) return Path{std::string(kOdd[uniform(rng, 0, std::size(kOdd) - 1)])};
  if (coin(rng, 0.6)) return Path{std::string(kNames[uniform(rng, 0, std::size(kNames) - 1)])};
  return random_pool_path(rng);
}

std::vector<Call> gen_script(Rng& rng, std::size_t max_calls) {
  // lstat, open, pread, pwrite, close, mkdir, mknod
  std::discrete_distribution<int> op({1, 3, 2, 3, 1, 1, 2});
  std::vector<Call> script(uniform(rng, 0, max_calls));
  for (auto& c : script) {
    c.op = static_cast<Call::Op>(op(rng));
    c.path = script_path(rng);
    c.fd = coin(rng, 0.6) ? 0 : static_cast<sys::Fd>(uniform(rng, 1, 2));
    c.count = uniform(rng, 0, 1200);
    c.offset = uniform(rng, 0, 4000);
    c.buf = to_bytes(random_text(rng, 1400));
  }
  return script;
}

template <class T>
std::string show(const Expected<T, sys::Errno>& r, std::string ok) {
  if (!r) return "-1 " + std::string(sys::errno_name(r.error()));
  return ok;
}

std::string run_call(sys::FsState& st, const Call& c) {
  using sys::kDefaultPid;
  switch (c.op) {
    case Call::Op::lstat: {
      auto r = st.lstat(kDefaultPid, c.path);
      return "lstat " + c.path.str() + " -> " +
             show(r, r ? (r->kind == sys::StatResult::Kind::directory ? "dir" : "reg " + std::to_string(r->size))
                       : "");
    }
    case Call::Op::open: {
      auto r = st.open(kDefaultPid, c.path);
      return "open " + c.path.str() + " -> " + show(r, r ? std::to_string(*r) : "");
    }
    case Call::Op::pread: {
      auto r = st.pread(kDefaultPid, c.fd, c.count, c.offset);
      return "pread " + std::to_string(c.fd) + " -> " + show(r, r ? printable(std::string(r->begin(), r->end())) : "");
    }
    case Call::Op::pwrite: {
      auto r = st.pwrite(kDefaultPid, c.fd, c.buf, c.offset);
      return "pwrite " + std::to_string(c.fd) + " -> " + show(r, r ? std::to_string(*r) : "");
    }
    case Call::Op::close:
      return "close " + std::to_string(c.fd) + " -> " + show(st.close(kDefaultPid, c.fd), "0");
    case Call::Op::mkdir:
      return "mkdir " + c.path.str() + " -> " + show(st.mkdir(kDefaultPid, c.path), "0");
    case Call::Op::mknod:
      return "mknod " + c.path.str() + " -> " + show(st.mknod(kDefaultPid, c.path), "0");
  }
  return {};
}

}  // namespace

Report check_concrete_stack(std::size_t trials, std::uint64_t seed, std::size_t max_calls) {
  Recorder rec;
  rec.r.property = "stack";
  fat32::FormatOptions opts;
  opts.cluster_count = 16;
  opts.cluster_size = 512;
  const auto tmpl = *fat32::parse_image(*fat32::format_image(opts), fat32::Compliance::relaxed);
  const sys::Capacity cap{tmpl.cluster_size(), fat32::count_of_clusters(tmpl)};

  for (std::size_t t = 0; t < trials; ++t) {
    const auto s = trial_seed(seed, t);
    ++rec.r.trials;
    auto initial = gen_fs<hifat::HiFatFs>(s);
    if (hifat::clusters_needed(initial, cap.cluster_size) > cap.cluster_count) {
      ++rec.r.vacuous;
      continue;
    }
    sys::FsState plain(initial, cap);
    sys::FsState imaged(initial, cap);
    Rng rng(s ^ 0x77777777u);
    const auto script = gen_script(rng, max_calls);

    std::string problem;
    for (std::size_t k = 0; k < script.size() && problem.empty(); ++k) {
      auto a = run_call(plain, script[k]);
      auto b = run_call(imaged, script[k]);
      const auto dash = a.find(" -1 ");
      ++rec.r.coverage[dash == std::string::npos ? "ok" : a.substr(dash + 4)];
      if (a != b) {
        problem = "step " + std::to_string(k) + ": " + a + " vs " + b;
        break;
      }
      auto img = hifat::hifat_to_image(tmpl, imaged.fs());
      if (!img || !fat32::compliant_fat32_p(*img, fat32::Compliance::relaxed)) {
        problem = "step " + std::to_string(k) + ": image rebuild failed";
        break;
      }
      auto reparsed = fat32::parse_image(fat32::serialize_image(*img), fat32::Compliance::relaxed);
      if (!reparsed || !(*reparsed == *img)) {
        problem = "step " + std::to_string(k) + ": image bytes did not round-trip";
        break;
      }
      auto back = hifat::image_to_hifat(*reparsed);
      if (!back || !hifat::hifat_equiv(*back, imaged.fs())) {
        problem = "step " + std::to_string(k) + ": tree did not survive the image";
        break;
      }
      imaged.replace_fs(std::move(*back));
    }
    if (!problem.empty()) rec.fail(s, problem);
  }
  return rec.r;
}

}  // namespace fatws::harness
