#pragma once

// Seeded generators and property runners for the read-over-write,
// commutation, allocation and co-simulation properties. Every trial derives
// its own seed from (base seed, trial number); a failing report carries that
// seed so `gen_fs<Fs>(seed)` reproduces the instance.

#include <cstddef>
#include <cstdint>
#include <functional>
#include <map>
#include <optional>
#include <random>
#include <string>
#include <string_view>

#include "fatws/hifat.hpp"
#include "fatws/model/levels.hpp"

namespace fatws::harness {

using Rng = std::mt19937_64;

/// Size limits for generated instances.
struct Budget {
  std::size_t max_depth = 4;
  std::size_t max_files = 6;
  std::size_t max_text = 64;
  std::size_t max_disk_blocks = 16;
  std::size_t block_size = model::kDefaultBlockSize;
};

struct Report {
  std::string property;
  std::size_t trials = 0;
  std::size_t failures = 0;
  /// Trials whose hypothesis held only vacuously (e.g. a bounded write that
  /// ran out of space and so had nothing to read back).
  std::size_t vacuous = 0;
  std::optional<std::uint64_t> failing_seed;
  std::string counterexample;
  /// Branch coverage counts, e.g. how many writes hit each outcome.
  std::map<std::string, std::size_t> coverage;

  bool passed() const { return failures == 0 && trials > 0; }
  std::string summary() const;
};

std::uint64_t trial_seed(std::uint64_t base, std::size_t trial);

/// Deterministic well-formed instance with at least one regular file. L4
/// and L5 instances satisfy l4_stricter_fs_p with an allocation vector that
/// marks exactly the referenced blocks; L6 tables mark exactly the chains.
template <class Fs>
Fs gen_fs(std::uint64_t seed, const Budget& budget = {});

enum class Target { l1, l2, l3, l4, l5, l6, hifat, syscall };
enum class Pair { l2_l1, l3_l2, l4_l3, l5_l4, l6_l4 };

std::optional<Target> parse_target(std::string_view s);
std::optional<Pair> pair_for_upper(Target upper);

template <class Fs>
using WriteFn = std::function<Expected<Fs, Error>(const Fs&, const Path&, std::size_t, std::string_view)>;

template <class Upper, class Lower>
using ConvertFn = std::function<Expected<Lower, Error>(const Upper&)>;

// Read-over-write 1: a read of len(text) at start returns text.
template <class Fs>
Report check_row1(std::size_t trials, std::uint64_t seed, WriteFn<Fs> write = {}, const Budget& b = {});
// Read-over-write 2: a write at path2 never changes a read at path1 != path2.
template <class Fs>
Report check_row2(std::size_t trials, std::uint64_t seed, WriteFn<Fs> write = {}, const Budget& b = {});
// write p1, write p2 != p1, read p1 == text1.
template <class Fs>
Report check_compose(std::size_t trials, std::uint64_t seed, const Budget& b = {});
// Write square, read triangle and their composition for one ladder step.
template <class Upper, class Lower>
Report check_commute(std::size_t trials, std::uint64_t seed, ConvertFn<Upper, Lower> convert = {},
                     const Budget& b = {});

Report check_row1(Target t, std::size_t trials, std::uint64_t seed);
Report check_row2(Target t, std::size_t trials, std::uint64_t seed);
Report check_compose(Target t, std::size_t trials, std::uint64_t seed);
Report check_commute(Pair p, std::size_t trials, std::uint64_t seed);

/// L4 writes succeed iff free blocks (after releasing the target's own) cover
/// the new contents; expected outcome computed without the model's helpers.
Report check_space_iff(std::size_t trials, std::uint64_t seed);

/// count_free_blocks(fa_table_to_alv(f)) against a direct zero count, on
/// random abstract tables and on FATs of formatted-then-allocated images.
Report check_alloc_refinement(std::size_t trials, std::uint64_t seed);

/// Random syscall scripts run on a plain state and on one whose tree is
/// pushed through hifat_to_image / image_to_hifat after every call.
Report check_concrete_stack(std::size_t trials, std::uint64_t seed, std::size_t max_calls = 20);

}  // namespace fatws::harness
