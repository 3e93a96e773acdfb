#pragma once

// The abstract model ladder. Each level keeps a directory tree; leaf
// payloads get more concrete going down:
//
//   L1  contents inline
//   L2  contents + length
//   L3  block indices into an unbounded disk
//   L4  bounded disk with an allocation vector
//   L5  L4 + ownership/permission metadata
//   L6  L4 with the allocation vector replaced by a file allocation table
//
// All operations are pure: they take a value and return a new one.

#include <cstddef>
#include <cstdint>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"
#include "fatws/model/alloc.hpp"
#include "fatws/model/blocks.hpp"
#include "fatws/model/tree.hpp"
#include "fatws/path.hpp"

namespace fatws::model {

enum class Level { l1, l2, l3, l4, l5, l6 };

struct L1File {
  std::string contents;
  friend bool operator==(const L1File&, const L1File&) = default;
};

struct L2File {
  std::string contents;
  std::size_t length = 0;
  friend bool operator==(const L2File&, const L2File&) = default;
};

struct L3File {
  std::vector<std::size_t> blocks;
  std::size_t length = 0;
  friend bool operator==(const L3File&, const L3File&) = default;
};

struct L5Meta {
  std::uint32_t owner = 0;
  std::uint32_t mode = 0644;  // < 2^12
  friend bool operator==(const L5Meta&, const L5Meta&) = default;
};

struct L5File {
  std::vector<std::size_t> blocks;
  std::size_t length = 0;
  L5Meta meta;
  friend bool operator==(const L5File&, const L5File&) = default;
};

struct L6File {
  std::optional<std::size_t> first;
  std::size_t length = 0;
  friend bool operator==(const L6File&, const L6File&) = default;
};

struct L1Fs {
  Node<L1File> root = Node<L1File>::directory();
  friend bool operator==(const L1Fs&, const L1Fs&) = default;
};

struct L2Fs {
  Node<L2File> root = Node<L2File>::directory();
  friend bool operator==(const L2Fs&, const L2Fs&) = default;
};

struct L3Fs {
  Node<L3File> root = Node<L3File>::directory();
  std::vector<Block> disk;
  std::size_t block_size = kDefaultBlockSize;
  friend bool operator==(const L3Fs&, const L3Fs&) = default;
};

struct L4Fs {
  Node<L3File> root = Node<L3File>::directory();
  std::vector<Block> disk;
  AllocationVector alv;
  std::size_t block_size = kDefaultBlockSize;

  static L4Fs empty(std::size_t disk_blocks, std::size_t block_size = kDefaultBlockSize);
  friend bool operator==(const L4Fs&, const L4Fs&) = default;
};

struct L5Fs {
  Node<L5File> root = Node<L5File>::directory();
  std::vector<Block> disk;
  AllocationVector alv;
  std::size_t block_size = kDefaultBlockSize;
  friend bool operator==(const L5Fs&, const L5Fs&) = default;
};

struct L6Fs {
  Node<L6File> root = Node<L6File>::directory();
  std::vector<Block> disk;
  FaTable fat;
  std::size_t block_size = kDefaultBlockSize;

  /// Table of `disk_blocks` entries with the two reserved ones set.
  static L6Fs empty(std::size_t disk_blocks, std::size_t block_size = kDefaultBlockSize);
  friend bool operator==(const L6Fs&, const L6Fs&) = default;
};

// stat: node at path (root for the empty path), or nullptr.
const Node<L1File>* stat(const L1Fs& fs, const Path& path);
const Node<L2File>* stat(const L2Fs& fs, const Path& path);
const Node<L3File>* stat(const L3Fs& fs, const Path& path);
const Node<L3File>* stat(const L4Fs& fs, const Path& path);
const Node<L5File>* stat(const L5Fs& fs, const Path& path);
const Node<L6File>* stat(const L6Fs& fs, const Path& path);

// rdchs: n characters from start, or nullopt if the path is not a regular
// file or start+n runs past its length.
std::optional<std::string> rdchs(const L1Fs& fs, const Path& path, std::size_t start, std::size_t n);
std::optional<std::string> rdchs(const L2Fs& fs, const Path& path, std::size_t start, std::size_t n);
std::optional<std::string> rdchs(const L3Fs& fs, const Path& path, std::size_t start, std::size_t n);
std::optional<std::string> rdchs(const L4Fs& fs, const Path& path, std::size_t start, std::size_t n);
std::optional<std::string> rdchs(const L5Fs& fs, const Path& path, std::size_t start, std::size_t n);
std::optional<std::string> rdchs(const L6Fs& fs, const Path& path, std::size_t start, std::size_t n);

// wrchs: splice text into the file at path. Fails with not_found when path
// is not a regular file; bounded levels fail with no_space when the blocks
// freed by the target plus the free pool cannot hold the new contents.
Expected<L1Fs, Error> wrchs(const L1Fs& fs, const Path& path, std::size_t start, std::string_view text);
Expected<L2Fs, Error> wrchs(const L2Fs& fs, const Path& path, std::size_t start, std::string_view text);
Expected<L3Fs, Error> wrchs(const L3Fs& fs, const Path& path, std::size_t start, std::string_view text);
Expected<L4Fs, Error> wrchs(const L4Fs& fs, const Path& path, std::size_t start, std::string_view text);
Expected<L5Fs, Error> wrchs(const L5Fs& fs, const Path& path, std::size_t start, std::string_view text);
Expected<L6Fs, Error> wrchs(const L6Fs& fs, const Path& path, std::size_t start, std::string_view text);

// mknod / mkdir: create an empty regular file / directory. Errors: not_found
// (parent missing), not_dir (parent is a file), exists.
template <class Fs>
Expected<Fs, Error> mknod(const Fs& fs, const Path& path);
template <class Fs>
Expected<Fs, Error> mkdir(const Fs& fs, const Path& path);

/// Materialized contents of a regular file, or nullopt if its storage is
/// inconsistent with its length.
std::optional<std::string> contents_of(const L3Fs& fs, const L3File& f);
std::optional<std::string> contents_of(const L4Fs& fs, const L3File& f);
std::optional<std::string> contents_of(const L5Fs& fs, const L5File& f);
std::optional<std::string> contents_of(const L6Fs& fs, const L6File& f);

bool well_formed(const L1Fs& fs);
bool well_formed(const L2Fs& fs);
bool well_formed(const L3Fs& fs);
bool well_formed(const L4Fs& fs);
bool well_formed(const L5Fs& fs);
bool well_formed(const L6Fs& fs);

/// Every file's block list, concatenated in sorted-name depth-first order.
std::vector<std::size_t> l4_list_all_indices(const L4Fs& fs);
std::vector<std::size_t> l4_list_all_indices(const L5Fs& fs);

/// Well-formed, no block shared between files, every file block marked used.
bool l4_stricter_fs_p(const L4Fs& fs, const AllocationVector& alv);
inline bool l4_stricter_fs_p(const L4Fs& fs) { return l4_stricter_fs_p(fs, fs.alv); }
bool l4_stricter_fs_p(const L5Fs& fs);

// Refinement maps one step down the ladder. ill_formed if the input breaks
// its level's invariants.
Expected<L1Fs, Error> convert_down(const L2Fs& fs);
Expected<L2Fs, Error> convert_down(const L3Fs& fs);
// L4 and L5 sources must satisfy l4_stricter_fs_p.
Expected<L3Fs, Error> convert_down(const L4Fs& fs);
Expected<L4Fs, Error> convert_down(const L5Fs& fs);
Expected<L4Fs, Error> convert_down(const L6Fs& fs);

}  // namespace fatws::model
