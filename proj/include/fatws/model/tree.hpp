#pragma once

#include <functional>
#include <map>
#include <string>
#include <utility>
#include <variant>

#include "fatws/error.hpp"
#include "fatws/expected.hpp"
#include "fatws/path.hpp"

namespace fatws::model {

template <class File>
struct Node;

/// Directory: name -> node, iterated in sorted name order.
template <class File>
using Dir = std::map<std::string, Node<File>>;

/// A directory tree node whose leaves carry a level-specific file payload.
template <class File>
struct Node {
  std::variant<File, Dir<File>> value;

  static Node directory() { return Node{Dir<File>{}}; }
  static Node file(File f) { return Node{std::move(f)}; }

  bool is_file() const { return value.index() == 0; }
  bool is_dir() const { return value.index() == 1; }
  const File* as_file() const { return std::get_if<0>(&value); }
  File* as_file() { return std::get_if<0>(&value); }
  const Dir<File>* as_dir() const { return std::get_if<1>(&value); }
  Dir<File>* as_dir() { return std::get_if<1>(&value); }

  friend bool operator==(const Node&, const Node&) = default;
};

template <class File>
const Node<File>* lookup(const Node<File>& root, const Path& path) {
  const Node<File>* cur = &root;
  for (const auto& name : path.names()) {
    const auto* dir = cur->as_dir();
    if (dir == nullptr) return nullptr;
    auto it = dir->find(name);
    if (it == dir->end()) return nullptr;
    cur = &it->second;
  }
  return cur;
}

template <class File>
Node<File>* lookup(Node<File>& root, const Path& path) {
  return const_cast<Node<File>*>(lookup(std::as_const(root), path));
}

template <class File>
const File* lookup_file(const Node<File>& root, const Path& path) {
  const auto* node = lookup(root, path);
  return node == nullptr ? nullptr : node->as_file();
}

/// Inserts a fresh node at path. The parent must exist and be a directory.
template <class File>
Expected<Ok, Error> insert(Node<File>& root, const Path& path, Node<File> node) {
  if (path.is_root()) return Unexpected{Error::exists};
  auto* parent = lookup(root, path.parent());
  if (parent == nullptr) return Unexpected{Error::not_found};
  auto* dir = parent->as_dir();
  if (dir == nullptr) return Unexpected{Error::not_dir};
  if (dir->contains(path.back())) return Unexpected{Error::exists};
  dir->emplace(path.back(), std::move(node));
  return Ok{};
}

/// Visits every regular file in depth-first, sorted-name order.
template <class File, class Fn>
void for_each_file(const Node<File>& root, Fn&& fn, const Path& prefix = {}) {
  if (const auto* f = root.as_file()) {
    fn(prefix, *f);
    return;
  }
  for (const auto& [name, child] : *root.as_dir()) for_each_file(child, fn, prefix.child(name));
}

/// Rebuilds a tree with every file payload passed through `fn`. `fn` may
/// fail, in which case the first error is returned.
template <class To, class From, class Fn>
Expected<Node<To>, Error> map_files(const Node<From>& root, Fn&& fn) {
  if (const auto* f = root.as_file()) {
    auto mapped = fn(*f);
    if (!mapped) return Unexpected{mapped.error()};
    return Node<To>::file(std::move(*mapped));
  }
  Dir<To> out;
  for (const auto& [name, child] : *root.as_dir()) {
    auto sub = map_files<To>(child, fn);
    if (!sub) return Unexpected{sub.error()};
    out.emplace(name, std::move(*sub));
  }
  return Node<To>{std::move(out)};
}

}  // namespace fatws::model
