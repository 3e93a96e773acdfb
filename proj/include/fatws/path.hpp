#pragma once

#include <compare>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

namespace fatws {

/// Absolute path as a sequence of non-empty components. Empty means root.
/// Components are compared exactly; "." and ".." carry no special meaning.
class Path {
 public:
  Path() = default;
  Path(std::initializer_list<std::string> names) : names_(names) {}
  explicit Path(std::vector<std::string> names) : names_(std::move(names)) {}

  /// Splits on '/', dropping empty components ("/a//b/" -> {a, b}).
  static Path parse(std::string_view text);

  const std::vector<std::string>& names() const { return names_; }
  bool is_root() const { return names_.empty(); }
  std::size_t depth() const { return names_.size(); }
  const std::string& back() const { return names_.back(); }
  Path parent() const;
  Path child(std::string name) const;

  std::string str() const;

  friend auto operator<=>(const Path&, const Path&) = default;
  friend bool operator==(const Path&, const Path&) = default;

 private:
  std::vector<std::string> names_;
};

}  // namespace fatws
