#include "fatws/path.hpp"

namespace fatws {

Path Path::parse(std::string_view text) {
  std::vector<std::string> names;
  std::size_t pos = 0;
  while (pos <= text.size()) {
    auto next = text.find('/', pos);
    if (next == std::string_view::npos) next = text.size();
    if (next > pos) names.emplace_back(text.substr(pos, next - pos));
    pos = next + 1;
  }
  return Path(std::move(names));
}

Path Path::parent() const {
  if (names_.empty()) return {};
  return Path(std::vector<std::string>(names_.begin(), names_.end() - 1));
}

Path Path::child(std::string name) const {
  auto names = names_;
  names.push_back(std::move(name));
  return Path(std::move(names));
}

std::string Path::str() const {
  if (names_.empty()) return "/";
  std::string out;
  for (const auto& n : names_) {
    out += '/';
    out += n;
  }
  return out;
}

}  // namespace fatws
