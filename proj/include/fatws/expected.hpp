#pragma once

#include <cassert>
#include <type_traits>
#include <utility>
#include <variant>

namespace fatws {

template <class E>
struct Unexpected {
  E error;
};

template <class E>
Unexpected(E) -> Unexpected<E>;

/// Minimal value-or-error holder. Accessing the wrong alternative asserts.
template <class T, class E>
class Expected {
 public:
  Expected(const T& value) : storage_(std::in_place_index<0>, value) {}
  Expected(T&& value) : storage_(std::in_place_index<0>, std::move(value)) {}
  template <class G, class = std::enable_if_t<std::is_convertible_v<G, E>>>
  Expected(Unexpected<G> u) : storage_(std::in_place_index<1>, E(std::move(u.error))) {}

  bool has_value() const noexcept { return storage_.index() == 0; }
  explicit operator bool() const noexcept { return has_value(); }

  T& value() & {
    assert(has_value());
    return std::get<0>(storage_);
  }
  const T& value() const& {
    assert(has_value());
    return std::get<0>(storage_);
  }
  T&& value() && {
    assert(has_value());
    return std::get<0>(std::move(storage_));
  }
  const E& error() const {
    assert(!has_value());
    return std::get<1>(storage_);
  }

  T& operator*() & { return value(); }
  const T& operator*() const& { return value(); }
  T&& operator*() && { return std::move(*this).value(); }
  T* operator->() { return &value(); }
  const T* operator->() const { return &value(); }

  friend bool operator==(const Expected&, const Expected&) = default;

 private:
  std::variant<T, E> storage_;
};

/// Expected<void, E> analog.
struct Ok {
  friend bool operator==(Ok, Ok) = default;
};

}  // namespace fatws
