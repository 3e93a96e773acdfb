#pragma once

#include <string_view>

namespace fatws {

/// Library-wide failure codes. Syscall-level failures use Errno instead.
enum class Error {
  not_found,
  not_dir,
  exists,
  no_space,
  bad_length,
  index_out_of_range,
  reserved_index,
  bad_chain,
  ill_formed,
  truncated,
  bad_signature,
  non_compliant,
  size_mismatch,
  field_overflow,
  depth_exceeded,
  name_invalid,
};

constexpr std::string_view to_string(Error e) {
  switch (e) {
    case Error::not_found: return "not-found";
    case Error::not_dir: return "not-dir";
    case Error::exists: return "exists";
    case Error::no_space: return "no-space";
    case Error::bad_length: return "bad-length";
    case Error::index_out_of_range: return "index-out-of-range";
    case Error::reserved_index: return "reserved-index";
    case Error::bad_chain: return "bad-chain";
    case Error::ill_formed: return "ill-formed";
    case Error::truncated: return "truncated";
    case Error::bad_signature: return "bad-signature";
    case Error::non_compliant: return "non-compliant";
    case Error::size_mismatch: return "size-mismatch";
    case Error::field_overflow: return "field-overflow";
    case Error::depth_exceeded: return "depth-exceeded";
    case Error::name_invalid: return "name-invalid";
  }
  return "unknown";
}

}  // namespace fatws
