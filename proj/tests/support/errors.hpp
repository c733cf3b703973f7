#pragma once

#include <optional>

#include "narep/error.hpp"

namespace narep::testing {

/// Code of the narep::Error thrown by `fn`, or nullopt if it returned.
template <class F>
std::optional<Errc> error_code(F&& fn) {
  try {
    fn();
  } catch (const Error& e) {
    return e.code();
  }
  return std::nullopt;
}

}  // namespace narep::testing
