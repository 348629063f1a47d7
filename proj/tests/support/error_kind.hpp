#pragma once

#include <optional>

#include "tvflow/errors.hpp"

namespace tvflow::testing {

// The kind of the tvflow::Error thrown by f, or nullopt when none is thrown.
template <class F>
std::optional<ErrorKind> error_kind(F&& f) {
  try {
    f();
  } catch (const Error& e) {
    return e.kind();
  }
  return std::nullopt;
}

}  // namespace tvflow::testing
