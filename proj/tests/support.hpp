#pragma once

#include <functional>
#include <optional>

#include "rkl/error.hpp"

// kind of the rkl::Error thrown by f, or nothing
inline std::optional<rkl::ErrorKind> kind_of(const std::function<void()>& f) {
  try {
    f();
  } catch (const rkl::Error& e) {
    return e.kind();
  }
  return std::nullopt;
}
