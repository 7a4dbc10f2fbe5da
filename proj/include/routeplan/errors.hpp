#pragma once

#include <stdexcept>
#include <string>

namespace routeplan {

// Bad data: out-of-range values, dimension mismatches, malformed rows.
class ValidationError : public std::runtime_error {
 public:
  explicit ValidationError(const std::string& what) : std::runtime_error(what) {}
};

// Bad wiring: missing files, missing columns, missing profile/memory keys.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace routeplan
