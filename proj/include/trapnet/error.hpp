#pragma once

#include <stdexcept>
#include <string>

namespace trapnet {

// Malformed input text (CSV/GeoJSON/query strings). The message carries the
// offending line or feature index.
class InputError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

// A well-formed request that violates a domain rule: unknown or isolated
// gateway, negative range, mixed coordinate modes, and so on.
class DomainError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace trapnet
