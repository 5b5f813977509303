#pragma once

#include <stdexcept>
#include <string>

namespace mot {

// Precondition violated by the caller (bad coordinates, malformed contour, ...).
class domain_error : public std::domain_error {
 public:
  using std::domain_error::domain_error;
};

// Input too large for the exact/brute-force routines.
class resource_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class io_error : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace mot
