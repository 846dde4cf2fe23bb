#pragma once

#include <stdexcept>
#include <string>

namespace cstrd {

// Malformed or out-of-contract input (bad pith, bad radii, bad JSON shape...).
class InputError : public std::invalid_argument {
 public:
  explicit InputError(const std::string& what) : std::invalid_argument(what) {}
};

}  // namespace cstrd
