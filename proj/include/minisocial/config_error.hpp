#pragma once

#include <stdexcept>

namespace minisocial {

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace minisocial
