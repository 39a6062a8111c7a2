#pragma once

#include <cstddef>
#include <stdexcept>
#include <string>

namespace rfmap {

// A caller broke a documented precondition (bad region, beta outside (0,1), ...).
class ContractViolation : public std::invalid_argument {
 public:
  using std::invalid_argument::invalid_argument;
};

// Too few usable sites, or all of them collinear.
class DegenerateInput : public std::runtime_error {
 public:
  DegenerateInput(const std::string& what, std::size_t count)
      : std::runtime_error(what), count_(count) {}
  std::size_t count() const noexcept { return count_; }

 private:
  std::size_t count_;
};

class EmptyInput : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class ConfigError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

class IoError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace rfmap
