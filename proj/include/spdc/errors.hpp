#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace spdc {

// All library failures carry a short machine-readable kind tag
// ("grid-resolution", "domain", "evanescent", ...) next to the human message.
class Error : public std::runtime_error {
public:
  Error(std::string kind, const std::string& msg)
      : std::runtime_error(kind + ": " + msg), kind_(std::move(kind)) {}

  const std::string& kind() const noexcept { return kind_; }

private:
  std::string kind_;
};

}  // namespace spdc
