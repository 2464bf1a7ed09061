#pragma once

#include <cstdint>
#include <stdexcept>
#include <string>

namespace fbmq {

// Bad experiment configuration (schema violation, unknown key, bad value).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Conditional estimator accepted too few replicates to report anything.
class AcceptanceStarvation : public std::runtime_error {
 public:
  AcceptanceStarvation(const std::string& what, std::uint64_t accepted)
      : std::runtime_error(what), accepted_(accepted) {}
  std::uint64_t accepted() const noexcept { return accepted_; }

 private:
  std::uint64_t accepted_;
};

// Requested grid or factorization exceeds the configured resource caps.
class ResourceError : public std::runtime_error {
 public:
  explicit ResourceError(const std::string& what) : std::runtime_error(what) {}
};

}  // namespace fbmq
