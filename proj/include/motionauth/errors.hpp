#pragma once

#include <stdexcept>
#include <string>

namespace motionauth {

// Invalid configuration, bad CLI flags, malformed manifests. CLI exit code 1.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Tensor shape disagreements between operands.
class ShapeError : public std::runtime_error {
 public:
  explicit ShapeError(const std::string& msg) : std::runtime_error(msg) {}
};

// Malformed input files (keypoint JSON, controller CSV, containers).
class ParseError : public std::runtime_error {
 public:
  explicit ParseError(const std::string& msg) : std::runtime_error(msg) {}
};

// NaN/Inf encountered where finiteness is a contract. CLI exit code 3.
class NumericalError : public std::runtime_error {
 public:
  explicit NumericalError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace motionauth
