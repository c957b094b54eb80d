#pragma once

#include <stdexcept>
#include <string>

namespace fdcancel {

// Bad user-supplied configuration (presets, config files, CLI flags).
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Violated call contract between modules (rate mismatch, bad dimensions).
class ContractError : public std::logic_error {
 public:
  explicit ContractError(const std::string& msg) : std::logic_error(msg) {}
};

// Adaptive filter produced non-finite state.
class DivergenceError : public std::runtime_error {
 public:
  explicit DivergenceError(const std::string& msg) : std::runtime_error(msg) {}
};

// Requested analysis does not apply to the given scenario.
class NotApplicableError : public std::runtime_error {
 public:
  explicit NotApplicableError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace fdcancel
