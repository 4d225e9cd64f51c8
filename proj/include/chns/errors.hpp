#pragma once

#include <stdexcept>
#include <string>
#include <utility>

namespace chns {

/// Malformed input text (mesh files, config files).
class ParseError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Mesh connectivity that violates conformity or orientation requirements.
class TopologyError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// A linear system could not be factorized.
class SingularSystemError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Newton iteration hit the iteration cap without reaching tolerance.
class NewtonDivergence : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Invalid configuration value. `key()` names the offending entry.
class ConfigError : public std::runtime_error {
 public:
  ConfigError(std::string key, const std::string& what)
      : std::runtime_error(key + ": " + what), key_(std::move(key)) {}
  const std::string& key() const noexcept { return key_; }

 private:
  std::string key_;
};

}  // namespace chns
