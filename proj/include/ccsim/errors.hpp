#pragma once

#include <stdexcept>
#include <string>

namespace ccsim {

// Raised for invalid configuration values and inconsistent run setups.
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& what) : std::runtime_error(what) {}
};

// Raised for malformed input files (traces, command traces, config files).
// Messages carry the source name and 1-based line number.
struct ParseError : std::runtime_error {
  explicit ParseError(const std::string& what) : std::runtime_error(what) {}
  ParseError(const std::string& source, std::size_t line, const std::string& what)
      : std::runtime_error(source + ":" + std::to_string(line) + ": " + what) {}
};

}  // namespace ccsim
