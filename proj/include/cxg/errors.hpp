// Error taxonomy shared by the library and the CLI.
//
// ConfigError -> exit 1, DataError -> exit 2, anything else -> exit 3.

#pragma once

#include <stdexcept>
#include <string>

namespace cxg {

// Bad configuration: unknown format names, missing files named in a config,
// invalid parameter combinations.
class ConfigError : public std::runtime_error {
 public:
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

// Bad or insufficient input data: malformed records, empty corpora,
// not enough tokens for the requested partition.
class DataError : public std::runtime_error {
 public:
  explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
};

enum ExitCode {
  kExitOk = 0,
  kExitConfig = 1,
  kExitData = 2,
  kExitInternal = 3,
};

}  // namespace cxg
