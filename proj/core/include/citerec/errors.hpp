#pragma once

#include <stdexcept>
#include <string>

namespace citerec {

// Bad configuration or malformed input data. Maps to CLI exit code 2.
class ConfigError : public std::runtime_error {
  public:
    explicit ConfigError(const std::string& what): std::runtime_error(what) {}
};

// A required model/index/corpus artifact is not on disk. Maps to exit code 3.
class MissingArtifactError : public std::runtime_error {
  public:
    explicit MissingArtifactError(const std::string& what): std::runtime_error(what) {}
};

}  // namespace citerec
