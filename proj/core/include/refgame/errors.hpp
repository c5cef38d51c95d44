#pragma once

#include <stdexcept>
#include <string>

namespace rg {

// Error families map 1:1 onto CLI exit codes (config 2, training 3, stale 4).
struct ConfigError : std::runtime_error {
  explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
};

struct TrainingError : std::runtime_error {
  explicit TrainingError(const std::string& msg) : std::runtime_error(msg) {}
};

struct StaleArtifactError : std::runtime_error {
  explicit StaleArtifactError(const std::string& msg) : std::runtime_error(msg) {}
};

}  // namespace rg
