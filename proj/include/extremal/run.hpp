#pragma once

#include <filesystem>

#include "extremal/config.hpp"
#include "json.hpp"

namespace extremal {

/// Outcome of one command: the manifest as written to manifest.json and the
/// process exit status (0 iff every invoked check passed).
struct RunManifest {
  nlohmann::json document;
  nlohmann::json result;  // contents of result.json
  int exit_code = 0;
  std::filesystem::path directory;
};

nlohmann::json config_to_json(const RunConfig& config);

/// Validates the output directory, runs the command, writes result.json,
/// any CSV artifacts and manifest.json. Core-module errors are recorded in
/// the manifest and give exit code 1. ConfigError escapes when the output
/// directory is unusable, before any computation.
RunManifest run(const RunConfig& config);

}  // namespace extremal
