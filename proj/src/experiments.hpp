#pragma once

// Experiment orchestration: every experiment writes <name>.json following
// {experiment, grid, scenario, rows, constants, seed, tool_version}, some
// also write <name>.csv and binary fields under <name>/. manifest.json lists
// every produced file with its SHA-256.

#include <functional>
#include <string>

#include "config.hpp"

namespace mslab {

inline constexpr const char* kToolVersion = "0.3.0";

struct RunResult {
  int exit_code = 0;
  std::string error;  // first error message, empty on success
  json manifest;
};

using LogFn = std::function<void(const std::string&)>;

// Runs the experiments in order; a failing experiment is recorded in the
// manifest and the remaining ones still run. Exit code 0 on success, 1 if
// any experiment failed.
RunResult run(const Config& config, const std::string& output_dir, const LogFn& log = {});

// Runs a single experiment and returns its results document; files go to output_dir.
json run_experiment(const ExperimentConfig& e, const std::string& output_dir,
                    std::vector<std::string>* written = nullptr);

// Reads manifest.json under dir, verifies every hash and summarises each
// experiment's constants. Throws on a missing manifest or a hash mismatch when strict.
json report_directory(const std::string& dir, bool strict = true);

std::string sha256_hex(const std::string& bytes);

}  // namespace mslab
