#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>

#include "dynlab/app/config.hpp"

namespace dynlab::app {

enum ExitCode : int { kOk = 0, kFailure = 1, kConfigError = 2, kNumericFailure = 3, kParseFailure = 4 };

struct RunOptions {
    std::filesystem::path out_root; // run directories are created below this
    bool plots = false;
    std::size_t threads = 1;
};

/// <root>/<command>-seed<S>
std::filesystem::path run_directory(const std::filesystem::path& root, const std::string& command,
                                    std::uint64_t seed);

/// Output root: explicit flag, then config output_dir, then DYNLAB_OUT, then "runs".
std::filesystem::path resolve_out_root(const std::optional<std::string>& flag, const ExperimentConfig& config);

/// Each command creates its run directory, writes manifest.json with the
/// resolved config and its data files, and returns an exit code.
int cmd_simulate(const ExperimentConfig& config, const RunOptions& opts);
int cmd_learn(const ExperimentConfig& config, const RunOptions& opts);
int cmd_evolve(const ExperimentConfig& config, const RunOptions& opts);
int cmd_eval_expr(const ExperimentConfig& config, const RunOptions& opts);

} // namespace dynlab::app
