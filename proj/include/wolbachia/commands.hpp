#pragma once

#include <filesystem>

namespace wolbachia::cli {

/// Exit codes shared by every command.
enum ExitCode : int { kOk = 0, kConfigError = 2, kNumericalError = 3 };

int cmd_simulate(const std::filesystem::path& config, const std::filesystem::path& out_dir);
int cmd_sweep(const std::filesystem::path& spec, const std::filesystem::path& out_dir, int parallelism);
int cmd_eigen(const std::filesystem::path& config, const std::filesystem::path& out_dir);
int cmd_speed(const std::filesystem::path& config, const std::filesystem::path& out_dir);
int cmd_threshold(const std::filesystem::path& config, const std::filesystem::path& out_dir);
int cmd_ode(const std::filesystem::path& config, const std::filesystem::path& out_dir);

}  // namespace wolbachia::cli
