#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <string>
#include <string_view>

#include <json.hpp>

#include "wolbachia/ode.hpp"
#include "wolbachia/pde.hpp"

namespace wolbachia::output {

/// "%.17g": 17 significant digits, round-trips exactly.
std::string format_double(double value);

/// FNV-1a 64-bit hash, rendered as 16 hex digits.
std::string content_hash(std::string_view bytes);

void write_text(const std::filesystem::path& path, std::string_view text);

/// Header `t,h,dhdt,sup_u,sup_v,mass_u`, one row per sample.
std::string series_csv(std::span<const pde::SeriesSample> series);

std::string uv_trajectory_csv(const ode::UvTrajectory& trajectory);
std::string compartment_trajectory_csv(const ode::CompartmentTrajectory& trajectory);

/// Manifest for a simulation: resolved config, grid, scheme version, classification,
/// measured Lambda, hash of the resolved config, wall time.
nlohmann::json run_manifest(const nlohmann::json& resolved_config, const pde::RunResult& result,
                            double wall_seconds);

}  // namespace wolbachia::output
