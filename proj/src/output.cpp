#include "wolbachia/output.hpp"

#include <cstdio>
#include <fstream>

#include "wolbachia/errors.hpp"
#include "wolbachia/kernels.hpp"

namespace wolbachia::output {

std::string format_double(double value) {
  char buffer[32];
  std::snprintf(buffer, sizeof buffer, "%.17g", value);
  return buffer;
}

std::string content_hash(std::string_view bytes) {
  std::uint64_t hash = 0xcbf29ce484222325ULL;
  for (unsigned char c : bytes) {
    hash ^= c;
    hash *= 0x100000001b3ULL;
  }
  char buffer[17];
  std::snprintf(buffer, sizeof buffer, "%016llx", static_cast<unsigned long long>(hash));
  return buffer;
}

void write_text(const std::filesystem::path& path, std::string_view text) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw ValidationError("out", "cannot write " + path.string());
  out.write(text.data(), static_cast<std::streamsize>(text.size()));
  if (!out) throw ValidationError("out", "failed writing " + path.string());
}

std::string series_csv(std::span<const pde::SeriesSample> series) {
  std::string csv = "t,h,dhdt,sup_u,sup_v,mass_u\n";
  for (const auto& s : series) {
    csv += format_double(s.t) + ',' + format_double(s.h) + ',' + format_double(s.dhdt) + ',' +
           format_double(s.sup_u) + ',' + format_double(s.sup_v) + ',' + format_double(s.mass_u) + '\n';
  }
  return csv;
}

std::string uv_trajectory_csv(const ode::UvTrajectory& trajectory) {
  std::string csv = "t,u,v\n";
  for (std::size_t i = 0; i < trajectory.t.size(); ++i) {
    csv += format_double(trajectory.t[i]) + ',' + format_double(trajectory.y[i][0]) + ',' +
           format_double(trajectory.y[i][1]) + '\n';
  }
  return csv;
}

std::string compartment_trajectory_csv(const ode::CompartmentTrajectory& trajectory) {
  std::string csv = "t";
  for (auto name : ode::kCompartmentNames) csv += "," + std::string(name);
  csv += ",T,u,v\n";
  for (std::size_t i = 0; i < trajectory.t.size(); ++i) {
    const auto& s = trajectory.y[i];
    csv += format_double(trajectory.t[i]);
    for (double value : s.as_array()) csv += ',' + format_double(value);
    csv += ',' + format_double(s.total()) + ',' + format_double(s.u()) + ',' + format_double(s.v()) + '\n';
  }
  return csv;
}

nlohmann::json run_manifest(const nlohmann::json& resolved_config, const pde::RunResult& result,
                            double wall_seconds) {
  const auto& d = result.diagnostics;
  nlohmann::json m;
  m["scheme_version"] = pde::kSchemeVersion;
  m["kernel_isa"] = kernels::name(kernels::active().isa);
  m["config"] = resolved_config;
  m["grid"] = resolved_config.at("grid");
  m["input_hash"] = content_hash(resolved_config.dump());
  m["far_field_condition"] = "zero-flux at x_max";
  m["classification"] = pde::to_string(result.classification);
  m["measured_Lambda"] = d.lambda_measured;
  m["diagnostics"] = {{"final_sup_u", d.final_sup_u},
                      {"final_sup_v", d.final_sup_v},
                      {"final_h", result.final_state.h},
                      {"final_t", result.final_state.t},
                      {"steps", d.steps},
                      {"rejected_steps", d.rejected_steps},
                      {"bound_violations", d.bound_violations},
                      {"dt_min", d.dt_min},
                      {"dt_max", d.dt_max},
                      {"refine_suggested", d.refine_suggested}};
  m["wall_seconds"] = wall_seconds;
  return m;
}

}  // namespace wolbachia::output
