#pragma once

#include <filesystem>
#include <initializer_list>
#include <string>
#include <string_view>
#include <vector>

#include <json.hpp>

#include "wolbachia/model.hpp"
#include "wolbachia/pde.hpp"

namespace wolbachia::config {

using json = nlohmann::json;

/// Reads and parses a JSON file; ValidationError("config") on I/O or syntax errors.
json load_json(const std::filesystem::path& path);

/// ValidationError naming `path.key` for the first key not in `allowed`.
void reject_unknown_keys(const json& object, std::string_view path, std::initializer_list<std::string_view> allowed);

double require_number(const json& object, std::string_view key, std::string_view path);
double number_or(const json& object, std::string_view key, std::string_view path, double fallback);
int integer_or(const json& object, std::string_view key, std::string_view path, int fallback);

/// `{"kind": "constant", "value": v}`, `{"kind": "tabulated", "samples": [[x, b], ...]}`,
/// `{"kind": "expression", "expr": "..."}`, or a bare number.
model::Field parse_field(const json& node, const std::string& path);

struct ModelConfig {
  model::ModelParams params;
  model::InitialData init;
};

/// Parses the `params`, `b1`, `b2`, `init` members of `root`. `extent` bounds the
/// nonnegativity check of expression birth rates (defaults to 4 h0).
ModelConfig parse_model(const json& root, double extent = 0.0);

pde::Grid parse_grid(const json& node);
pde::RunOptions parse_run(const json& node);

/// Simulation config: `params`, `b1`, `b2`, `init`, `grid`, `run`; `extra_keys`
/// lists further top-level members the caller handles itself.
pde::SimulationConfig parse_simulation(const json& root, std::initializer_list<std::string_view> extra_keys = {});

struct SweepSpec {
  std::string axis;
  std::vector<double> values;
  json base;
  double tail_fraction = 0.5;
};

SweepSpec parse_sweep(const json& root);

/// Copy of `base` with the numeric member at dotted `axis` replaced by `value`.
json with_axis_value(const json& base, std::string_view axis, double value);

/// JSON echo of a simulation config with defaults filled in.
json describe(const pde::SimulationConfig& config);

}  // namespace wolbachia::config
