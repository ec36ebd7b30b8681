#include "wolbachia/config.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <sstream>

#include "wolbachia/errors.hpp"

namespace wolbachia::config {

namespace {

std::string join(std::string_view path, std::string_view key) {
  if (path.empty()) return std::string(key);
  return std::string(path) + "." + std::string(key);
}

void require_object(const json& node, std::string_view path) {
  if (!node.is_object()) throw ValidationError(std::string(path.empty() ? "config" : path), "expected a JSON object");
}

json field_to_json(const model::Field& f) {
  switch (f.kind()) {
    case model::Field::Kind::constant:
      return {{"kind", "constant"}, {"value", f.constant_value()}};
    case model::Field::Kind::tabulated: {
      json samples = json::array();
      for (const auto& s : f.samples()) samples.push_back({s.x, s.value});
      return {{"kind", "tabulated"}, {"samples", samples}};
    }
    case model::Field::Kind::expression:
      return {{"kind", "expression"}, {"expr", f.expr()->text()}};
  }
  return nullptr;
}

}  // namespace

json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ValidationError("config", "cannot read " + path.string());
  try {
    return json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("config", std::string("invalid JSON: ") + e.what());
  }
}

void reject_unknown_keys(const json& object, std::string_view path, std::initializer_list<std::string_view> allowed) {
  require_object(object, path);
  for (const auto& [key, value] : object.items()) {
    if (std::find(allowed.begin(), allowed.end(), key) == allowed.end()) {
      throw ValidationError(join(path, key), "unknown key");
    }
  }
}

double require_number(const json& object, std::string_view key, std::string_view path) {
  const auto it = object.find(std::string(key));
  if (it == object.end()) throw ValidationError(join(path, key), "missing required number");
  if (!it->is_number()) throw ValidationError(join(path, key), "must be a number");
  return it->get<double>();
}

double number_or(const json& object, std::string_view key, std::string_view path, double fallback) {
  if (!object.contains(std::string(key))) return fallback;
  return require_number(object, key, path);
}

int integer_or(const json& object, std::string_view key, std::string_view path, int fallback) {
  const auto it = object.find(std::string(key));
  if (it == object.end()) return fallback;
  if (!it->is_number_integer()) throw ValidationError(join(path, key), "must be an integer");
  return it->get<int>();
}

model::Field parse_field(const json& node, const std::string& path) {
  if (node.is_number()) return model::Field::constant(node.get<double>());
  require_object(node, path);
  if (!node.contains("kind") || !node["kind"].is_string()) throw ValidationError(path + ".kind", "missing field kind");
  const std::string kind = node["kind"].get<std::string>();
  if (kind == "constant") {
    reject_unknown_keys(node, path, {"kind", "value"});
    return model::Field::constant(require_number(node, "value", path));
  }
  if (kind == "tabulated") {
    reject_unknown_keys(node, path, {"kind", "samples"});
    const auto it = node.find("samples");
    if (it == node.end() || !it->is_array()) throw ValidationError(path + ".samples", "expected [[x, value], ...]");
    std::vector<model::Sample> samples;
    for (const auto& pair : *it) {
      if (!pair.is_array() || pair.size() != 2 || !pair[0].is_number() || !pair[1].is_number()) {
        throw ValidationError(path + ".samples", "expected [[x, value], ...]");
      }
      samples.push_back({pair[0].get<double>(), pair[1].get<double>()});
    }
    return model::Field::tabulated(std::move(samples), path + ".samples");
  }
  if (kind == "expression") {
    reject_unknown_keys(node, path, {"kind", "expr"});
    if (!node.contains("expr") || !node["expr"].is_string()) throw ValidationError(path + ".expr", "expected a string");
    try {
      return model::Field::expression(Expression::parse(node["expr"].get<std::string>()));
    } catch (const ValidationError& e) {
      throw ValidationError(path + ".expr", e.what());
    }
  }
  throw ValidationError(path + ".kind", "unknown field kind '" + kind + "'");
}

ModelConfig parse_model(const json& root, double extent) {
  require_object(root, "");
  if (!root.contains("params")) throw ValidationError("params", "missing");
  const json& p = root["params"];
  reject_unknown_keys(p, "params", {"d1", "d2", "delta1", "delta2", "mu", "h0"});

  ModelConfig out;
  auto& params = out.params;
  params.d1 = require_number(p, "d1", "params");
  params.d2 = require_number(p, "d2", "params");
  params.delta1 = require_number(p, "delta1", "params");
  params.delta2 = require_number(p, "delta2", "params");
  params.mu = require_number(p, "mu", "params");
  params.h0 = require_number(p, "h0", "params");
  params.validate();
  if (extent <= 0.0) extent = 4.0 * params.h0;

  for (const char* name : {"b1", "b2"}) {
    if (!root.contains(name)) throw ValidationError(name, "missing birth-rate field");
    model::BirthRateField field(parse_field(root[name], name), name, extent);
    (std::string_view(name) == "b1" ? params.b1 : params.b2) = std::move(field);
  }

  const json init = root.value("init", json::object());
  reject_unknown_keys(init, "init", {"u0", "v0"});
  model::Field v0 = init.contains("v0")
                        ? parse_field(init["v0"], "init.v0")
                        : model::Field::constant(params.b2.sup_on(extent) / params.delta2);
  const json u0 = init.value("u0", json{{"kind", "cosine"}, {"amplitude", 1.0}});
  if (u0.is_object() && u0.value("kind", "") == "cosine") {
    reject_unknown_keys(u0, "init.u0", {"kind", "amplitude"});
    const double amplitude = require_number(u0, "amplitude", "init.u0");
    if (!(amplitude > 0.0)) throw ValidationError("init.u0.amplitude", "must be positive");
    out.init = model::InitialData::cosine(amplitude, params.h0, std::move(v0));
  } else {
    out.init = model::InitialData{parse_field(u0, "init.u0"), std::move(v0)};
  }
  return out;
}

pde::Grid parse_grid(const json& node) {
  reject_unknown_keys(node, "grid", {"n_u", "n_v", "x_max", "dt_mode", "dt", "cfl", "dt_max"});
  pde::Grid g;
  g.n_u = integer_or(node, "n_u", "grid", g.n_u);
  g.n_v = integer_or(node, "n_v", "grid", g.n_v);
  g.x_max = number_or(node, "x_max", "grid", 0.0);
  const std::string mode = node.value("dt_mode", std::string("adaptive"));
  if (mode == "fixed") {
    g.dt_policy.mode = pde::DtPolicy::Mode::fixed;
    g.dt_policy.dt_fixed = require_number(node, "dt", "grid");
  } else if (mode == "adaptive") {
    g.dt_policy.mode = pde::DtPolicy::Mode::adaptive;
  } else {
    throw ValidationError("grid.dt_mode", "expected 'fixed' or 'adaptive'");
  }
  g.dt_policy.cfl = number_or(node, "cfl", "grid", g.dt_policy.cfl);
  g.dt_policy.dt_max = number_or(node, "dt_max", "grid", g.dt_policy.dt_max);
  return g;
}

pde::RunOptions parse_run(const json& node) {
  reject_unknown_keys(node, "run", {"horizon", "sample_interval", "stop"});
  pde::RunOptions r;
  r.horizon = require_number(node, "horizon", "run");
  if (!(r.horizon > 0.0)) throw ValidationError("run.horizon", "must be positive");
  r.sample_interval = number_or(node, "sample_interval", "run", 0.0);
  if (r.sample_interval < 0.0) throw ValidationError("run.sample_interval", "must be nonnegative");
  if (node.contains("stop")) {
    const json& s = node["stop"];
    reject_unknown_keys(s, "run.stop", {"sup_u_floor", "h_limit"});
    r.stop.sup_u_floor = number_or(s, "sup_u_floor", "run.stop", 0.0);
    r.stop.h_limit = number_or(s, "h_limit", "run.stop", r.stop.h_limit);
  }
  return r;
}

pde::SimulationConfig parse_simulation(const json& root, std::initializer_list<std::string_view> extra_keys) {
  require_object(root, "");
  for (const auto& [key, value] : root.items()) {
    static constexpr std::string_view known[] = {"params", "b1", "b2", "init", "grid", "run"};
    const bool ok = std::find(std::begin(known), std::end(known), key) != std::end(known) ||
                    std::find(extra_keys.begin(), extra_keys.end(), key) != extra_keys.end();
    if (!ok) throw ValidationError(key, "unknown key");
  }
  pde::SimulationConfig config;
  config.grid = parse_grid(root.value("grid", json::object()));
  if (!root.contains("params") || !root["params"].is_object()) throw ValidationError("params", "missing");
  const double h0 = require_number(root["params"], "h0", "params");
  if (!(h0 > 0.0)) throw ValidationError("params.h0", "must be strictly positive");
  config.grid.resolve(h0);
  ModelConfig model = parse_model(root, config.grid.x_max);
  config.params = std::move(model.params);
  config.init = std::move(model.init);
  config.init.validate(config.params.h0, config.grid.x_max);
  if (!root.contains("run")) throw ValidationError("run", "missing (needs at least run.horizon)");
  config.run = parse_run(root["run"]);
  return config;
}

SweepSpec parse_sweep(const json& root) {
  reject_unknown_keys(root, "", {"axis", "values", "range", "base", "tail_fraction"});
  SweepSpec spec;
  if (!root.contains("axis") || !root["axis"].is_string()) throw ValidationError("axis", "expected a dotted path");
  spec.axis = root["axis"].get<std::string>();
  if (!root.contains("base")) throw ValidationError("base", "missing base simulation config");
  spec.base = root["base"];
  spec.tail_fraction = number_or(root, "tail_fraction", "", 0.5);

  if (root.contains("values") == root.contains("range")) {
    throw ValidationError("values", "give exactly one of 'values' or 'range'");
  }
  if (root.contains("values")) {
    if (!root["values"].is_array()) throw ValidationError("values", "expected an array of numbers");
    for (const auto& v : root["values"]) {
      if (!v.is_number()) throw ValidationError("values", "expected an array of numbers");
      spec.values.push_back(v.get<double>());
    }
  } else {
    const json& r = root["range"];
    reject_unknown_keys(r, "range", {"lo", "hi", "count", "spacing"});
    const double lo = require_number(r, "lo", "range");
    const double hi = require_number(r, "hi", "range");
    const int count = integer_or(r, "count", "range", 0);
    const std::string spacing = r.value("spacing", std::string("linear"));
    if (count < 1) throw ValidationError("range.count", "must be at least 1");
    if (spacing != "linear" && spacing != "log") throw ValidationError("range.spacing", "expected 'linear' or 'log'");
    if (spacing == "log" && !(lo > 0.0 && hi > 0.0)) throw ValidationError("range.lo", "log spacing needs positive ends");
    for (int i = 0; i < count; ++i) {
      const double f = count == 1 ? 0.0 : static_cast<double>(i) / (count - 1);
      spec.values.push_back(spacing == "log" ? lo * std::pow(hi / lo, f) : lo + f * (hi - lo));
    }
  }
  if (spec.values.empty()) throw ValidationError("values", "sweep needs at least one value");
  // Every point must produce a valid simulation config.
  for (double v : spec.values) {
    try {
      parse_simulation(with_axis_value(spec.base, spec.axis, v));
    } catch (const ValidationError& e) {
      std::ostringstream msg;
      msg << "value " << v << " is invalid: " << e.what();
      throw ValidationError(e.field(), msg.str());
    }
  }
  return spec;
}

json with_axis_value(const json& base, std::string_view axis, double value) {
  json out = base;
  json* node = &out;
  std::string_view rest = axis;
  while (true) {
    const auto dot = rest.find('.');
    const std::string key(rest.substr(0, dot));
    if (key.empty() || !node->is_object()) throw ValidationError("axis", "invalid path '" + std::string(axis) + "'");
    if (dot == std::string_view::npos) {
      if (node->contains(key) && !(*node)[key].is_number()) {
        throw ValidationError("axis", "'" + std::string(axis) + "' is not numeric");
      }
      (*node)[key] = value;
      return out;
    }
    if (!node->contains(key)) throw ValidationError("axis", "path '" + std::string(axis) + "' not found in base");
    node = &(*node)[key];
    rest.remove_prefix(dot + 1);
  }
}

json describe(const pde::SimulationConfig& c) {
  const auto& p = c.params;
  json out;
  out["params"] = {{"d1", p.d1}, {"d2", p.d2}, {"delta1", p.delta1}, {"delta2", p.delta2}, {"mu", p.mu}, {"h0", p.h0}};
  out["b1"] = field_to_json(p.b1.field());
  out["b2"] = field_to_json(p.b2.field());
  out["init"] = {{"u0", field_to_json(c.init.u0)}, {"v0", field_to_json(c.init.v0)}};
  out["grid"] = {{"n_u", c.grid.n_u},
                 {"n_v", c.grid.n_v},
                 {"x_max", c.grid.x_max},
                 {"dt_mode", c.grid.dt_policy.mode == pde::DtPolicy::Mode::fixed ? "fixed" : "adaptive"},
                 {"dt", c.grid.dt_policy.dt_fixed},
                 {"cfl", c.grid.dt_policy.cfl},
                 {"dt_max", c.grid.dt_policy.dt_max}};
  json stop = {{"sup_u_floor", c.run.stop.sup_u_floor}};
  if (std::isfinite(c.run.stop.h_limit)) stop["h_limit"] = c.run.stop.h_limit;
  out["run"] = {{"horizon", c.run.horizon}, {"sample_interval", c.run.sample_interval}, {"stop", stop}};
  return out;
}

}  // namespace wolbachia::config
