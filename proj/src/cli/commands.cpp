#include "wolbachia/commands.hpp"

#include <algorithm>
#include <atomic>
#include <chrono>
#include <cmath>
#include <iostream>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "wolbachia/config.hpp"
#include "wolbachia/eigen.hpp"
#include "wolbachia/errors.hpp"
#include "wolbachia/ode.hpp"
#include "wolbachia/output.hpp"
#include "wolbachia/pde.hpp"
#include "wolbachia/semiwave.hpp"

namespace wolbachia::cli {

namespace fs = std::filesystem;
using config::json;

namespace {

template <class Body>
int guarded(Body&& body) {
  try {
    body();
    return kOk;
  } catch (const ValidationError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const DomainError& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  } catch (const NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kNumericalError;
  } catch (const fs::filesystem_error& e) {
    std::cerr << "config error: " << e.what() << '\n';
    return kConfigError;
  }
}

void ensure_dir(const fs::path& dir) {
  std::error_code ec;
  fs::create_directories(dir, ec);
  if (ec || !fs::is_directory(dir)) throw ValidationError("out", "cannot create directory " + dir.string());
}

void write_json(const fs::path& path, const json& value) { output::write_text(path, value.dump(2) + "\n"); }

json number_or_null(double value) { return std::isfinite(value) ? json(value) : json(nullptr); }

struct SimulationOutcome {
  pde::RunResult result;
  json manifest;
  double speed = std::numeric_limits<double>::quiet_NaN();
};

SimulationOutcome simulate_to(const pde::SimulationConfig& config, const fs::path& dir, double tail_fraction) {
  const auto start = std::chrono::steady_clock::now();
  SimulationOutcome out;
  out.result = pde::run(config);
  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  if (out.result.classification == pde::Regime::Spreading) out.speed = pde::measure_speed(out.result, tail_fraction);

  const json resolved = config::describe(config);
  out.manifest = output::run_manifest(resolved, out.result, wall);
  const auto bounds = model::derive_bounds(config.params, config.init, config.grid.x_max);
  out.manifest["bounds"] = {{"M1", bounds.M1},
                            {"M2", bounds.M2},
                            {"b1_sup", config.params.b1.sup_on(config.grid.x_max)},
                            {"b2_sup", config.params.b2.sup_on(config.grid.x_max)}};
  out.manifest["measured_speed"] = number_or_null(out.speed);
  output::write_text(dir / "series.csv", output::series_csv(out.result.series));
  write_json(dir / "manifest.json", out.manifest);
  return out;
}

model::ModelParams model_from(const json& root, const pde::Grid* grid) {
  double extent = 0.0;
  if (grid != nullptr) extent = grid->x_max;
  return config::parse_model(root, extent).params;
}

pde::Grid grid_from(const json& root, double h0) {
  pde::Grid grid = config::parse_grid(root.value("grid", json::object()));
  grid.resolve(h0);
  return grid;
}

eigen::Potential potential_from(const std::string& which, const model::ModelParams& params, const pde::Grid& grid) {
  if (which == "b1") return eigen::from_field(params.b1);
  if (which == "effective") {
    return eigen::effective_potential(params.b1, params.delta1, pde::solve_stationary_v(params, grid));
  }
  throw ValidationError("potential", "expected 'b1' or 'effective'");
}

json threshold_json(const eigen::ThresholdResult& r) {
  json probes = json::array();
  for (const auto& p : r.probes) {
    json entry = {{"value", p.value}};
    if (std::isfinite(p.lambda)) entry["lambda1"] = p.lambda;
    if (!p.outcome.empty()) entry["classification"] = p.outcome;
    probes.push_back(entry);
  }
  return {{"kind", eigen::to_string(r.kind)},
          {"value", r.value},
          {"bracket", {r.lo, r.hi}},
          {"iterations", r.iterations},
          {"method", r.method},
          {"probes", probes}};
}

std::pair<double, double> bracket_from(const json& node, std::string_view path) {
  if (!node.is_array() || node.size() != 2 || !node[0].is_number() || !node[1].is_number()) {
    throw ValidationError(std::string(path), "expected [lo, hi]");
  }
  return {node[0].get<double>(), node[1].get<double>()};
}

}  // namespace

int cmd_simulate(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&] {
    const pde::SimulationConfig config = config::parse_simulation(config::load_json(config_path));
    ensure_dir(out_dir);
    const auto outcome = simulate_to(config, out_dir, 0.5);
    std::cout << "classification: " << pde::to_string(outcome.result.classification)
              << "  h(T) = " << outcome.result.final_state.h << '\n';
  });
}

int cmd_sweep(const fs::path& spec_path, const fs::path& out_dir, int parallelism) {
  return guarded([&] {
    if (parallelism < 1) throw ValidationError("parallelism", "must be at least 1");
    const config::SweepSpec spec = config::parse_sweep(config::load_json(spec_path));
    ensure_dir(out_dir);

    struct Row {
      double axis_value;
      std::size_t index;
      std::string classification;
      double h_final;
      double speed;
    };
    std::vector<Row> rows(spec.values.size());
    std::atomic<std::size_t> next{0};
    auto worker = [&] {
      for (std::size_t i = next++; i < spec.values.size(); i = next++) {
        Row row{spec.values[i], i, "Failed", std::numeric_limits<double>::quiet_NaN(),
                std::numeric_limits<double>::quiet_NaN()};
        try {
          const auto config = config::parse_simulation(config::with_axis_value(spec.base, spec.axis, spec.values[i]));
          char name[32];
          std::snprintf(name, sizeof name, "run_%04zu", i);
          const fs::path dir = out_dir / name;
          ensure_dir(dir);
          const auto outcome = simulate_to(config, dir, spec.tail_fraction);
          row.classification = pde::to_string(outcome.result.classification);
          row.h_final = outcome.result.final_state.h;
          row.speed = outcome.speed;
        } catch (const Error& e) {
          row.classification = "Failed";
        }
        rows[i] = std::move(row);
      }
    };
    {
      std::vector<std::jthread> pool;
      const int workers = std::min<int>(parallelism, static_cast<int>(spec.values.size()));
      for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
    }
    std::stable_sort(rows.begin(), rows.end(), [](const Row& a, const Row& b) { return a.axis_value < b.axis_value; });
    std::string csv = "axis_value,classification,h_final,measured_speed\n";
    for (const auto& row : rows) {
      csv += output::format_double(row.axis_value) + ',' + row.classification + ',' +
             output::format_double(row.h_final) + ',' + output::format_double(row.speed) + '\n';
    }
    output::write_text(out_dir / "sweep.csv", csv);
    std::cout << "sweep over " << spec.axis << ": " << rows.size() << " runs\n";
  });
}

int cmd_eigen(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&] {
    const json root = config::load_json(config_path);
    config::reject_unknown_keys(root, "", {"params", "b1", "b2", "init", "grid", "eigen"});
    if (!root.contains("eigen")) throw ValidationError("eigen", "missing");
    const json& e = root["eigen"];
    config::reject_unknown_keys(e, "eigen", {"d", "h0", "n", "b", "potential"});

    std::optional<model::ModelParams> params;
    std::optional<pde::Grid> grid;
    if (root.contains("params")) {
      const double h0 = config::require_number(root["params"], "h0", "params");
      grid = grid_from(root, h0);
      params = model_from(root, &*grid);
    }
    eigen::EigenProblem problem;
    problem.n = config::integer_or(e, "n", "eigen", 2048);
    if (!e.contains("d") && !params) throw ValidationError("eigen.d", "missing (or give params)");
    if (!e.contains("h0") && !params) throw ValidationError("eigen.h0", "missing (or give params)");
    problem.d = config::number_or(e, "d", "eigen", params ? params->d1 : 0.0);
    problem.h0 = config::number_or(e, "h0", "eigen", params ? params->h0 : 0.0);

    std::optional<double> constant_b;
    if (e.contains("b")) {
      const model::BirthRateField b(config::parse_field(e["b"], "eigen.b"), "eigen.b", problem.h0);
      if (b.is_constant()) constant_b = b.constant_value();
      problem.b = eigen::from_field(b);
    } else if (params) {
      const std::string which = e.value("potential", std::string("b1"));
      problem.b = potential_from(which, *params, *grid);
      if (which == "b1" && params->b1.is_constant()) constant_b = params->b1.constant_value();
    } else {
      throw ValidationError("eigen.b", "missing potential");
    }

    ensure_dir(out_dir);
    const auto result = eigen::principal_eigen(problem);
    json report = {{"lambda1", result.lambda1}, {"d", problem.d}, {"h0", problem.h0}, {"n", problem.n},
                   {"rayleigh_quotient", eigen::rayleigh_quotient(problem, result.phi1)}};
    if (constant_b) {
      const double k = std::numbers::pi / (2.0 * problem.h0);
      report["closed_form"] = problem.d * k * k - *constant_b;
    }
    write_json(out_dir / "eigen.json", report);
    std::string csv = "x,phi\n";
    for (std::size_t i = 0; i < result.x.size(); ++i) {
      csv += output::format_double(result.x[i]) + ',' + output::format_double(result.phi1[i]) + '\n';
    }
    output::write_text(out_dir / "eigenfunction.csv", csv);
    std::cout << "lambda1 = " << output::format_double(result.lambda1) << '\n';
  });
}

int cmd_speed(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&] {
    const json root = config::load_json(config_path);
    config::reject_unknown_keys(root, "", {"params", "b1", "b2", "init", "grid", "run", "speed"});
    if (!root.contains("speed") && !root.contains("params")) {
      throw ValidationError("speed", "give a 'speed' block, model 'params', or both");
    }
    ensure_dir(out_dir);
    if (root.contains("speed")) {
      const json& s = root["speed"];
      config::reject_unknown_keys(s, "speed", {"mu", "a", "delta", "d", "mu_sweep", "profile_samples"});
      semiwave::SemiWaveProblem problem{config::require_number(s, "d", "speed"), config::require_number(s, "a", "speed"),
                                        config::require_number(s, "delta", "speed"),
                                        config::require_number(s, "mu", "speed")};
      semiwave::ProfileOptions options;
      options.samples = config::integer_or(s, "profile_samples", "speed", options.samples);
      const auto result = semiwave::solve_beta0(problem, options);
      write_json(out_dir / "speed.json", {{"beta0", result.beta0},
                                          {"uprime0", result.uprime0},
                                          {"mu", problem.mu},
                                          {"a", problem.a},
                                          {"delta", problem.delta},
                                          {"d", problem.d},
                                          {"residual", result.ode_residual},
                                          {"selection_residual", result.selection_residual},
                                          {"kpp_speed", problem.kpp_speed()}});
      std::string csv = "x,U\n";
      for (std::size_t i = 0; i < result.profile.x.size(); ++i) {
        csv += output::format_double(result.profile.x[i]) + ',' + output::format_double(result.profile.U[i]) + '\n';
      }
      output::write_text(out_dir / "profile.csv", csv);
      std::cout << "beta0 = " << output::format_double(result.beta0) << '\n';

      if (s.contains("mu_sweep")) {
        if (!s["mu_sweep"].is_array()) throw ValidationError("speed.mu_sweep", "expected an array of numbers");
        std::vector<double> mus;
        for (const auto& m : s["mu_sweep"]) {
          if (!m.is_number()) throw ValidationError("speed.mu_sweep", "expected an array of numbers");
          mus.push_back(m.get<double>());
        }
        std::sort(mus.begin(), mus.end());
        std::string sweep = "mu,beta0\n";
        for (double mu : mus) {
          auto p = problem;
          p.mu = mu;
          const double beta = semiwave::solve_beta0(p, {.samples = 0}).beta0;
          sweep += output::format_double(mu) + ',' + output::format_double(beta) + '\n';
        }
        output::write_text(out_dir / "speed_sweep.csv", sweep);
      }
    }
    if (root.contains("params")) {
      const double h0 = config::require_number(root["params"], "h0", "params");
      const pde::Grid grid = grid_from(root, h0);
      const auto params = model_from(root, &grid);
      const auto [lo, hi] = semiwave::speed_bracket(params);
      write_json(out_dir / "bracket.json", {{"beta_lo", lo}, {"beta_hi", hi}, {"mu", params.mu}, {"d1", params.d1}});
      std::cout << "speed bracket = [" << output::format_double(lo) << ", " << output::format_double(hi) << "]\n";
    }
  });
}

int cmd_threshold(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&] {
    const json root = config::load_json(config_path);
    if (!root.is_object() || !root.contains("threshold")) throw ValidationError("threshold", "missing");
    const json& t = root["threshold"];
    config::reject_unknown_keys(t, "threshold", {"kind", "bracket", "n", "potential", "budget", "rel_tol"});
    if (!t.contains("kind") || !t["kind"].is_string()) throw ValidationError("threshold.kind", "missing");
    const auto kind = eigen::threshold_kind_from_string(t["kind"].get<std::string>());

    eigen::ThresholdResult result;
    if (kind == eigen::ThresholdKind::d1_star || kind == eigen::ThresholdKind::h_star) {
      config::reject_unknown_keys(root, "", {"params", "b1", "b2", "init", "grid", "run", "threshold"});
      const double h0 = config::require_number(root.value("params", json::object()), "h0", "params");
      const pde::Grid grid = grid_from(root, h0);
      const auto params = model_from(root, &grid);
      const int n = config::integer_or(t, "n", "threshold", 2048);
      const auto potential = potential_from(t.value("potential", std::string("b1")), params, grid);
      const bool d_kind = kind == eigen::ThresholdKind::d1_star;
      auto lambda = [&](double p) {
        return d_kind ? eigen::principal_eigen({p, potential, params.h0, n}).lambda1
                      : eigen::principal_eigen({params.d1, potential, p, n}).lambda1;
      };
      const auto bracket = t.contains("bracket")
                               ? bracket_from(t["bracket"], "threshold.bracket")
                               : eigen::auto_bracket(lambda, d_kind ? 0.5 * params.d1 : 0.5 * params.h0,
                                                     d_kind ? 2.0 * params.d1 : 2.0 * params.h0, d_kind);
      result = d_kind ? eigen::find_d1_star(potential, params.h0, bracket, n)
                      : eigen::find_h_star(params.d1, potential, bracket, n);
    } else {
      const auto config = config::parse_simulation(root, {"threshold"});
      if (!t.contains("bracket")) throw ValidationError("threshold.bracket", "mu thresholds need [lo, hi]");
      result = eigen::find_mu_threshold(config, kind, bracket_from(t["bracket"], "threshold.bracket"),
                                        config::integer_or(t, "budget", "threshold", 24),
                                        config::number_or(t, "rel_tol", "threshold", 1e-3));
    }
    ensure_dir(out_dir);
    write_json(out_dir / "threshold.json", threshold_json(result));
    std::cout << eigen::to_string(result.kind) << " = " << output::format_double(result.value) << '\n';
  });
}

int cmd_ode(const fs::path& config_path, const fs::path& out_dir) {
  return guarded([&] {
    const json root = config::load_json(config_path);
    config::reject_unknown_keys(root, "", {"ode"});
    if (!root.contains("ode")) throw ValidationError("ode", "missing");
    const json& o = root["ode"];
    config::reject_unknown_keys(o, "ode", {"system", "b1", "b2", "delta1", "delta2", "bI", "bU", "deltaSex",
                                           "im_release_source", "u0", "v0", "state0", "horizon", "dt",
                                           "sample_every"});
    const std::string system = o.value("system", std::string("uv"));
    const double horizon = config::require_number(o, "horizon", "ode");
    const double dt = config::require_number(o, "dt", "ode");
    const int every = config::integer_or(o, "sample_every", "ode", 1);

    ode::OdeParams p;
    p.delta1 = config::require_number(o, "delta1", "ode");
    p.delta2 = config::require_number(o, "delta2", "ode");
    if (system == "uv") {
      p.b1 = config::require_number(o, "b1", "ode");
      p.b2 = config::require_number(o, "b2", "ode");
      ensure_dir(out_dir);
      const auto traj = ode::integrate_uv(p, config::require_number(o, "u0", "ode"),
                                          config::require_number(o, "v0", "ode"), horizon, dt, every);
      output::write_text(out_dir / "trajectory.csv", output::uv_trajectory_csv(traj));
      write_json(out_dir / "ode.json", {{"system", "uv"}, {"final", {{"u", traj.y.back()[0]}, {"v", traj.y.back()[1]}}}});
      return;
    }
    if (system != "compartments") throw ValidationError("ode.system", "expected 'uv' or 'compartments'");
    p.bI = config::require_number(o, "bI", "ode");
    p.bU = config::require_number(o, "bU", "ode");
    p.b1 = p.bI / 2.0;
    p.b2 = p.bU / 2.0;
    p.delta_sex = config::number_or(o, "deltaSex", "ode", 0.5);
    const std::string source = o.value("im_release_source", std::string("rm"));
    if (source != "rm" && source != "rf") throw ValidationError("ode.im_release_source", "expected 'rm' or 'rf'");
    p.im_source = source == "rm" ? ode::ImReleaseSource::rm : ode::ImReleaseSource::rf;

    if (!o.contains("state0")) throw ValidationError("ode.state0", "missing");
    const json& s = o["state0"];
    config::reject_unknown_keys(s, "ode.state0", {"rf", "rm", "If", "Im", "Uf", "Um"});
    ode::CompartmentState state0{config::number_or(s, "rf", "ode.state0", 0.0), config::number_or(s, "rm", "ode.state0", 0.0),
                                 config::number_or(s, "If", "ode.state0", 0.0), config::number_or(s, "Im", "ode.state0", 0.0),
                                 config::number_or(s, "Uf", "ode.state0", 0.0), config::number_or(s, "Um", "ode.state0", 0.0)};
    ensure_dir(out_dir);
    const auto traj = ode::integrate_compartments(p, state0, horizon, dt, every);
    output::write_text(out_dir / "trajectory.csv", output::compartment_trajectory_csv(traj));
    const auto& last = traj.y.back();
    json report = {{"system", "compartments"},
                   {"im_release_source", source},
                   {"final", {{"rf", last.rf}, {"rm", last.rm}, {"If", last.If}, {"Im", last.Im},
                              {"Uf", last.Uf}, {"Um", last.Um}, {"u", last.u()}, {"v", last.v()}}}};

    const bool equal_determination = p.delta_sex == 0.5 && state0.rf == 0.0 && state0.rm == 0.0 &&
                                     state0.If == state0.Im && state0.Uf == state0.Um;
    if (equal_determination) {
      const auto reduced = ode::integrate_uv(p, state0.u(), state0.v(), horizon, dt, every);
      double worst = 0.0;
      for (std::size_t i = 0; i < traj.t.size(); ++i) {
        const double du = std::abs(traj.y[i].u() - reduced.y[i][0]) / std::max(std::abs(reduced.y[i][0]), 1e-300);
        const double dv = std::abs(traj.y[i].v() - reduced.y[i][1]) / std::max(std::abs(reduced.y[i][1]), 1e-300);
        worst = std::max({worst, reduced.y[i][0] > 0.0 ? du : 0.0, reduced.y[i][1] > 0.0 ? dv : 0.0});
      }
      report["reduction"] = {{"b1", p.b1}, {"b2", p.b2}, {"max_rel_diff", worst}, {"consistent", worst < 1e-6}};
      std::cout << "reduction max relative difference = " << output::format_double(worst) << '\n';
    }
    write_json(out_dir / "ode.json", report);
  });
}

}  // namespace wolbachia::cli
