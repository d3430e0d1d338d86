#include <chrono>
#include <cmath>
#include <fstream>
#include <iostream>
#include <numbers>

#include <CLI11.hpp>

#include "kuramoto/certificates.hpp"
#include "kuramoto/cli.hpp"
#include "kuramoto/error.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/instances.hpp"
#include "kuramoto/linalg.hpp"
#include "kuramoto_cli_internal.hpp"

namespace kuramoto::cli {

using nlohmann::ordered_json;
using namespace detail;

namespace detail {

const ordered_json& Invocation::parameters() const {
  static const ordered_json empty = ordered_json::object();
  const auto* p = find(config, "parameters");
  if (!p) return empty;
  if (!p->is_object()) throw ConfigError("parameters", "expected an object");
  return *p;
}

Invocation prepare(const std::filesystem::path& config_path, const Overrides& ov, const std::string& default_out) {
  Invocation inv;
  inv.config = load_json(config_path);
  if (!inv.config.is_object()) throw ConfigError("", "top level of the config must be an object");
  if (ov.seed || ov.dt) {
    auto& params = inv.config["parameters"];
    if (params.is_null()) params = ordered_json::object();
    if (!params.is_object()) throw ConfigError("parameters", "expected an object");
    if (ov.seed) params["seed"] = *ov.seed;
    if (ov.dt) params["dt"] = *ov.dt;
  }
  if (ov.out) inv.config["output"] = ov.out->string();
  inv.out_dir = text(inv.config, "output", "", default_out);
  // Where results land does not change them.
  ordered_json hashed = inv.config;
  hashed.erase("output");
  inv.hash = config_hash(hashed);
  return inv;
}

void write_summary(const Invocation& inv, const ordered_json& results, double wall_seconds) {
  ordered_json s;
  s["tool"] = {{"name", "kuramoto"},
               {"version", "1.0.0"},
               {"compiler", __VERSION__},
               {"json_library", std::to_string(NLOHMANN_JSON_VERSION_MAJOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_MINOR) + "." +
                                    std::to_string(NLOHMANN_JSON_VERSION_PATCH)}};
  s["config_hash"] = inv.hash;
  s["config"] = inv.config;
  s["results"] = results;
  s["wall_time_s"] = wall_seconds;
  std::filesystem::create_directories(inv.out_dir);
  std::ofstream out(inv.out_dir / "summary.json", std::ios::binary);
  out << s.dump(2) << '\n';
}

}  // namespace detail

namespace {

template <class F>
int guarded(std::ostream& err, F&& body) {
  try {
    return body();
  } catch (const ConfigError& e) {
    err << "config error: " << e.what() << '\n';
    return kExitSchema;
  } catch (const std::invalid_argument& e) {
    err << "invalid configuration: " << e.what() << '\n';
    return kExitSchema;
  } catch (const RegionExit& e) {
    err << "runtime failure: " << e.what() << " (exit time " << format_number(e.time()) << " s)\n";
    return kExitRuntime;
  } catch (const BlowUp& e) {
    err << "runtime failure: " << e.what() << " (at t = " << format_number(e.time()) << " s)\n";
    return kExitRuntime;
  } catch (const std::exception& e) {
    err << "runtime failure: " << e.what() << '\n';
    return kExitRuntime;
  }
}

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

void require_dimensions(const TimeSignal& omega, const TimeSignal& coupling) {
  if (omega.cols() != 1) throw ConfigError("signals.omega", "must be vector-valued");
  if (omega.rows() != coupling.rows())
    throw ConfigError("signals", "omega has " + std::to_string(omega.rows()) + " entries but coupling is " +
                                     std::to_string(coupling.rows()) + " x " + std::to_string(coupling.cols()));
}

std::vector<double> default_grid(const TimeSignal& a, const TimeSignal* b, double horizon) {
  auto grid = period_grid(a, 1000, horizon);
  if (b) grid = merge_grids(grid, period_grid(*b, 1000, horizon));
  return grid;
}

CertificateReport certify_config(const Invocation& inv) {
  const auto& cfg = inv.config;
  const std::string name = text(cfg, "criterion", "", std::nullopt);
  Criterion criterion;
  try {
    criterion = criterion_from_string(name);
  } catch (const std::invalid_argument& e) {
    throw ConfigError("criterion", e.what());
  }
  const auto& signals = require(cfg, "signals", "");
  const TimeSignal coupling = parse_signal(require(signals, "coupling", "signals"), "signals.coupling", ValueShape::square);
  std::optional<TimeSignal> omega;
  if (find(signals, "omega")) {
    omega = parse_signal(signals["omega"], "signals.omega", ValueShape::column);
    require_dimensions(*omega, coupling);
  }
  const auto& p = inv.parameters();
  const std::string pf = "parameters";
  const double horizon = number_or(p, "horizon", pf, 0.0);
  if (!coupling.period() && !(horizon > 0.0) && coupling.kind() != SignalKind::constant &&
      criterion != Criterion::thm1_spanning_tree)
    throw ConfigError("parameters.horizon", "required for aperiodic signals");

  switch (criterion) {
    case Criterion::invariance_pointwise:
    case Criterion::invariance_robust: {
      if (!omega) throw ConfigError("signals.omega", "missing required field");
      const double r = radius(p, "r", pf);
      const auto grid = default_grid(*omega, &coupling, horizon);
      return criterion == Criterion::invariance_pointwise ? invariance_pointwise(*omega, coupling, r, grid)
                                                          : invariance_robust(*omega, coupling, r, grid);
    }
    case Criterion::thm1_spanning_tree: {
      const auto& part = require(p, "partition", pf);
      SpanningTreePartition sp;
      sp.times = numbers(require(part, "times", "parameters.partition"), "parameters.partition.times");
      sp.etas = numbers(require(part, "etas", "parameters.partition"), "parameters.partition.etas");
      sp.bins = count(part, "bins", "parameters.partition", 0);
      if (find(part, "max_span")) sp.max_span = positive(part, "max_span", "parameters.partition", std::nullopt);
      return thm1_spanning_tree_check(coupling, sp);
    }
    case Criterion::cor1_sliding_window:
    case Criterion::thm2_xi_window: {
      const double window = positive(p, "T", pf, std::nullopt);
      const double eta = positive(p, "eta", pf, std::nullopt);
      const auto starts = window_starts(coupling, window, count(p, "window_points", pf, 1000), horizon);
      if (criterion == Criterion::cor1_sliding_window) return cor1_sliding_window_check(coupling, window, eta, starts);
      return thm2_window_check(coupling, radius(p, "r", pf), window, eta, starts);
    }
    case Criterion::thm3_lambda2_series:
    case Criterion::cor2_lambda2_uniform: {
      const double r = radius(p, "r", pf);
      const double h = positive(p, "h", pf, std::nullopt);
      const std::size_t n = count(p, "count", pf, 1);
      if (n == 0) throw ConfigError("parameters.count", "must be at least 1");
      if (criterion == Criterion::thm3_lambda2_series) return thm3_series_check(coupling, r, h, n);
      return cor2_uniform_check(coupling, r, h, n, positive(p, "alpha_hat", pf, 1e-6));
    }
  }
  throw ConfigError("criterion", "unsupported criterion");
}

}  // namespace

int run_simulate(const std::filesystem::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const auto start = std::chrono::steady_clock::now();
    const Invocation inv = prepare(config, ov, "out/simulate");
    const auto& signals = require(inv.config, "signals", "");
    const TimeSignal omega = parse_signal(require(signals, "omega", "signals"), "signals.omega", ValueShape::column);
    const TimeSignal coupling =
        parse_signal(require(signals, "coupling", "signals"), "signals.coupling", ValueShape::square);
    require_dimensions(omega, coupling);
    const auto& p = inv.parameters();
    const Vector theta0 = numbers(require(p, "theta0", "parameters"), "parameters.theta0");
    if (theta0.size() != omega.rows())
      throw ConfigError("parameters.theta0", "expected " + std::to_string(omega.rows()) + " entries");
    SimulationOptions opt;
    opt.t_end = positive(p, "t_end", "parameters", std::nullopt);
    opt.dt = positive(p, "dt", "parameters", 1e-3);
    std::optional<double> r;
    if (find(p, "r")) r = radius(p, "r", "parameters");
    const std::size_t stride = count(p, "output_stride", "parameters", 1);
    if (stride == 0) throw ConfigError("parameters.output_stride", "must be at least 1");

    const auto traj = simulate(theta0, omega, coupling, opt);
    write_trajectory_csv(inv.out_dir / "trajectory.csv", traj, inv.meta("t [s], theta [rad]"), stride);
    write_pd_csv(inv.out_dir / "pd.csv", traj, inv.meta("t [s], pd [rad]"), stride);

    ordered_json results;
    results["samples"] = traj.size();
    results["final_phases"] = traj.phases.back();
    results["final_pd"] = phase_differences(traj.phases.back()).values();
    if (r) {
      const auto exit = invariance_monitor(traj, *r);
      results["invariant"] = !exit.has_value();
      results["exit_time"] = exit ? ordered_json(*exit) : ordered_json(nullptr);
    }
    results["outputs"] = {"trajectory.csv", "pd.csv"};
    write_summary(inv, results, seconds_since(start));
    out << "simulate: wrote " << (inv.out_dir / "trajectory.csv").string() << '\n';
    return kExitOk;
  });
}

int run_certify(const std::filesystem::path& config, const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const Invocation inv = prepare(config, ov, "out/certify");
    const CertificateReport rep = certify_config(inv);
    ordered_json doc = rep.to_json();
    doc["config_hash"] = inv.hash;
    std::filesystem::create_directories(inv.out_dir);
    std::ofstream file(inv.out_dir / "certificate.json", std::ios::binary);
    file << doc.dump(2) << '\n';
    out << doc.dump(2) << '\n';
    return rep.exit_code();
  });
}

int run_experiment(const std::string& name, const std::filesystem::path& config, const Overrides& ov,
                   std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    if (name != "ap" && name != "perturb" && name != "fast")
      throw ConfigError("", "unknown experiment '" + name + "' (expected ap, perturb or fast)");
    const Invocation inv = prepare(config, ov, "out/" + name);
    const std::string scenario = text(inv.config, "scenario", "", name);
    if (scenario != name)
      throw ConfigError("scenario", "config describes '" + scenario + "' but experiment '" + name + "' was requested");
    if (name == "ap") return experiment_ap(inv, out);
    if (name == "perturb") return experiment_perturb(inv, out);
    return experiment_fast(inv, out);
  });
}

int run_verify_paper_values(const Overrides& ov, std::ostream& out, std::ostream& err) {
  return guarded(err, [&] {
    const double r = std::numbers::pi / 3;
    const auto ap = ap_instance();
    const auto fast = fast_instance();
    const double xi1 = xi_index(SignedNetwork(coupling_from_negated_laplacian(ap.printed1)), r);
    const double xi2 = xi_index(SignedNetwork(coupling_from_negated_laplacian(ap.printed2)), r);
    const double lam = lambda2((fast.printed1 + fast.printed2) * -0.5);
    // The other sign reading, for comparison only.
    const double alt1 = xi_index(SignedNetwork(coupling_from_negated_laplacian(ap.printed1 * -1.0)), r);
    const double alt2 = xi_index(SignedNetwork(coupling_from_negated_laplacian(ap.printed2 * -1.0)), r);

    struct Row {
      const char* name;
      double computed, printed, tolerance;
    };
    const Row rows[] = {{"xi(L1, pi/3)", xi1, 0.0858, 1e-3},
                        {"xi(L2, pi/3)", xi2, -0.1249, 1e-3},
                        {"xi(L1) + xi(L2)", xi1 + xi2, -0.0391, 2e-3},
                        {"|lambda2(mean)|", std::abs(lam), 2.5004, 1e-3}};
    ordered_json doc;
    doc["r"] = r;
    doc["values"] = ordered_json::array();
    bool all = true;
    char line[160];
    std::snprintf(line, sizeof line, "%-18s %14s %10s %10s  %s\n", "quantity", "computed", "printed", "tol", "match");
    out << line;
    for (const auto& row : rows) {
      const bool ok = std::abs(row.computed - row.printed) <= row.tolerance;
      all = all && ok;
      std::snprintf(line, sizeof line, "%-18s %14.6f %10.4f %10.0e  %s\n", row.name, row.computed, row.printed,
                    row.tolerance, ok ? "yes" : "NO");
      out << line;
      doc["values"].push_back({{"quantity", row.name},
                               {"computed", row.computed},
                               {"printed", row.printed},
                               {"tolerance", row.tolerance},
                               {"match", ok}});
    }
    std::snprintf(line, sizeof line, "opposite sign reading: xi(L1) = %.6f, xi(L2) = %.6f\n", alt1, alt2);
    out << line;
    doc["opposite_sign_reading"] = {{"xi1", alt1}, {"xi2", alt2}};
    doc["all_match"] = all;
    if (ov.out) {
      std::filesystem::create_directories(*ov.out);
      std::ofstream file(*ov.out / "reference_values.json", std::ios::binary);
      file << doc.dump(2) << '\n';
    }
    return all ? kExitOk : 1;
  });
}

int main_entry(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Kuramoto networks with time-varying couplings: simulation, certificates, experiments"};
  app.require_subcommand(1);
  std::string config;
  std::string out_dir;
  std::uint64_t seed = 0;
  double dt = 0.0;
  auto add_common = [&](CLI::App* sub, bool needs_config) {
    auto* opt = sub->add_option("--config", config, "JSON configuration file");
    if (needs_config) opt->required()->check(CLI::ExistingFile);
    sub->add_option("--out", out_dir, "output directory");
    sub->add_option("--seed", seed, "random seed override");
    sub->add_option("--dt", dt, "integrator step override [s]")->check(CLI::PositiveNumber);
  };
  auto* sim = app.add_subcommand("simulate", "integrate one network and write trajectories");
  add_common(sim, true);
  auto* cert = app.add_subcommand("certify", "evaluate one stability or invariance criterion");
  add_common(cert, true);
  auto* exp = app.add_subcommand("experiment", "run a bundled experiment: ap, perturb or fast");
  std::string which;
  exp->add_option("name", which, "experiment name")->required()->check(CLI::IsMember({"ap", "perturb", "fast"}));
  add_common(exp, true);
  auto* verify = app.add_subcommand("verify-paper-values", "recompute the published xi and lambda2 values");
  verify->add_option("--out", out_dir, "directory for reference_values.json");

  std::vector<const char*> argv;
  for (const auto& a : args) argv.push_back(a.c_str());
  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e, out, err);
    return code == 0 ? kExitOk : kExitSchema;
  }

  Overrides ov;
  if (!out_dir.empty()) ov.out = out_dir;
  auto parsed = [](CLI::App* sub, const char* flag) { return sub->count(flag) > 0; };
  CLI::App* chosen = app.get_subcommands().front();
  if (chosen != verify) {
    if (parsed(chosen, "--seed")) ov.seed = seed;
    if (parsed(chosen, "--dt")) ov.dt = dt;
  }
  if (chosen == sim) return run_simulate(config, ov, out, err);
  if (chosen == cert) return run_certify(config, ov, out, err);
  if (chosen == exp) return run_experiment(which, config, ov, out, err);
  return run_verify_paper_values(ov, out, err);
}

}  // namespace kuramoto::cli
