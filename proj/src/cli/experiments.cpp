#include <algorithm>
#include <chrono>
#include <cmath>
#include <future>
#include <limits>
#include <numbers>
#include <ostream>
#include <random>

#include "kuramoto/certificates.hpp"
#include "kuramoto/cli.hpp"
#include "kuramoto/scenarios.hpp"
#include "kuramoto_cli_internal.hpp"

namespace kuramoto::cli::detail {
namespace {

constexpr double kSixthPi = std::numbers::pi / 6;

double seconds_since(std::chrono::steady_clock::time_point start) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
}

// Generator for draw stream `stream` of a run seeded with `seed`.
std::mt19937_64 stream_generator(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform(std::mt19937_64& gen, std::pair<double, double> range) {
  return range.first + (range.second - range.first) * std::generate_canonical<double, 53>(gen);
}

std::string two_digits(std::size_t k) {
  char buf[24];
  std::snprintf(buf, sizeof buf, "%02zu", k);
  return buf;
}

std::pair<TimeSignal, TimeSignal> config_signals(const Invocation& inv) {
  const auto& signals = require(inv.config, "signals", "");
  TimeSignal omega = parse_signal(require(signals, "omega", "signals"), "signals.omega", ValueShape::column);
  TimeSignal coupling = parse_signal(require(signals, "coupling", "signals"), "signals.coupling", ValueShape::square);
  if (omega.cols() != 1) throw ConfigError("signals.omega", "must be vector-valued");
  if (omega.rows() != coupling.rows()) throw ConfigError("signals", "omega and coupling dimensions differ");
  return {std::move(omega), std::move(coupling)};
}

// One two-column file per oscillator phase and per phase difference.
void write_panel_series(const std::filesystem::path& dir, const std::string& prefix, const PhaseTrajectory& traj,
                        std::size_t stride, const Invocation& inv) {
  std::vector<double> t;
  std::vector<std::size_t> idx;
  for (std::size_t k = 0; k < traj.size(); ++k)
    if (k % stride == 0 || k + 1 == traj.size()) {
      t.push_back(traj.times[k]);
      idx.push_back(k);
    }
  const std::size_t m = traj.oscillators();
  for (std::size_t i = 0; i < m; ++i) {
    std::vector<double> y;
    for (std::size_t k : idx) y.push_back(traj.phases[k][i]);
    const std::string name = "theta_" + std::to_string(i + 1);
    write_two_column_csv(dir / (prefix + "a_" + name + ".csv"), "t", name, t, y, inv.meta("t [s], theta [rad]"));
  }
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) {
      std::vector<double> y;
      for (std::size_t k : idx) y.push_back(traj.phases[k][i] - traj.phases[k][j]);
      const std::string name = "pd_" + std::to_string(i + 1) + "_" + std::to_string(j + 1);
      write_two_column_csv(dir / (prefix + "b_" + name + ".csv"), "t", name, t, y, inv.meta("t [s], pd [rad]"));
    }
}

nlohmann::ordered_json lock_json(const PhaseLockedState& s) {
  return {{"Omega", s.omega},
          {"pd", s.pd.values()},
          {"phases", s.phases},
          {"lock_time", s.lock_time},
          {"residual", s.residual},
          {"certificate_verified", s.verified}};
}

}  // namespace

int experiment_ap(const Invocation& inv, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto [omega, coupling] = config_signals(inv);
  const auto& p = inv.parameters();
  const std::string pf = "parameters";
  const double r = radius(p, "r", pf);
  if (!coupling.period()) throw ConfigError("signals.coupling", "the AP experiment needs periodic signals");
  const double period = positive(p, "period", pf, *coupling.period());
  const std::size_t runs = count(p, "runs", pf, 10);
  if (runs == 0) throw ConfigError("parameters.runs", "must be at least 1");
  const auto ic = range(p, "initial_range", pf, {-kSixthPi, kSixthPi});
  const double t_end = positive(p, "t_end", pf, 60.0);
  const double dt = positive(p, "dt", pf, 1e-3);
  const std::uint64_t seed = detail::seed(p, "seed", pf, 1);
  const double t_conv = number_or(p, "convergence_time", pf, 40.0);
  const double eta = positive(p, "eta", pf, 1e-6);
  const std::size_t stride = std::max<std::size_t>(1, count(p, "output_stride", pf, 10));
  OrbitOptions orbit_opt;
  orbit_opt.r = r;
  orbit_opt.dt = dt;
  orbit_opt.tolerance = positive(p, "orbit_tolerance", pf, 1e-10);
  orbit_opt.max_iter = count(p, "orbit_max_iter", pf, 200);

  const auto grid = merge_grids(period_grid(omega), period_grid(coupling));
  const auto thm2 = thm2_window_check(coupling, r, period, eta, window_starts(coupling, period));
  const auto inv_point = invariance_pointwise(omega, coupling, r, grid);
  const auto inv_robust = invariance_robust(omega, coupling, r, grid);

  const std::size_t m = omega.rows();
  std::vector<std::future<PhaseTrajectory>> jobs;
  for (std::size_t k = 0; k < runs; ++k) {
    auto gen = stream_generator(seed, k);
    Vector theta0(m);
    for (double& v : theta0) v = uniform(gen, ic);
    jobs.push_back(std::async(std::launch::async, [&, theta0] {
      SimulationOptions opt;
      opt.t_end = t_end;
      opt.dt = dt;
      return simulate(theta0, omega, coupling, opt);
    }));
  }
  std::vector<PhaseTrajectory> trajs;
  for (auto& j : jobs) trajs.push_back(j.get());

  const PeriodicPDOrbit orbit = find_periodic_pd(omega, coupling, period, PDVector(m, Vector(m * (m - 1) / 2, 0.0)), orbit_opt);

  nlohmann::ordered_json run_json = nlohmann::ordered_json::array();
  bool all_inside = true;
  double max_to_orbit = 0.0;
  for (std::size_t k = 0; k < runs; ++k) {
    const auto exit = invariance_monitor(trajs[k], r);
    all_inside = all_inside && !exit;
    double max_pd = 0.0;
    for (const auto& th : trajs[k].phases) max_pd = std::max(max_pd, phase_differences(th).max_abs());
    const double to_orbit = pd_distance(phase_differences(trajs[k].phases.back()), orbit.at(trajs[k].times.back()));
    max_to_orbit = std::max(max_to_orbit, to_orbit);
    run_json.push_back({{"run", k + 1},
                        {"initial_phases", trajs[k].phases.front()},
                        {"max_abs_pd", max_pd},
                        {"exit_time", exit ? nlohmann::ordered_json(*exit) : nlohmann::ordered_json(nullptr)},
                        {"distance_to_orbit_at_end", to_orbit}});
  }
  double max_divergence = 0.0;
  for (std::size_t a = 0; a < runs; ++a)
    for (std::size_t b = a + 1; b < runs; ++b)
      max_divergence = std::max(max_divergence, pd_divergence(trajs[a], trajs[b]).max_after(t_conv));

  for (std::size_t k = 0; k < runs; ++k) {
    write_trajectory_csv(inv.out_dir / ("run_" + two_digits(k + 1) + "_trajectory.csv"), trajs[k],
                         inv.meta("t [s], theta [rad]"), stride);
    write_pd_csv(inv.out_dir / ("run_" + two_digits(k + 1) + "_pd.csv"), trajs[k], inv.meta("t [s], pd [rad]"),
                 stride);
  }
  PhaseTrajectory orbit_traj;
  orbit_traj.times = orbit.times;
  for (const auto& pd : orbit.pd) orbit_traj.phases.push_back(lift_phases(pd));
  write_pd_csv(inv.out_dir / "orbit.csv", orbit_traj, inv.meta("t [s], pd [rad]; one period of the periodic PD orbit"),
               stride);
  write_panel_series(inv.out_dir / "plots", "fig1", trajs.front(), stride, inv);

  nlohmann::ordered_json results;
  results["certificates"] = {thm2.to_json(), inv_point.to_json(), inv_robust.to_json()};
  results["runs"] = run_json;
  results["orbit"] = {{"period", orbit.period},
                      {"iterations", orbit.iterations},
                      {"residual", orbit.residual},
                      {"periodicity_error", orbit.periodicity_error},
                      {"certificate_verified", orbit.verified},
                      {"initial_pd", orbit.pd.front().values()}};
  results["checks"] = {{"all_runs_inside_region", all_inside},
                       {"max_pairwise_divergence_after_convergence_time", max_divergence},
                       {"pairwise_divergence_below_1e-3", max_divergence < 1e-3},
                       {"orbit_residual_below_1e-8", orbit.residual < 1e-8},
                       {"max_distance_to_orbit_at_end", max_to_orbit},
                       {"runs_within_1e-3_of_orbit", max_to_orbit < 1e-3},
                       {"orbit_periodicity_below_1e-6", orbit.periodicity_error < 1e-6}};
  write_summary(inv, results, seconds_since(start));
  out << "experiment ap: " << runs << " runs, orbit residual " << format_number(orbit.residual)
      << ", max divergence after t = " << format_number(t_conv) << " s: " << format_number(max_divergence) << '\n';
  return kExitOk;
}

int experiment_perturb(const Invocation& inv, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto& p = inv.parameters();
  const std::string pf = "parameters";
  const std::size_t m = count(p, "m", pf, 20);
  if (m < 2) throw ConfigError("parameters.m", "need at least two oscillators");
  const double prob = positive(p, "p", pf, 0.2);
  if (prob > 1.0) throw ConfigError("parameters.p", "must lie in (0, 1]");
  const double eps = positive(p, "epsilon", pf, 0.1);
  const auto omega_range = range(p, "omega_range", pf, {0.8, 1.2});
  const auto phase_range = range(p, "phase_range", pf, {-kSixthPi, kSixthPi});
  const double t_end = positive(p, "t_end", pf, 50.0);
  const double horizon = positive(p, "boundedness_horizon", pf, 200.0);
  const double dt = positive(p, "dt", pf, 1e-3);
  const double r = radius(p, "r", pf);
  const std::uint64_t seed = detail::seed(p, "seed", pf, 1);
  const std::size_t stride = std::max<std::size_t>(1, count(p, "output_stride", pf, 10));

  const SignedNetwork net = er_random_network(m, prob, seed);
  const Matrix& a_bar = net.adjacency();
  // Draw order: omega_bar, alpha, beta (row-major).
  auto gen = stream_generator(seed, 1000001);
  Vector omega_bar(m), alpha(m);
  for (double& v : omega_bar) v = uniform(gen, omega_range);
  for (double& v : alpha) v = uniform(gen, phase_range);
  Matrix beta(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) beta(i, j) = uniform(gen, phase_range);

  LockOptions lock_opt;
  lock_opt.r = r;
  lock_opt.dt = dt;
  const PhaseLockedState lock = phase_locked_equilibrium(omega_bar, a_bar, Vector(m, 0.0), lock_opt);

  const Matrix zero_col(m, 1, 0.0);
  const Matrix ones_col(m, 1, 1.0);
  const Matrix alpha_col = Matrix::column(alpha);
  const TimeSignal omega_pert = TimeSignal::sinusoid(zero_col, ones_col, alpha_col, 1.0, Trig::sin);
  const TimeSignal coupling_pert = TimeSignal::sinusoid(Matrix(m, m, 0.0), a_bar, beta, 1.0, Trig::cos);

  SimulationOptions exp_opt;
  exp_opt.t_end = std::max(t_end, horizon);
  exp_opt.dt = dt;
  const PerturbationExpansion expansion = first_order_approx(lock, a_bar, omega_pert, coupling_pert, eps, exp_opt);
  const BoundednessResult bounded = boundedness_check(expansion, horizon);

  auto full_run = [&](double e) {
    const TimeSignal w = TimeSignal::sinusoid(Matrix::column(omega_bar), ones_col * e, alpha_col, 1.0, Trig::sin);
    const TimeSignal a = TimeSignal::sinusoid(a_bar, a_bar * e, beta, 1.0, Trig::cos);
    SimulationOptions opt;
    opt.t_end = t_end;
    opt.dt = dt;
    return simulate(lock.phases, w, a, opt);
  };
  auto f1 = std::async(std::launch::async, full_run, eps);
  auto f2 = std::async(std::launch::async, full_run, 0.5 * eps);
  const PhaseTrajectory run1 = f1.get();
  const PhaseTrajectory run2 = f2.get();

  auto approx_error = [&](const PhaseTrajectory& traj, double e) {
    double err = 0.0;
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const double approx = lock.phases[0] + lock.omega * traj.times[k] + e * expansion.phi[k][0];
      err = std::max(err, std::abs(traj.phases[k][0] - approx));
    }
    return err;
  };
  const double e1 = approx_error(run1, eps);
  const double e2 = approx_error(run2, 0.5 * eps);
  double tracking = 0.0;
  for (const auto& th : run1.phases) tracking = std::max(tracking, pd_distance(phase_differences(th), lock.pd));
  const auto exit1 = invariance_monitor(run1, r);
  const auto exit2 = invariance_monitor(run2, r);

  write_trajectory_csv(inv.out_dir / "trajectory.csv", run1, inv.meta("t [s], theta [rad]"), stride);
  write_pd_csv(inv.out_dir / "pd.csv", run1, inv.meta("t [s], pd [rad]"), stride);
  {
    std::vector<std::string> header{"t"};
    for (std::size_t i = 1; i <= m; ++i) header.push_back("phi_" + std::to_string(i));
    std::vector<std::vector<double>> rows;
    for (std::size_t k = 0; k < expansion.times.size(); k += stride) {
      std::vector<double> row{expansion.times[k]};
      row.insert(row.end(), expansion.phi[k].begin(), expansion.phi[k].end());
      rows.push_back(std::move(row));
    }
    write_columns_csv(inv.out_dir / "expansion.csv", header, rows, inv.meta("t [s], phi [rad per unit epsilon]"));
  }
  {
    std::vector<double> t, exact, approx;
    for (std::size_t k = 0; k < run1.size(); k += stride) {
      t.push_back(run1.times[k]);
      exact.push_back(run1.phases[k][0]);
      approx.push_back(lock.phases[0] + lock.omega * run1.times[k] + eps * expansion.phi[k][0]);
    }
    write_two_column_csv(inv.out_dir / "plots" / "fig2_theta_1.csv", "t", "theta_1", t, exact,
                         inv.meta("t [s], theta [rad]"));
    write_two_column_csv(inv.out_dir / "plots" / "fig2_theta_1_first_order.csv", "t", "theta_1_first_order", t,
                         approx, inv.meta("t [s], theta [rad]"));
  }

  nlohmann::ordered_json edges = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = i + 1; j < m; ++j)
      if (net.has_link(i, j)) edges.push_back({i + 1, j + 1});
  nlohmann::ordered_json results;
  results["network_edges"] = edges;
  results["omega_bar"] = omega_bar;
  results["alpha"] = alpha;
  results["locked_state"] = lock_json(lock);
  results["expansion"] = {{"bound_U", expansion.bound},
                          {"ode_residual", expansion.residual},
                          {"zero_mean_perturbations", expansion.zero_mean},
                          {"bounded", bounded.bounded},
                          {"running_max_slope", bounded.slope},
                          {"horizon", horizon}};
  results["approximation_error"] = {{"epsilon", e1}, {"half_epsilon", e2}, {"ratio", e2 > 0.0 ? e1 / e2 : 0.0}};
  results["checks"] = {{"approximation_error_below_0.05", e1 < 0.05},
                       {"ratio_in_2.5_6", e2 > 0.0 && e1 / e2 >= 2.5 && e1 / e2 <= 6.0},
                       {"inside_region", !exit1 && !exit2},
                       {"max_pd_deviation_from_lock", tracking},
                       {"pd_tracking_below_0.15", tracking < 0.15}};
  write_summary(inv, results, seconds_since(start));
  out << "experiment perturb: e(eps) = " << format_number(e1) << ", ratio " << format_number(e2 > 0 ? e1 / e2 : 0.0)
      << ", bounded " << (bounded.bounded ? "yes" : "no") << '\n';
  return kExitOk;
}

int experiment_fast(const Invocation& inv, std::ostream& out) {
  const auto start = std::chrono::steady_clock::now();
  const auto [omega, coupling] = config_signals(inv);
  const auto& p = inv.parameters();
  const std::string pf = "parameters";
  FastSwitchOptions opt;
  opt.r = radius(p, "r", pf);
  opt.t_end = positive(p, "t_end", pf, 100.0);
  opt.dt_max = positive(p, "dt", pf, 1e-3);
  opt.tail_fraction = positive(p, "tail_fraction", pf, 0.2);
  if (opt.tail_fraction > 1.0) throw ConfigError("parameters.tail_fraction", "must lie in (0, 1]");
  std::vector<double> freqs{10, 20, 40, 50, 80};
  if (find(p, "frequencies")) freqs = numbers(p["frequencies"], "parameters.frequencies");
  std::vector<double> plot_freqs{10, 50};
  if (find(p, "plot_frequencies")) plot_freqs = numbers(p["plot_frequencies"], "parameters.plot_frequencies");
  const std::size_t m = omega.rows();
  Vector theta0(m, 0.0);
  if (find(p, "theta0")) {
    theta0 = numbers(p["theta0"], "parameters.theta0");
    if (theta0.size() != m) throw ConfigError("parameters.theta0", "expected " + std::to_string(m) + " entries");
  }
  const std::size_t stride = std::max<std::size_t>(1, count(p, "output_stride", pf, 10));

  const FastSwitchReport rep = fast_switching_sweep(omega, coupling, freqs, theta0, opt);
  const double period = *coupling.period();
  const auto thm3 = thm3_series_check(coupling, opt.r, period, 1);

  std::vector<std::vector<double>> rows;
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  double lo = std::numeric_limits<double>::infinity(), hi = 0.0;
  for (const auto& pt : rep.points) {
    rows.push_back({pt.frequency, pt.epsilon, pt.dt, pt.tail_deviation, pt.tail_deviation * pt.frequency});
    points.push_back({{"frequency_hz", pt.frequency},
                      {"epsilon", pt.epsilon},
                      {"dt", pt.dt},
                      {"tail_deviation", pt.tail_deviation},
                      {"tail_times_h", pt.tail_deviation * pt.frequency},
                      {"max_abs_pd", pt.max_pd},
                      {"inside_region", pt.inside_region}});
    lo = std::min(lo, pt.tail_deviation * pt.frequency);
    hi = std::max(hi, pt.tail_deviation * pt.frequency);
  }
  write_columns_csv(inv.out_dir / "sweep.csv", {"h", "epsilon", "dt", "tail_deviation", "tail_times_h"}, rows,
                    inv.meta("h [Hz], epsilon [1], dt [s], tail_deviation [rad], tail_times_h [rad/s]"));

  for (double h : plot_freqs) {
    if (!(h > 0.0)) throw ConfigError("parameters.plot_frequencies", "frequencies must be positive");
    const double e = 1.0 / (h * period);
    const TimeSignal w = time_compress(omega, e);
    const TimeSignal a = time_compress(coupling, e);
    const TimeSignal* sigs[] = {&w, &a};
    SimulationOptions so;
    so.t_end = opt.t_end;
    so.dt = aligned_step(sigs, opt.dt_max);
    const auto traj = simulate(theta0, w, a, so);
    const std::string tag = "h" + format_number(h);
    write_pd_csv(inv.out_dir / ("pd_" + tag + ".csv"), traj, inv.meta("t [s], pd [rad]"), stride);
    write_panel_series(inv.out_dir / "plots", "fig3_" + tag + "_", traj, stride, inv);
  }

  auto tail_at = [&](double h) -> std::optional<double> {
    for (const auto& pt : rep.points)
      if (pt.frequency == h) return pt.tail_deviation;
    return std::nullopt;
  };
  nlohmann::ordered_json results;
  results["averaged_lock"] = lock_json(rep.averaged);
  results["lambda2_averaged_laplacian"] = rep.lambda2_average;
  results["pieces_symmetric_psd"] = rep.symmetric_psd;
  results["certificates"] = {thm3.to_json()};
  results["tail_start"] = rep.tail_start;
  results["points"] = points;
  results["checks"] = {{"tail_times_h_spread", lo > 0.0 ? hi / lo : 0.0},
                       {"tail_times_h_within_factor_3", lo > 0.0 && hi / lo <= 3.0}};
  if (auto t10 = tail_at(10), t50 = tail_at(50); t10 && t50)
    results["checks"]["tail_50hz_below_10hz"] = *t50 < *t10;
  write_summary(inv, results, seconds_since(start));
  out << "experiment fast: " << rep.points.size() << " frequencies, tail*h spread "
      << format_number(lo > 0.0 ? hi / lo : 0.0) << '\n';
  return kExitOk;
}

}  // namespace kuramoto::cli::detail
