#include "kuramoto/scenarios.hpp"

#include <algorithm>
#include <cmath>
#include <future>
#include <limits>
#include <numeric>
#include <random>
#include <stdexcept>
#include <string>

#include "kuramoto/certificates.hpp"
#include "kuramoto/error.hpp"
#include "kuramoto/linalg.hpp"
#include "kuramoto/rk4.hpp"

namespace kuramoto {
namespace {

Matrix column_of(const Vector& v) { return Matrix::column(v); }

double max_pd_rate(const Vector& rate) {
  const auto [lo, hi] = std::minmax_element(rate.begin(), rate.end());
  return *hi - *lo;
}

std::string fmt_time(double t) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.6g", t);
  return buf;
}

bool static_certificate(const Vector& omega_bar, const Matrix& a_bar, double r) {
  const auto omega = TimeSignal::constant(column_of(omega_bar));
  const auto coupling = TimeSignal::constant(a_bar);
  const std::vector<double> grid{0.0};
  if (!invariance_pointwise(omega, coupling, r, grid).passed()) return false;
  if (xi_index(SignedNetwork(a_bar), r) < 0.0) return true;
  const std::vector<double> start{0.0};
  if (cor1_sliding_window_check(coupling, 1.0, 1e-9, start).passed()) return true;
  return thm3_series_check(coupling, r, 1.0, 1).passed();
}

}  // namespace

PhaseLockedState phase_locked_equilibrium(const Vector& omega_bar, const Matrix& a_bar, const Vector& theta0,
                                          const LockOptions& options) {
  const std::size_t m = omega_bar.size();
  if (m < 2 || theta0.size() != m || a_bar.rows() != m || a_bar.cols() != m)
    throw std::invalid_argument("phase_locked_equilibrium: dimension mismatch");
  if (!(options.r >= 0.0 && options.r < std::acos(0.0)))
    throw std::invalid_argument("phase_locked_equilibrium: r must lie in [0, pi/2)");
  if (!region_membership(phase_differences(theta0), options.r))
    throw std::invalid_argument("phase_locked_equilibrium: initial PDs are outside the region");

  const Matrix omega = column_of(omega_bar);
  auto rhs = [&](double, Side, const Vector& th) { return kuramoto_rhs(th, omega, a_bar); };

  // Rates are sampled every `check` steps; the lock needs a full quiet window.
  const auto check = std::max<std::size_t>(1, static_cast<std::size_t>(std::llround(0.01 / options.dt)));
  const auto steps = static_cast<std::size_t>(std::llround(options.t_max / options.dt));
  Vector theta = theta0;
  double quiet_since = 0.0;
  bool quiet = false;
  for (std::size_t k = 0; k < steps; ++k) {
    rk4_step(theta, static_cast<double>(k) * options.dt, options.dt, rhs);
    if ((k + 1) % check != 0) continue;
    const double t = static_cast<double>(k + 1) * options.dt;
    const auto pd = phase_differences(theta);
    if (!std::isfinite(pd.max_abs())) throw BlowUp(t, "phase_locked_equilibrium: non-finite state");
    if (!region_membership(pd, options.r))
      throw RegionExit(t, "phase_locked_equilibrium: PDs left the region at t = " + fmt_time(t));
    const Vector rate = rhs(t, Side::right, theta);
    if (max_pd_rate(rate) < options.tolerance) {
      if (!quiet) {
        quiet = true;
        quiet_since = t;
      }
      if (t - quiet_since >= options.window - 1e-12) {
        PhaseLockedState out;
        out.omega = std::accumulate(rate.begin(), rate.end(), 0.0) / static_cast<double>(m);
        out.phases = theta;
        for (double& v : out.phases) v -= theta[0];
        out.pd = phase_differences(out.phases);
        out.lock_time = t;
        const Vector res = kuramoto_rhs(out.phases, omega, a_bar);
        for (double v : res) out.residual = std::max(out.residual, std::abs(v - out.omega));
        out.verified = static_certificate(omega_bar, a_bar, options.r);
        return out;
      }
    } else {
      quiet = false;
    }
  }
  throw RuntimeFailure("phase_locked_equilibrium: no lock within t_max = " + fmt_time(options.t_max) + " s");
}

PDVector poincare_map(const PDVector& pd0, const TimeSignal& omega, const TimeSignal& coupling, double period,
                      double dt, double r, double t0) {
  if (!region_membership(pd0, r)) throw std::invalid_argument("poincare_map: starting PDs are outside the region");
  SimulationOptions opt;
  opt.t_start = t0;
  opt.t_end = t0 + period;
  opt.dt = dt;
  const auto traj = simulate(lift_phases(pd0), omega, coupling, opt);
  if (auto exit = invariance_monitor(traj, r))
    throw RegionExit(*exit, "poincare_map: PDs left the region at t = " + fmt_time(*exit));
  return phase_differences(traj.phases.back());
}

const PDVector& PeriodicPDOrbit::at(double t) const {
  if (pd.empty()) throw std::logic_error("PeriodicPDOrbit::at: empty orbit");
  double local = std::fmod(t, period);
  if (local < 0.0) local += period;
  const auto it = std::lower_bound(times.begin(), times.end(), local);
  std::size_t k = static_cast<std::size_t>(it - times.begin());
  if (k == times.size()) k = times.size() - 1;
  if (k > 0 && local - times[k - 1] < times[k] - local) --k;
  return pd[k];
}

PeriodicPDOrbit find_periodic_pd(const TimeSignal& omega, const TimeSignal& coupling, double period,
                                 const PDVector& seed, const OrbitOptions& options) {
  if (!(period > 0.0)) throw std::invalid_argument("find_periodic_pd: period must be positive");
  PeriodicPDOrbit orbit;
  orbit.period = period;
  PDVector current = seed;
  bool converged = false;
  for (std::size_t it = 0; it < options.max_iter; ++it) {
    PDVector next = poincare_map(current, omega, coupling, period, options.dt, options.r);
    orbit.residual = pd_distance(next, current);
    orbit.iterations = it + 1;
    current = std::move(next);
    if (orbit.residual < options.tolerance) {
      converged = true;
      break;
    }
  }
  if (!converged)
    throw RuntimeFailure("find_periodic_pd: no fixed point after " + std::to_string(options.max_iter) +
                         " iterations (residual " + fmt_time(orbit.residual) + ")");

  // Two periods from the fixed point: the first is the orbit, the second
  // measures periodicity sample by sample.
  SimulationOptions opt;
  opt.t_end = 2.0 * period;
  opt.dt = options.dt;
  const auto traj = simulate(lift_phases(current), omega, coupling, opt);
  if (auto exit = invariance_monitor(traj, options.r))
    throw RegionExit(*exit, "find_periodic_pd: orbit left the region at t = " + fmt_time(*exit));
  const std::size_t half = (traj.size() - 1) / 2;
  for (std::size_t k = 0; k <= half; ++k) {
    orbit.times.push_back(traj.times[k]);
    orbit.pd.push_back(phase_differences(traj.phases[k]));
    orbit.periodicity_error = std::max(
        orbit.periodicity_error, pd_distance(orbit.pd.back(), phase_differences(traj.phases[k + half])));
  }
  orbit.verified = thm2_window_check(coupling, options.r, period, 1e-9,
                                     window_starts(coupling, period, 200))
                       .passed() &&
                   invariance_pointwise(omega, coupling, options.r,
                                        merge_grids(period_grid(omega), period_grid(coupling)))
                       .passed();
  return orbit;
}

PerturbationExpansion first_order_approx(const PhaseLockedState& base, const Matrix& a_bar,
                                         const TimeSignal& omega_pert, const TimeSignal& coupling_pert,
                                         double epsilon, const SimulationOptions& options) {
  const std::size_t m = base.phases.size();
  if (a_bar.rows() != m || a_bar.cols() != m || omega_pert.rows() * omega_pert.cols() != m ||
      coupling_pert.rows() != m || coupling_pert.cols() != m)
    throw std::invalid_argument("first_order_approx: dimension mismatch");
  if (options.stride == 0) throw std::invalid_argument("first_order_approx: stride must be positive");

  PerturbationExpansion out;
  out.epsilon = epsilon;
  out.base = base;
  for (const TimeSignal* sig : {&omega_pert, &coupling_pert}) {
    if (sig->kind() == SignalKind::constant) {
      if (sig->evaluate(0.0).max_abs() > 1e-9) out.zero_mean = false;
      continue;
    }
    if (!sig->period()) throw std::invalid_argument("first_order_approx: perturbations must be periodic");
    if (integrate_window(*sig, 0.0, *sig->period()).max_abs() > 1e-9) out.zero_mean = false;
  }

  Matrix sin_bar(m, m), y(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    double diag = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      const double d = base.phases[j] - base.phases[i];
      sin_bar(i, j) = std::sin(d);
      y(i, j) = a_bar(i, j) * std::cos(d);
      diag += y(i, j);
    }
    y(i, i) = -diag;
  }
  auto forcing = [&](double t, Side side) {
    const Matrix w = omega_pert.evaluate(t, side);
    const Matrix a = coupling_pert.evaluate(t, side);
    Vector z(w.data().begin(), w.data().end());
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = 0; j < m; ++j) z[i] += a(i, j) * sin_bar(i, j);
    return z;
  };
  auto rhs = [&](double t, Side side, const Vector& phi) {
    Vector d = forcing(t, side);
    const Vector yp = y * phi;
    for (std::size_t i = 0; i < m; ++i) d[i] += yp[i];
    return d;
  };

  require_aligned(omega_pert, options.t_start, options.t_end, options.dt);
  require_aligned(coupling_pert, options.t_start, options.t_end, options.dt);
  const auto steps = static_cast<std::size_t>(std::llround((options.t_end - options.t_start) / options.dt));
  Vector phi(m, 0.0);
  std::vector<Vector> all;
  all.reserve(steps + 1);
  all.push_back(phi);
  for (std::size_t k = 0; k < steps; ++k) {
    rk4_step(phi, options.t_start + static_cast<double>(k) * options.dt, options.dt, rhs);
    all.push_back(phi);
  }
  for (const auto& p : all)
    for (double v : p) out.bound = std::max(out.bound, std::abs(v));
  // Centered-difference check of the ODE at every step (second order in dt).
  for (std::size_t k = 1; k + 1 < all.size(); ++k) {
    const double t = options.t_start + static_cast<double>(k) * options.dt;
    const Vector d = rhs(t, Side::right, all[k]);
    for (std::size_t i = 0; i < m; ++i)
      out.residual = std::max(out.residual, std::abs((all[k + 1][i] - all[k - 1][i]) / (2.0 * options.dt) - d[i]));
  }
  for (std::size_t k = 0; k < all.size(); k += options.stride) {
    out.times.push_back(options.t_start + static_cast<double>(k) * options.dt);
    out.phi.push_back(std::move(all[k]));
  }
  if ((all.size() - 1) % options.stride != 0) {
    out.times.push_back(options.t_end);
    out.phi.push_back(std::move(all.back()));
  }
  return out;
}

BoundednessResult boundedness_check(const PerturbationExpansion& expansion, double horizon) {
  BoundednessResult res;
  if (expansion.times.empty()) return res;
  if (expansion.times.back() < horizon - 1e-9)
    throw std::invalid_argument("boundedness_check: expansion shorter than the horizon");
  std::vector<double> ts, run;
  double running = 0.0;
  for (std::size_t k = 0; k < expansion.times.size() && expansion.times[k] <= horizon + 1e-9; ++k) {
    for (double v : expansion.phi[k]) running = std::max(running, std::abs(v));
    if (expansion.times[k] >= 0.5 * horizon) {
      ts.push_back(expansion.times[k]);
      run.push_back(running);
    }
  }
  res.bound = running;
  if (ts.size() >= 2) {
    const double n = static_cast<double>(ts.size());
    const double mt = std::accumulate(ts.begin(), ts.end(), 0.0) / n;
    const double mr = std::accumulate(run.begin(), run.end(), 0.0) / n;
    double sxy = 0.0, sxx = 0.0;
    for (std::size_t k = 0; k < ts.size(); ++k) {
      sxy += (ts[k] - mt) * (run[k] - mr);
      sxx += (ts[k] - mt) * (ts[k] - mt);
    }
    res.slope = sxx > 0.0 ? sxy / sxx : 0.0;
  }
  res.bounded = res.slope < 1e-4;
  return res;
}

FastSwitchReport fast_switching_sweep(const TimeSignal& omega, const TimeSignal& coupling,
                                      std::span<const double> frequencies, const Vector& theta0,
                                      const FastSwitchOptions& options) {
  if (!omega.period() || !coupling.period())
    throw std::invalid_argument("fast_switching_sweep: the base schedule must be periodic");
  const double period = *coupling.period();
  if (std::abs(*omega.period() - period) > 1e-12 * period)
    throw std::invalid_argument("fast_switching_sweep: frequency and coupling periods differ");
  for (std::size_t k = 0; k < frequencies.size(); ++k) {
    if (!(frequencies[k] > 0.0)) throw std::invalid_argument("fast_switching_sweep: frequencies must be positive");
    if (k > 0 && !(frequencies[k] > frequencies[k - 1]))
      throw std::invalid_argument("fast_switching_sweep: frequencies must be strictly increasing");
  }

  FastSwitchReport rep;
  rep.r = options.r;
  rep.t_end = options.t_end;
  rep.tail_start = (1.0 - options.tail_fraction) * options.t_end;

  const Matrix omega_avg = window_average(omega, 0.0, period).value;
  Matrix a_avg = window_average(coupling, 0.0, period).value;
  for (std::size_t i = 0; i < a_avg.rows(); ++i) a_avg(i, i) = 0.0;
  rep.lambda2_average = lambda2(laplacian_from_adjacency(SignedNetwork(a_avg)).matrix());
  rep.symmetric_psd = true;
  for (const auto& piece : coupling.piece_values()) {
    Matrix a = piece;
    for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) = 0.0;
    const auto l = laplacian_from_adjacency(SignedNetwork(a)).matrix();
    if (l.asymmetry() > 1e-10 * std::max(1.0, l.max_abs()) || lambda2(l) < -1e-9) rep.symmetric_psd = false;
  }
  if (!(rep.lambda2_average > 0.0))
    throw RuntimeFailure("fast_switching_sweep: averaged Laplacian has lambda_2 <= 0");

  LockOptions lock;
  lock.r = options.r;
  lock.dt = options.dt_max;
  try {
    rep.averaged = phase_locked_equilibrium(omega_avg.to_vector(), a_avg, theta0, lock);
  } catch (const RuntimeFailure& e) {
    throw RuntimeFailure(std::string("fast_switching_sweep: averaged system did not lock: ") + e.what());
  }

  auto run = [&](double h) {
    FastSwitchPoint pt;
    pt.frequency = h;
    pt.epsilon = 1.0 / (h * period);
    const TimeSignal w = time_compress(omega, pt.epsilon);
    const TimeSignal a = time_compress(coupling, pt.epsilon);
    const TimeSignal* sigs[] = {&w, &a};
    pt.dt = aligned_step(sigs, options.dt_max);
    SimulationOptions opt;
    opt.t_end = options.t_end;
    opt.dt = pt.dt;
    const auto traj = simulate(theta0, w, a, opt);
    pt.inside_region = !invariance_monitor(traj, options.r).has_value();
    for (std::size_t k = 0; k < traj.size(); ++k) {
      const auto pd = phase_differences(traj.phases[k]);
      pt.max_pd = std::max(pt.max_pd, pd.max_abs());
      if (traj.times[k] >= rep.tail_start - 1e-12)
        pt.tail_deviation = std::max(pt.tail_deviation, pd_distance(pd, rep.averaged.pd));
    }
    return pt;
  };
  std::vector<std::future<FastSwitchPoint>> jobs;
  for (double h : frequencies) jobs.push_back(std::async(std::launch::async, run, h));
  for (auto& j : jobs) rep.points.push_back(j.get());
  return rep;
}

SignedNetwork er_random_network(std::size_t m, double p, std::uint64_t seed) {
  if (m < 2) throw std::invalid_argument("er_random_network: need m >= 2");
  if (!(p > 0.0 && p <= 1.0)) throw std::invalid_argument("er_random_network: p must lie in (0, 1]");
  constexpr std::uint64_t kMaxAttempts = 10000;
  for (std::uint64_t attempt = 0; attempt < kMaxAttempts; ++attempt) {
    std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                      static_cast<std::uint32_t>(attempt)};
    std::mt19937_64 gen(seq);
    Matrix a(m, m, 0.0);
    for (std::size_t i = 0; i < m; ++i)
      for (std::size_t j = i + 1; j < m; ++j)
        if (std::generate_canonical<double, 53>(gen) < p) a(i, j) = a(j, i) = 1.0;
    if (is_connected_undirected(a)) return SignedNetwork(std::move(a));
  }
  throw RuntimeFailure("er_random_network: no connected graph after 10^4 attempts (p too small?)");
}

}  // namespace kuramoto
