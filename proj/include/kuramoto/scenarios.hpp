#pragma once

// Experiment drivers: phase-locked equilibria of static networks, periodic
// PD orbits through the Poincare map, first-order perturbation expansions,
// fast-switching sweeps and seeded Erdos-Renyi networks.

#include <cstdint>
#include <optional>
#include <span>
#include <vector>

#include "kuramoto/dynamics.hpp"
#include "kuramoto/graph.hpp"
#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

struct PhaseLockedState {
  double omega = 0.0;  // collective frequency
  PDVector pd;
  Vector phases;       // representative phases, phases[0] == 0
  double lock_time = 0.0;
  double residual = 0.0;  // max_i |omega_i + sum_j a_ij sin(phi_j - phi_i) - Omega|
  bool verified = false;  // a static stability certificate passed
};

struct LockOptions {
  double r = 1.0471975511965976;
  double dt = 1e-3;
  double t_max = 500.0;
  double window = 1.0;
  double tolerance = 1e-10;
};

/// Integrates the static network until every PD derivative stays below the
/// tolerance for a trailing window. Throws RegionExit when the PDs leave the
/// region and RuntimeFailure when no lock is found by t_max.
PhaseLockedState phase_locked_equilibrium(const Vector& omega_bar, const Matrix& a_bar, const Vector& theta0,
                                          const LockOptions& options = {});

/// PD after one period starting from pd0 at time t0. Throws RegionExit if the
/// trajectory leaves the region on the way.
PDVector poincare_map(const PDVector& pd0, const TimeSignal& omega, const TimeSignal& coupling, double period,
                      double dt, double r, double t0 = 0.0);

struct PeriodicPDOrbit {
  double period = 0.0;
  std::vector<double> times;  // one period, both endpoints included
  std::vector<PDVector> pd;
  double residual = 0.0;  // |H(Theta*) - Theta*| at the last iteration
  std::size_t iterations = 0;
  double periodicity_error = 0.0;  // max_t |Theta*(t + period) - Theta*(t)|
  bool verified = false;

  /// Orbit value at time t (reduced modulo the period, nearest sample).
  const PDVector& at(double t) const;
};

struct OrbitOptions {
  double r = 1.0471975511965976;
  double dt = 1e-3;
  double tolerance = 1e-10;
  std::size_t max_iter = 200;
};

/// Fixed-point iteration of the Poincare map. Throws RuntimeFailure if it
/// does not converge.
PeriodicPDOrbit find_periodic_pd(const TimeSignal& omega, const TimeSignal& coupling, double period,
                                 const PDVector& seed, const OrbitOptions& options = {});

struct PerturbationExpansion {
  double epsilon = 0.0;
  PhaseLockedState base;
  std::vector<double> times;
  std::vector<Vector> phi;
  double bound = 0.0;      // sup_t max_i |phi_i(t)|
  double residual = 0.0;   // centered-difference residual of the linear ODE
  bool zero_mean = true;   // perturbations average to zero over one period
};

/// Phi' = z(t) + Y Phi, Phi(0) = 0, with y_ij = a_ij cos(phi_j - phi_i) and
/// z_i = Omega_i(t) + sum_j A_ij(t) sin(phi_j - phi_i) around the locked state.
/// Omega_pert is m x 1, coupling_pert is m x m; both must be periodic or
/// constant.
PerturbationExpansion first_order_approx(const PhaseLockedState& base, const Matrix& a_bar,
                                         const TimeSignal& omega_pert, const TimeSignal& coupling_pert,
                                         double epsilon, const SimulationOptions& options);

struct BoundednessResult {
  bool bounded = false;
  double bound = 0.0;
  double slope = 0.0;  // least-squares slope of the running max over the second half
};

BoundednessResult boundedness_check(const PerturbationExpansion& expansion, double horizon);

struct FastSwitchPoint {
  double frequency = 0.0;  // full switching cycles per second
  double epsilon = 0.0;    // time compression applied to the base schedule
  double dt = 0.0;         // step actually used (aligned to the breakpoints)
  double tail_deviation = 0.0;
  double max_pd = 0.0;
  bool inside_region = false;
};

struct FastSwitchReport {
  PhaseLockedState averaged;
  double lambda2_average = 0.0;  // lambda_2 of the averaged Laplacian
  bool symmetric_psd = false;    // every piece symmetric PSD
  double r = 0.0;
  double t_end = 0.0;
  double tail_start = 0.0;
  std::vector<FastSwitchPoint> points;  // strictly increasing frequency
};

struct FastSwitchOptions {
  double r = 1.0471975511965976;
  double t_end = 100.0;
  double dt_max = 1e-3;
  double tail_fraction = 0.2;
};

/// Frequency h means one full cycle of the base schedule every 1/h seconds.
/// Runs one simulation per frequency concurrently.
FastSwitchReport fast_switching_sweep(const TimeSignal& omega, const TimeSignal& coupling,
                                      std::span<const double> frequencies, const Vector& theta0,
                                      const FastSwitchOptions& options = {});

/// Connected undirected 0/1 network. Attempt k draws from a generator seeded
/// with (seed, k); gives up after 10^4 attempts.
SignedNetwork er_random_network(std::size_t m, double p, std::uint64_t seed);

}  // namespace kuramoto
