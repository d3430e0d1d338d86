#pragma once

// Kuramoto network with time-varying frequencies and couplings:
//
//   d theta_i / dt = omega_i(t) + sum_j a_ij(t) sin(theta_j - theta_i)
//
// Phases live on the real line (no wrapping); phase differences are plain
// subtractions.

#include <cstddef>
#include <optional>
#include <span>
#include <vector>

#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

struct PhaseTrajectory {
  std::vector<double> times;
  std::vector<Vector> phases;

  std::size_t size() const { return times.size(); }
  std::size_t oscillators() const { return phases.empty() ? 0 : phases.front().size(); }
};

/// Independent phase differences theta_ij = theta_i - theta_j for i > j,
/// ordered (2,1), (3,1), (3,2), (4,1), ... Indices are 0-based in the API.
class PDVector {
 public:
  PDVector() = default;
  PDVector(std::size_t oscillators, Vector values);

  std::size_t oscillators() const { return m_; }
  std::size_t size() const { return values_.size(); }
  const Vector& values() const { return values_; }
  /// theta_ij for i > j.
  double at(std::size_t i, std::size_t j) const;
  double max_abs() const;

  static std::size_t index(std::size_t i, std::size_t j) { return i * (i - 1) / 2 + j; }

 private:
  std::size_t m_ = 0;
  Vector values_;
};

/// Max-abs distance between two PD vectors of equal length.
double pd_distance(const PDVector& a, const PDVector& b);

/// Right-hand side with the signal values already evaluated.
Vector kuramoto_rhs(std::span<const double> theta, const Matrix& omega, const Matrix& coupling);
Vector kuramoto_rhs(std::span<const double> theta, double t, const TimeSignal& omega,
                    const TimeSignal& coupling);

struct SimulationOptions {
  double t_end = 0.0;
  double dt = 1e-3;
  double t_start = 0.0;
  /// Record every `stride`-th step (plus the final state).
  std::size_t stride = 1;
};

/// Fixed-step RK4 integration. Throws std::invalid_argument on shape or
/// alignment errors, BlowUp on non-finite state.
PhaseTrajectory simulate(const Vector& theta0, const TimeSignal& omega, const TimeSignal& coupling,
                         const SimulationOptions& options);

PDVector phase_differences(std::span<const double> theta);
/// Lifts a PD vector to phases with theta_1 = 0 and theta_i = theta_i1.
Vector lift_phases(const PDVector& pd);

/// max |theta_ij| <= r. Throws if r is outside [0, pi/2).
bool region_membership(const PDVector& pd, double r);
/// Earliest sample time whose PDs leave the region, or nullopt if invariant.
std::optional<double> invariance_monitor(const PhaseTrajectory& trajectory, double r);

struct DivergenceSeries {
  std::vector<double> times;
  std::vector<double> values;  // max_{i>j} |phi_ij(t) - theta_ij(t)|
  double final_value = 0.0;
  /// Last sample time with a value above 1e-2 / 1e-3 (nullopt if never).
  std::optional<double> last_above_1e2;
  std::optional<double> last_above_1e3;

  /// Largest value at times >= t.
  double max_after(double t) const;
};

DivergenceSeries pd_divergence(const PhaseTrajectory& a, const PhaseTrajectory& b);

/// V(delta) = max_i delta_i - min_j delta_j.
double hajnal_diameter(std::span<const double> delta);

}  // namespace kuramoto
