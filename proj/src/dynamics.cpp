#include "kuramoto/dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

#include "kuramoto/error.hpp"
#include "kuramoto/rk4.hpp"

namespace kuramoto {

PDVector::PDVector(std::size_t oscillators, Vector values) : m_(oscillators), values_(std::move(values)) {
  if (values_.size() != m_ * (m_ - (m_ > 0 ? 1 : 0)) / 2)
    throw std::invalid_argument("PDVector: expected m(m-1)/2 entries");
}

double PDVector::at(std::size_t i, std::size_t j) const {
  if (i <= j || i >= m_) throw std::out_of_range("PDVector::at: need m > i > j");
  return values_[index(i, j)];
}

double PDVector::max_abs() const {
  double m = 0.0;
  for (double v : values_) m = std::max(m, std::abs(v));
  return m;
}

double pd_distance(const PDVector& a, const PDVector& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pd_distance: size mismatch");
  double d = 0.0;
  for (std::size_t k = 0; k < a.size(); ++k) d = std::max(d, std::abs(a.values()[k] - b.values()[k]));
  return d;
}

Vector kuramoto_rhs(std::span<const double> theta, const Matrix& omega, const Matrix& coupling) {
  const std::size_t m = theta.size();
  if (omega.rows() * omega.cols() != m || coupling.rows() != m || coupling.cols() != m)
    throw std::invalid_argument("kuramoto_rhs: dimension mismatch");
  Vector out(omega.data().begin(), omega.data().end());
  for (std::size_t i = 0; i < m; ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < m; ++j) {
      const double a = coupling(i, j);
      if (a != 0.0) s += a * std::sin(theta[j] - theta[i]);
    }
    out[i] += s;
  }
  return out;
}

Vector kuramoto_rhs(std::span<const double> theta, double t, const TimeSignal& omega,
                    const TimeSignal& coupling) {
  return kuramoto_rhs(theta, omega.evaluate(t), coupling.evaluate(t));
}

PhaseTrajectory simulate(const Vector& theta0, const TimeSignal& omega, const TimeSignal& coupling,
                         const SimulationOptions& options) {
  const double t0 = options.t_start;
  const double dt = options.dt;
  if (!(options.t_end > t0)) throw std::invalid_argument("simulate: t_end must exceed the start time");
  if (options.stride == 0) throw std::invalid_argument("simulate: stride must be positive");
  require_aligned(omega, t0, options.t_end, dt);
  require_aligned(coupling, t0, options.t_end, dt);
  // Shape check once up front.
  (void)kuramoto_rhs(theta0, omega.evaluate(t0), coupling.evaluate(t0));

  const auto steps = static_cast<std::size_t>(std::llround((options.t_end - t0) / dt));
  PhaseTrajectory traj;
  traj.times.reserve(steps / options.stride + 2);
  traj.phases.reserve(steps / options.stride + 2);
  traj.times.push_back(t0);
  traj.phases.push_back(theta0);

  auto rhs = [&](double t, Side side, const Vector& th) {
    return kuramoto_rhs(th, omega.evaluate(t, side), coupling.evaluate(t, side));
  };
  Vector theta = theta0;
  for (std::size_t k = 0; k < steps; ++k) {
    const double t = t0 + static_cast<double>(k) * dt;
    rk4_step(theta, t, dt, rhs);
    const double t_next = t0 + static_cast<double>(k + 1) * dt;
    for (double v : theta)
      if (!std::isfinite(v))
        throw BlowUp(t_next, "simulate: non-finite phase at t = " + std::to_string(t_next));
    if ((k + 1) % options.stride == 0 || k + 1 == steps) {
      traj.times.push_back(t_next);
      traj.phases.push_back(theta);
    }
  }
  return traj;
}

PDVector phase_differences(std::span<const double> theta) {
  const std::size_t m = theta.size();
  Vector pd;
  pd.reserve(m * (m > 0 ? m - 1 : 0) / 2);
  for (std::size_t i = 1; i < m; ++i)
    for (std::size_t j = 0; j < i; ++j) pd.push_back(theta[i] - theta[j]);
  return PDVector(m, std::move(pd));
}

Vector lift_phases(const PDVector& pd) {
  Vector theta(pd.oscillators(), 0.0);
  for (std::size_t i = 1; i < theta.size(); ++i) theta[i] = pd.at(i, 0);
  return theta;
}

namespace {

void require_radius(double r) {
  if (!(r >= 0.0 && r < std::numbers::pi / 2))
    throw std::invalid_argument("region radius r must lie in [0, pi/2), got " + std::to_string(r));
}

}  // namespace

bool region_membership(const PDVector& pd, double r) {
  require_radius(r);
  return pd.max_abs() <= r;
}

std::optional<double> invariance_monitor(const PhaseTrajectory& trajectory, double r) {
  require_radius(r);
  for (std::size_t k = 0; k < trajectory.size(); ++k)
    if (!region_membership(phase_differences(trajectory.phases[k]), r)) return trajectory.times[k];
  return std::nullopt;
}

double DivergenceSeries::max_after(double t) const {
  double m = 0.0;
  for (std::size_t k = 0; k < times.size(); ++k)
    if (times[k] >= t - 1e-12) m = std::max(m, values[k]);
  return m;
}

DivergenceSeries pd_divergence(const PhaseTrajectory& a, const PhaseTrajectory& b) {
  if (a.size() != b.size()) throw std::invalid_argument("pd_divergence: grids differ in length");
  DivergenceSeries out;
  out.times = a.times;
  out.values.reserve(a.size());
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (std::abs(a.times[k] - b.times[k]) > 1e-12 * std::max(1.0, std::abs(a.times[k])))
      throw std::invalid_argument("pd_divergence: grids differ at sample " + std::to_string(k));
    const double d = pd_distance(phase_differences(a.phases[k]), phase_differences(b.phases[k]));
    out.values.push_back(d);
    if (d > 1e-2) out.last_above_1e2 = a.times[k];
    if (d > 1e-3) out.last_above_1e3 = a.times[k];
  }
  out.final_value = out.values.empty() ? 0.0 : out.values.back();
  return out;
}

double hajnal_diameter(std::span<const double> delta) {
  if (delta.empty()) return 0.0;
  const auto [lo, hi] = std::minmax_element(delta.begin(), delta.end());
  return *hi - *lo;
}

}  // namespace kuramoto
