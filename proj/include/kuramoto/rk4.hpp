#pragma once

#include <cstddef>
#include <type_traits>

#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

namespace detail {

inline Vector shifted(const Vector& y, double a, const Vector& k) {
  Vector out(y.size());
  for (std::size_t i = 0; i < y.size(); ++i) out[i] = y[i] + a * k[i];
  return out;
}

inline Matrix shifted(const Matrix& y, double a, const Matrix& k) { return y + k * a; }

}  // namespace detail

/// One classical fourth-order Runge-Kutta step. `f(t, side, y)` returns the
/// derivative; the final stage asks for the left limit at t + dt so that a
/// step aligned to a switching instant uses only the piece it covers.
template <class State, class Rhs>
void rk4_step(State& y, double t, double dt, Rhs&& f) {
  const State k1 = f(t, Side::right, y);
  const State k2 = f(t + 0.5 * dt, Side::right, detail::shifted(y, 0.5 * dt, k1));
  const State k3 = f(t + 0.5 * dt, Side::right, detail::shifted(y, 0.5 * dt, k2));
  const State k4 = f(t + dt, Side::left, detail::shifted(y, dt, k3));
  if constexpr (std::is_same_v<State, Matrix>) {
    y += (k1 + (k2 + k3) * 2.0 + k4) * (dt / 6.0);
  } else {
    for (std::size_t i = 0; i < y.size(); ++i)
      y[i] += dt / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
  }
}

}  // namespace kuramoto
