#include "kuramoto/linalg.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

#include "kuramoto/rk4.hpp"

namespace kuramoto {

SymmetricSpectrum symmetric_eigen(const Matrix& input) {
  if (!input.square()) throw std::invalid_argument("symmetric_eigen: matrix must be square");
  const std::size_t n = input.rows();
  const double scale = input.max_abs();
  if (input.asymmetry() > 1e-10 * scale)
    throw std::invalid_argument("symmetric_eigen: matrix is not symmetric");

  Matrix a = input;
  // Exact symmetrization so rotations act on one consistent matrix.
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) a(i, j) = a(j, i) = 0.5 * (a(i, j) + a(j, i));
  Matrix v = Matrix::identity(n);
  const double threshold = 1e-12 * input.frobenius_norm();

  for (int sweep = 0; sweep < 100; ++sweep) {
    double off = 0.0;
    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) off = std::max(off, std::abs(a(p, q)));
    if (off <= threshold) break;

    for (std::size_t p = 0; p < n; ++p)
      for (std::size_t q = p + 1; q < n; ++q) {
        const double apq = a(p, q);
        if (std::abs(apq) <= threshold) continue;
        const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
        const double t = (theta >= 0.0 ? 1.0 : -1.0) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
        const double c = 1.0 / std::sqrt(t * t + 1.0);
        const double s = t * c;

        a(p, p) -= t * apq;
        a(q, q) += t * apq;
        a(p, q) = a(q, p) = 0.0;
        for (std::size_t k = 0; k < n; ++k) {
          if (k == p || k == q) continue;
          const double akp = a(k, p);
          const double akq = a(k, q);
          a(k, p) = a(p, k) = c * akp - s * akq;
          a(k, q) = a(q, k) = s * akp + c * akq;
        }
        for (std::size_t k = 0; k < n; ++k) {
          const double vkp = v(k, p);
          const double vkq = v(k, q);
          v(k, p) = c * vkp - s * vkq;
          v(k, q) = s * vkp + c * vkq;
        }
      }
  }

  std::vector<std::size_t> order(n);
  std::iota(order.begin(), order.end(), 0);
  std::stable_sort(order.begin(), order.end(), [&](std::size_t x, std::size_t y) { return a(x, x) < a(y, y); });

  SymmetricSpectrum out{std::vector<double>(n), Matrix(n, n)};
  for (std::size_t k = 0; k < n; ++k) {
    out.eigenvalues[k] = a(order[k], order[k]);
    for (std::size_t i = 0; i < n; ++i) out.eigenvectors(i, k) = v(i, order[k]);
  }
  return out;
}

Matrix ones_complement_basis(std::size_t m) {
  // Helmert basis: column k has k+1 nonzeros and is orthogonal to 1.
  Matrix q(m, m == 0 ? 0 : m - 1);
  for (std::size_t k = 0; k + 1 < m; ++k) {
    const double kk = static_cast<double>(k + 1);
    const double norm = std::sqrt(kk * (kk + 1.0));
    for (std::size_t i = 0; i <= k; ++i) q(i, k) = 1.0 / norm;
    q(k + 1, k) = -kk / norm;
  }
  return q;
}

double lambda2(const Matrix& m) {
  if (!m.square() || m.rows() < 2) throw std::invalid_argument("lambda2: need a square matrix with m >= 2");
  if (m.asymmetry() > 1e-10 * m.max_abs()) throw std::invalid_argument("lambda2: matrix is not symmetric");
  const Matrix q = ones_complement_basis(m.rows());
  const Matrix restricted = q.transpose() * m * q;
  return symmetric_eigen(restricted).eigenvalues.front();
}

TransitionMatrix state_transition(const TimeSignal& generator, double s, double t, double dt) {
  if (!generator.square_value())
    throw std::invalid_argument("state_transition: generator must be square-matrix valued");
  require_aligned(generator, s, t, dt);
  const std::size_t n = generator.rows();
  const auto steps = static_cast<long long>(std::llround((t - s) / dt));
  Matrix u = Matrix::identity(n);
  auto rhs = [&](double tau, Side side, const Matrix& x) {
    Matrix g = generator.evaluate(tau, side);
    g *= -1.0;
    return g * x;
  };
  for (long long k = 0; k < steps; ++k) rk4_step(u, s + static_cast<double>(k) * dt, dt, rhs);
  return {s, t, std::move(u)};
}

double contraction_factor(const Matrix& u) {
  if (!u.square()) throw std::invalid_argument("contraction_factor: matrix must be square");
  const std::size_t n = u.rows();
  Matrix p = Matrix::identity(n);
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = 0; j < n; ++j) p(i, j) -= 1.0 / static_cast<double>(n);
  Matrix gram = p * u.transpose() * u * p;
  for (std::size_t i = 0; i < n; ++i)
    for (std::size_t j = i + 1; j < n; ++j) gram(i, j) = gram(j, i) = 0.5 * (gram(i, j) + gram(j, i));
  return symmetric_eigen(gram).eigenvalues.back();
}

double spectral_norm_symmetric(const Matrix& m) {
  const auto ev = symmetric_eigen(m).eigenvalues;
  return ev.empty() ? 0.0 : std::max(std::abs(ev.front()), std::abs(ev.back()));
}

}  // namespace kuramoto
