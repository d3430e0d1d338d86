#pragma once

#include <vector>

#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

struct SymmetricSpectrum {
  std::vector<double> eigenvalues;  // ascending
  Matrix eigenvectors;              // column k pairs with eigenvalues[k]
};

/// Cyclic Jacobi rotations until every off-diagonal entry is below
/// 1e-12 * ||M||_F. Rejects inputs with asymmetry above 1e-10 * max|m_ij|.
SymmetricSpectrum symmetric_eigen(const Matrix& m);

/// m x (m-1) orthonormal basis of the complement of the all-ones vector.
Matrix ones_complement_basis(std::size_t m);

/// Smallest eigenvalue of a symmetric matrix restricted to the subspace
/// orthogonal to 1. For symmetric zero-row-sum PSD matrices with a simple
/// zero eigenvalue this is the algebraic connectivity lambda_2.
double lambda2(const Matrix& m);

struct TransitionMatrix {
  double start;
  double end;
  Matrix value;
};

/// State-transition matrix of x' = -G(t) x from s to t, by RK4 with step dt
/// aligned to the breakpoints of G.
TransitionMatrix state_transition(const TimeSignal& generator, double s, double t, double dt);

/// Largest eigenvalue of P U^T U P with P = I - 11^T/m: the squared gain of
/// U on the subspace orthogonal to 1.
double contraction_factor(const Matrix& u);

/// Largest |eigenvalue| of a symmetric matrix.
double spectral_norm_symmetric(const Matrix& m);

}  // namespace kuramoto
