#pragma once

// Invariance and stability criteria for phase-difference trajectories.
// Every check is pure and returns a CertificateReport whose witnesses carry
// the numbers that certify a pass or locate the first violation. Node
// indices in witnesses are 1-based.

#include <optional>
#include <span>
#include <string>
#include <vector>

#include <json.hpp>

#include "kuramoto/graph.hpp"
#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

enum class Criterion {
  invariance_pointwise,
  invariance_robust,
  thm1_spanning_tree,
  cor1_sliding_window,
  thm2_xi_window,
  thm3_lambda2_series,
  cor2_lambda2_uniform,
};

enum class Verdict { pass, fail, inconclusive };

std::string to_string(Criterion c);
std::string to_string(Verdict v);
/// Accepts the names produced by to_string(Criterion).
Criterion criterion_from_string(const std::string& name);

struct CertificateReport {
  Criterion criterion;
  Verdict verdict = Verdict::inconclusive;
  nlohmann::ordered_json witnesses = nlohmann::ordered_json::object();
  nlohmann::ordered_json parameters = nlohmann::ordered_json::object();

  bool passed() const { return verdict == Verdict::pass; }
  /// 0 pass, 1 fail, 2 inconclusive.
  int exit_code() const;
  nlohmann::ordered_json to_json() const;
};

/// Left side of the pointwise invariance inequality for the ordered pair
/// (i, j) at one instant. Exposed for independent re-evaluation in tests.
double invariance_margin(const Matrix& omega, const SignedNetwork& net, std::size_t i, std::size_t j,
                         double r);

CertificateReport invariance_pointwise(const TimeSignal& omega, const TimeSignal& coupling, double r,
                                       std::span<const double> grid);

/// Delta_omega / sin(r) <= mu0 + mu2 - mu1, all quantities as grid extrema.
CertificateReport invariance_robust(const TimeSignal& omega, const TimeSignal& coupling, double r,
                                    std::span<const double> grid);
CertificateReport invariance_robust(const TimeSignal& omega, const TimeSignal& coupling, double r);

struct SpanningTreePartition {
  std::vector<double> times;    // t_1 < t_2 < ... ; intervals [t_n, t_{n+1}]
  std::vector<double> etas;     // one per interval, or a single value for all
  std::size_t bins = 0;         // bins per interval; 0 means m - 1
  std::optional<double> max_span;  // binned part is [t_n, min(t_{n+1}, t_n + T)]
};

CertificateReport thm1_spanning_tree_check(const TimeSignal& coupling, const SpanningTreePartition& partition);

/// Candidate window starts covering one period (or [0, horizon]): a uniform
/// grid plus the instants where a window edge crosses a breakpoint, plus
/// midpoints between consecutive candidates.
std::vector<double> window_starts(const TimeSignal& coupling, double window, std::size_t points = 1000,
                                  double horizon = 0.0);

CertificateReport cor1_sliding_window_check(const TimeSignal& coupling, double window, double eta,
                                            std::span<const double> starts);

/// xi(L, r) = -min_{i != j} { c_ij^r + sum_{k != i,j} min(a~_ik^r, a~_jk^r) }.
double xi_index(const SignedNetwork& net, double r);
/// (1/(t-s)) * integral of xi(L(tau), r) over [s, t]; exact for
/// piecewise-constant couplings, midpoint quadrature otherwise.
double xi_window_average(const TimeSignal& coupling, double r, double s, double t);

CertificateReport thm2_window_check(const TimeSignal& coupling, double r, double window, double eta,
                                    std::span<const double> starts);

/// Off-diagonals l_ij <= 0 scaled by cos(r); positive ones kept; diagonal
/// rebuilt for zero row sums.
LaplacianMatrix tilde_laplacian(const LaplacianMatrix& l, double r);

/// alpha_k = lambda_2 of the tilde transform of the window-averaged Laplacian
/// over [k h, (k+1) h], k = 0..count-1.
std::vector<double> lambda2_series(const TimeSignal& coupling, double r, double h, std::size_t count);

CertificateReport thm3_series_check(const TimeSignal& coupling, double r, double h, std::size_t count);
CertificateReport cor2_uniform_check(const TimeSignal& coupling, double r, double h, std::size_t count,
                                     double alpha_hat = 1e-6);

}  // namespace kuramoto
