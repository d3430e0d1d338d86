#include "kuramoto/certificates.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

#include "kuramoto/linalg.hpp"

namespace kuramoto {
namespace {

using nlohmann::ordered_json;

void require_radius(double r) {
  if (!(r >= 0.0 && r < std::numbers::pi / 2))
    throw std::invalid_argument("r must lie in [0, pi/2), got " + std::to_string(r));
}

ordered_json matrix_json(const Matrix& m) {
  ordered_json rows = ordered_json::array();
  for (std::size_t i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(m(i, j) + 0.0);
    rows.push_back(std::move(row));
  }
  return rows;
}

struct NegativeEntry {
  double time;
  std::size_t i, j;
  double value;
};

std::optional<NegativeEntry> find_negative_coupling(const TimeSignal& coupling, std::span<const double> grid) {
  for (double t : grid) {
    const Matrix a = coupling.evaluate(t);
    for (std::size_t i = 0; i < a.rows(); ++i)
      for (std::size_t j = 0; j < a.cols(); ++j)
        if (i != j && a(i, j) < 0.0) return NegativeEntry{t, i, j, a(i, j)};
  }
  return std::nullopt;
}

CertificateReport negative_coupling_report(Criterion c, const NegativeEntry& neg) {
  CertificateReport rep{c, Verdict::inconclusive};
  rep.witnesses["reason"] = "negative coupling detected";
  rep.witnesses["time"] = neg.time;
  rep.witnesses["pair"] = {neg.i + 1, neg.j + 1};
  rep.witnesses["value"] = neg.value;
  return rep;
}

// Sampling grid for hypothesis checks: one period, or the given horizon.
std::vector<double> hypothesis_grid(const TimeSignal& coupling, double horizon) {
  return period_grid(coupling, coupling.piecewise_constant() ? 0 : 1000, horizon);
}

LaplacianMatrix coupling_laplacian(const Matrix& adjacency) {
  Matrix a = adjacency;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) = 0.0;
  return laplacian_from_adjacency(SignedNetwork(std::move(a)));
}

std::string scope_label(const TimeSignal& coupling) {
  return coupling.period() ? "one period (sufficient by periodicity)" : "pass on horizon";
}

}  // namespace

std::string to_string(Criterion c) {
  switch (c) {
    case Criterion::invariance_pointwise: return "invariance-pointwise";
    case Criterion::invariance_robust: return "invariance-robust";
    case Criterion::thm1_spanning_tree: return "thm1-spanning-tree";
    case Criterion::cor1_sliding_window: return "cor1-sliding-window";
    case Criterion::thm2_xi_window: return "thm2-xi-window";
    case Criterion::thm3_lambda2_series: return "thm3-lambda2-series";
    case Criterion::cor2_lambda2_uniform: return "cor2-lambda2-uniform";
  }
  return "unknown";
}

std::string to_string(Verdict v) {
  switch (v) {
    case Verdict::pass: return "pass";
    case Verdict::fail: return "fail";
    case Verdict::inconclusive: return "inconclusive";
  }
  return "unknown";
}

Criterion criterion_from_string(const std::string& name) {
  for (auto c : {Criterion::invariance_pointwise, Criterion::invariance_robust, Criterion::thm1_spanning_tree,
                 Criterion::cor1_sliding_window, Criterion::thm2_xi_window, Criterion::thm3_lambda2_series,
                 Criterion::cor2_lambda2_uniform})
    if (to_string(c) == name) return c;
  throw std::invalid_argument("unknown criterion '" + name + "'");
}

int CertificateReport::exit_code() const {
  switch (verdict) {
    case Verdict::pass: return 0;
    case Verdict::fail: return 1;
    case Verdict::inconclusive: return 2;
  }
  return 2;
}

ordered_json CertificateReport::to_json() const {
  ordered_json j;
  j["criterion"] = to_string(criterion);
  j["verdict"] = to_string(verdict);
  j["witnesses"] = witnesses;
  j["parameters"] = parameters;
  return j;
}

// ---------------------------------------------------------------------------
// Invariance

double invariance_margin(const Matrix& omega, const SignedNetwork& net, std::size_t i, std::size_t j, double r) {
  const double sr = std::sin(r);
  double margin = omega.data()[i] - omega.data()[j] - (net.weight(i, j) + net.weight(j, i)) * sr;
  for (std::size_t k = 0; k < net.size(); ++k) {
    if (k == i || k == j) continue;
    const double aik = net.weight(i, k);
    const double ajk = net.weight(j, k);
    if (aik > 0.0 && ajk > 0.0)
      margin -= std::min(aik, ajk) * sr;
    else
      margin -= (std::min(aik, 0.0) + std::min(ajk, 0.0)) * sr;
  }
  return margin;
}

CertificateReport invariance_pointwise(const TimeSignal& omega, const TimeSignal& coupling, double r,
                                       std::span<const double> grid) {
  require_radius(r);
  if (grid.empty()) throw std::invalid_argument("invariance_pointwise: empty grid");
  CertificateReport rep{Criterion::invariance_pointwise};
  rep.parameters["r"] = r;
  rep.parameters["grid_points"] = grid.size();

  double worst = -std::numeric_limits<double>::infinity();
  double worst_t = 0.0;
  std::size_t wi = 0, wj = 0;
  for (double t : grid) {
    const Matrix w = omega.evaluate(t);
    const SignedNetwork net(coupling.evaluate(t));
    for (std::size_t i = 0; i < net.size(); ++i)
      for (std::size_t j = 0; j < net.size(); ++j) {
        if (i == j) continue;
        const double v = invariance_margin(w, net, i, j, r);
        if (v > worst) {
          worst = v;
          worst_t = t;
          wi = i;
          wj = j;
        }
      }
  }
  rep.verdict = worst < 0.0 ? Verdict::pass : Verdict::fail;
  rep.witnesses["max_margin"] = worst;
  rep.witnesses["argmax_time"] = worst_t;
  rep.witnesses["argmax_pair"] = {wi + 1, wj + 1};
  return rep;
}

CertificateReport invariance_robust(const TimeSignal& omega, const TimeSignal& coupling, double r,
                                    std::span<const double> grid) {
  require_radius(r);
  if (grid.empty()) throw std::invalid_argument("invariance_robust: empty grid");
  CertificateReport rep{Criterion::invariance_robust};
  rep.parameters["r"] = r;
  rep.parameters["grid_points"] = grid.size();

  double delta_omega = 0.0;
  for (double t : grid) {
    const Matrix wm = omega.evaluate(t);
    const auto w = wm.data();
    const auto [lo, hi] = std::minmax_element(w.begin(), w.end());
    delta_omega = std::max(delta_omega, *hi - *lo);
  }
  const auto q = ergodic_quantities(coupling, grid);
  const double bound = q.mu0 + q.mu2 - q.mu1;
  rep.witnesses["delta_omega"] = delta_omega;
  rep.witnesses["mu0"] = q.mu0;
  rep.witnesses["mu1"] = q.mu1;
  rep.witnesses["mu2"] = q.mu2;
  rep.witnesses["bound"] = bound;

  if (r == 0.0) {
    rep.witnesses["lhs"] = delta_omega > 0.0 ? std::numeric_limits<double>::infinity() : 0.0;
    rep.verdict = (delta_omega == 0.0 && bound >= 0.0) ? Verdict::pass : Verdict::fail;
    return rep;
  }
  const double lhs = delta_omega / std::sin(r);
  rep.witnesses["lhs"] = lhs;
  rep.verdict = lhs <= bound ? Verdict::pass : Verdict::fail;
  return rep;
}

CertificateReport invariance_robust(const TimeSignal& omega, const TimeSignal& coupling, double r) {
  const auto grid = merge_grids(period_grid(omega), period_grid(coupling));
  return invariance_robust(omega, coupling, r, grid);
}

// ---------------------------------------------------------------------------
// Spanning-tree criteria (nonnegative couplings)

CertificateReport thm1_spanning_tree_check(const TimeSignal& coupling, const SpanningTreePartition& partition) {
  CertificateReport rep{Criterion::thm1_spanning_tree};
  const auto& ts = partition.times;
  if (ts.size() < 2) throw std::invalid_argument("thm1: partition needs at least two times");
  for (std::size_t n = 1; n < ts.size(); ++n)
    if (!(ts[n] > ts[n - 1])) throw std::invalid_argument("thm1: partition must be strictly increasing");
  const std::size_t intervals = ts.size() - 1;
  if (partition.etas.size() != intervals && partition.etas.size() != 1)
    throw std::invalid_argument("thm1: need one eta per interval (or a single eta)");
  for (double e : partition.etas)
    if (!(e > 0.0)) throw std::invalid_argument("thm1: eta_n must be positive");
  const std::size_t m = coupling.rows();
  const std::size_t bins = partition.bins == 0 ? std::max<std::size_t>(1, m - 1) : partition.bins;

  rep.parameters["partition"] = ts;
  rep.parameters["etas"] = partition.etas;
  rep.parameters["bins"] = bins;
  if (partition.max_span) rep.parameters["T"] = *partition.max_span;

  const double horizon_end = ts.back();
  auto grid = period_grid(coupling, coupling.piecewise_constant() ? 0 : 1000, horizon_end);
  if (!coupling.period()) grid = merge_grids(grid, coupling.breakpoints_between(ts.front(), ts.back()));
  if (auto neg = find_negative_coupling(coupling, grid)) return negative_coupling_report(rep.criterion, *neg);

  double eta_sum = 0.0;
  ordered_json roots = ordered_json::array();
  for (std::size_t n = 0; n < intervals; ++n) {
    const double eta = partition.etas.size() == 1 ? partition.etas[0] : partition.etas[n];
    eta_sum += eta;
    const double start = ts[n];
    double end = ts[n + 1];
    if (partition.max_span) end = std::min(end, start + *partition.max_span);
    const double width = (end - start) / static_cast<double>(bins);
    for (std::size_t k = 0; k < bins; ++k) {
      const double b0 = start + width * static_cast<double>(k);
      const double b1 = k + 1 == bins ? end : b0 + width;
      const auto z = coupling_laplacian(coupling.integrate(b0, b1));
      const auto root = spanning_tree_root(threshold_graph(z, eta));
      if (!root) {
        rep.verdict = Verdict::fail;
        rep.witnesses["failing_interval"] = n + 1;
        rep.witnesses["failing_bin"] = k + 1;
        rep.witnesses["bin"] = {b0, b1};
        rep.witnesses["Z"] = matrix_json(z.matrix());
        rep.witnesses["eta_sum"] = eta_sum;
        return rep;
      }
      roots.push_back(*root + 1);
    }
  }
  rep.verdict = Verdict::pass;
  rep.witnesses["tree_roots"] = roots;
  rep.witnesses["eta_sum"] = eta_sum;
  rep.witnesses["scope"] = "validated on the supplied partition";
  return rep;
}

std::vector<double> window_starts(const TimeSignal& coupling, double window, std::size_t points, double horizon) {
  const double span = coupling.period().value_or(horizon);
  if (!(span > 0.0)) return {0.0};
  std::vector<double> grid;
  for (std::size_t i = 0; i < points; ++i) grid.push_back(span * static_cast<double>(i) / static_cast<double>(points));
  std::vector<double> kinks;
  for (double b : coupling.breakpoints()) {
    kinks.push_back(b);
    if (coupling.period()) {
      double x = std::fmod(b - window, span);
      if (x < 0.0) x += span;
      kinks.push_back(x);
    } else if (b - window >= 0.0) {
      kinks.push_back(b - window);
    }
  }
  auto merged = merge_grids(grid, kinks);
  std::vector<double> mids;
  for (std::size_t k = 0; k + 1 < merged.size(); ++k) mids.push_back(0.5 * (merged[k] + merged[k + 1]));
  auto out = merge_grids(merged, mids);
  out.erase(std::remove_if(out.begin(), out.end(), [&](double x) { return x < 0.0 || x >= span; }), out.end());
  return out;
}

CertificateReport cor1_sliding_window_check(const TimeSignal& coupling, double window, double eta,
                                            std::span<const double> starts) {
  if (!(window > 0.0)) throw std::invalid_argument("cor1: window T must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("cor1: eta must be positive");
  if (starts.empty()) throw std::invalid_argument("cor1: no window starts");
  CertificateReport rep{Criterion::cor1_sliding_window};
  rep.parameters["T"] = window;
  rep.parameters["eta"] = eta;
  rep.parameters["window_starts"] = starts.size();

  const double horizon = *std::max_element(starts.begin(), starts.end()) + window;
  auto grid = hypothesis_grid(coupling, horizon);
  if (!coupling.period()) grid = merge_grids(grid, coupling.breakpoints_between(0.0, horizon));
  if (auto neg = find_negative_coupling(coupling, grid)) return negative_coupling_report(rep.criterion, *neg);

  std::optional<std::size_t> first_root;
  for (double t : starts) {
    const auto z = coupling_laplacian(coupling.integrate(t, t + window));
    const auto g = threshold_graph(z, eta);
    const auto root = spanning_tree_root(g);
    if (!root) {
      rep.verdict = Verdict::fail;
      rep.witnesses["failing_start"] = t;
      rep.witnesses["tree_roots"] = ordered_json::array();
      rep.witnesses["threshold_edges"] = g.edge_count();
      rep.witnesses["Z"] = matrix_json(z.matrix());
      return rep;
    }
    if (!first_root) first_root = *root;
  }
  rep.verdict = Verdict::pass;
  rep.witnesses["tree_root_at_first_start"] = *first_root + 1;
  rep.witnesses["scope"] = scope_label(coupling);
  return rep;
}

// ---------------------------------------------------------------------------
// Matrix-measure index for signed couplings

double xi_index(const SignedNetwork& net, double r) {
  require_radius(r);
  const std::size_t m = net.size();
  if (m < 2) throw std::invalid_argument("xi_index: need at least two nodes");
  const double cr = std::cos(r);
  auto scaled = [cr](double a) { return a > 0.0 ? a * cr : a; };
  double best = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      double v = scaled(net.weight(i, j) + net.weight(j, i));
      for (std::size_t k = 0; k < m; ++k)
        if (k != i && k != j) v += std::min(scaled(net.weight(i, k)), scaled(net.weight(j, k)));
      best = std::min(best, v);
    }
  return -best;
}

double xi_window_average(const TimeSignal& coupling, double r, double s, double t) {
  if (!(t > s)) throw std::invalid_argument("xi_window_average: empty window");
  double integral = 0.0;
  if (coupling.piecewise_constant()) {
    for (const auto& seg : coupling.segments(s, t))
      integral += xi_index(SignedNetwork(seg.value), r) * (seg.end - seg.start);
  } else {
    const double period = coupling.period().value_or(t - s);
    const auto n = static_cast<std::size_t>(std::max(200.0, std::ceil(200.0 * (t - s) / period)));
    const double h = (t - s) / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k)
      integral += xi_index(SignedNetwork(coupling.evaluate(s + (static_cast<double>(k) + 0.5) * h)), r) * h;
  }
  return integral / (t - s);
}

CertificateReport thm2_window_check(const TimeSignal& coupling, double r, double window, double eta,
                                    std::span<const double> starts) {
  require_radius(r);
  if (!(window > 0.0)) throw std::invalid_argument("thm2: window T must be positive");
  if (!(eta > 0.0)) throw std::invalid_argument("thm2: eta must be positive");
  if (starts.empty()) throw std::invalid_argument("thm2: no window starts");
  CertificateReport rep{Criterion::thm2_xi_window};
  rep.parameters["r"] = r;
  rep.parameters["T"] = window;
  rep.parameters["eta"] = eta;
  rep.parameters["window_starts"] = starts.size();

  double worst = -std::numeric_limits<double>::infinity();
  double worst_start = starts.front();
  for (double t : starts) {
    const double avg = xi_window_average(coupling, r, t, t + window);
    if (avg > -eta) {
      rep.verdict = Verdict::fail;
      rep.witnesses["failing_start"] = t;
      rep.witnesses["window_average"] = avg;
      return rep;
    }
    if (avg > worst) {
      worst = avg;
      worst_start = t;
    }
  }
  rep.verdict = Verdict::pass;
  rep.witnesses["max_window_average"] = worst;
  rep.witnesses["argmax_start"] = worst_start;
  rep.witnesses["scope"] = scope_label(coupling);
  return rep;
}

// ---------------------------------------------------------------------------
// Symmetric PSD case

LaplacianMatrix tilde_laplacian(const LaplacianMatrix& l, double r) {
  require_radius(r);
  const double cr = std::cos(r);
  Matrix out = l.matrix();
  for (std::size_t i = 0; i < out.rows(); ++i)
    for (std::size_t j = 0; j < out.cols(); ++j)
      if (i != j && out(i, j) <= 0.0) out(i, j) *= cr;
  return laplacian_from_offdiagonal(out);
}

std::vector<double> lambda2_series(const TimeSignal& coupling, double r, double h, std::size_t count) {
  if (!(h > 0.0)) throw std::invalid_argument("lambda2_series: h must be positive");
  std::vector<double> alpha;
  alpha.reserve(count);
  for (std::size_t k = 0; k < count; ++k) {
    const double s = h * static_cast<double>(k);
    const auto avg = window_average(coupling, s, s + h);
    alpha.push_back(lambda2(tilde_laplacian(coupling_laplacian(avg.value), r).matrix()));
  }
  return alpha;
}

namespace {

// Symmetric and PSD on the complement of 1 at every sample, else the location.
std::optional<ordered_json> psd_violation(const TimeSignal& coupling, double horizon) {
  for (double t : hypothesis_grid(coupling, horizon)) {
    const auto l = coupling_laplacian(coupling.evaluate(t));
    const double scale = std::max(1.0, l.matrix().max_abs());
    if (l.matrix().asymmetry() > 1e-10 * scale) {
      ordered_json w;
      w["reason"] = "coupling Laplacian is not symmetric";
      w["time"] = t;
      return w;
    }
    const double low = lambda2(l.matrix());
    if (low < -1e-9) {
      ordered_json w;
      w["reason"] = "coupling Laplacian is not positive semidefinite";
      w["time"] = t;
      w["smallest_projected_eigenvalue"] = low;
      return w;
    }
  }
  return std::nullopt;
}

std::size_t windows_to_check(const TimeSignal& coupling, double h, std::size_t count) {
  if (coupling.period()) {
    const double per = *coupling.period() / h;
    if (std::abs(per - std::round(per)) < 1e-9) return std::max(count, static_cast<std::size_t>(std::llround(per)));
  }
  return count;
}

struct SeriesReport {
  CertificateReport report;
  bool hypotheses_hold = true;
};

SeriesReport series_report(Criterion c, const TimeSignal& coupling, double r, double h, std::size_t count) {
  if (count == 0) throw std::invalid_argument("lambda2 series: need at least one window");
  CertificateReport rep{c};
  rep.parameters["r"] = r;
  rep.parameters["h"] = h;
  const std::size_t windows = windows_to_check(coupling, h, count);
  rep.parameters["windows"] = windows;
  const auto alpha = lambda2_series(coupling, r, h, windows);
  double sum = 0.0;
  for (double a : alpha) sum += a;
  rep.witnesses["alpha"] = alpha;
  rep.witnesses["partial_sum"] = sum;
  rep.witnesses["min_alpha"] = *std::min_element(alpha.begin(), alpha.end());
  if (auto bad = psd_violation(coupling, h * static_cast<double>(windows))) {
    rep.verdict = Verdict::inconclusive;
    for (auto& [k, v] : bad->items()) rep.witnesses[k] = v;
    return {std::move(rep), false};
  }
  return {std::move(rep), true};
}

}  // namespace

CertificateReport thm3_series_check(const TimeSignal& coupling, double r, double h, std::size_t count) {
  auto [rep, ok] = series_report(Criterion::thm3_lambda2_series, coupling, r, h, count);
  if (!ok) return rep;
  const bool periodic_windows = coupling.period() && rep.parameters["windows"].get<std::size_t>() ==
                                                         static_cast<std::size_t>(std::llround(*coupling.period() / h));
  const double sum = rep.witnesses["partial_sum"].get<double>();
  if (periodic_windows) {
    rep.witnesses["per_period_sum"] = sum;
    rep.witnesses["scope"] = "one period (divergence by periodicity)";
  } else {
    rep.witnesses["scope"] = "pass on horizon";
  }
  rep.verdict = sum > 0.0 ? Verdict::pass : Verdict::fail;
  return rep;
}

CertificateReport cor2_uniform_check(const TimeSignal& coupling, double r, double h, std::size_t count,
                                     double alpha_hat) {
  if (!(alpha_hat > 0.0)) throw std::invalid_argument("cor2: alpha_hat must be positive");
  auto [rep, ok] = series_report(Criterion::cor2_lambda2_uniform, coupling, r, h, count);
  rep.parameters["alpha_hat"] = alpha_hat;
  if (!ok) return rep;
  const auto& alpha = rep.witnesses["alpha"];
  for (std::size_t k = 0; k < alpha.size(); ++k)
    if (!(alpha[k].get<double>() > alpha_hat)) {
      rep.verdict = Verdict::fail;
      rep.witnesses["failing_window"] = k;
      return rep;
    }
  rep.verdict = Verdict::pass;
  rep.witnesses["scope"] = scope_label(coupling);
  return rep;
}

}  // namespace kuramoto
