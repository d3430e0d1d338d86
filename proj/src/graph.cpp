#include "kuramoto/graph.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <stdexcept>
#include <string>

namespace kuramoto {

SignedNetwork::SignedNetwork(Matrix adjacency) : adjacency_(std::move(adjacency)) {
  if (!adjacency_.square()) throw std::invalid_argument("SignedNetwork: adjacency must be square");
  for (std::size_t i = 0; i < adjacency_.rows(); ++i)
    if (adjacency_(i, i) != 0.0)
      throw std::invalid_argument("SignedNetwork: self-link at node " + std::to_string(i + 1));
}

LaplacianMatrix::LaplacianMatrix(Matrix values) : values_(std::move(values)) {
  if (!values_.square()) throw std::invalid_argument("LaplacianMatrix: matrix must be square");
  const double scale = std::max(1.0, values_.max_abs());
  const auto sums = values_.row_sums();
  for (std::size_t i = 0; i < sums.size(); ++i)
    if (std::abs(sums[i]) > kRowSumTolerance * scale * static_cast<double>(values_.cols()))
      throw std::invalid_argument("LaplacianMatrix: row " + std::to_string(i + 1) +
                                  " does not sum to zero");
}

LaplacianMatrix laplacian_from_offdiagonal(const Matrix& m) {
  if (!m.square()) throw std::invalid_argument("laplacian_from_offdiagonal: matrix must be square");
  Matrix l = m;
  for (std::size_t i = 0; i < l.rows(); ++i) {
    double s = 0.0;
    for (std::size_t j = 0; j < l.cols(); ++j)
      if (j != i) s += l(i, j);
    l(i, i) = -s;
  }
  return LaplacianMatrix(std::move(l));
}

std::size_t ThresholdGraph::edge_count() const {
  return static_cast<std::size_t>(std::count(edges_.begin(), edges_.end(), 1));
}

LaplacianMatrix laplacian_from_adjacency(const SignedNetwork& net) {
  const std::size_t m = net.size();
  Matrix l(m, m);
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j)
      if (i != j) l(i, j) = -net.weight(i, j);
  return laplacian_from_offdiagonal(l);
}

ThresholdGraph threshold_graph(const LaplacianMatrix& l, double eta) {
  if (!(eta > 0.0)) throw std::invalid_argument("threshold_graph: eta must be positive");
  ThresholdGraph g(l.size());
  for (std::size_t i = 0; i < l.size(); ++i)
    for (std::size_t j = 0; j < l.size(); ++j)
      if (i != j && l(i, j) < -eta) g.set_edge(i, j);
  return g;
}

std::optional<std::size_t> spanning_tree_root(const ThresholdGraph& g) {
  const std::size_t m = g.size();
  if (m == 0) return std::nullopt;
  std::vector<unsigned char> seen(m);
  std::vector<std::size_t> stack;
  for (std::size_t root = 0; root < m; ++root) {
    std::fill(seen.begin(), seen.end(), 0);
    seen[root] = 1;
    stack.assign(1, root);
    std::size_t reached = 1;
    while (!stack.empty()) {
      const std::size_t j = stack.back();
      stack.pop_back();
      for (std::size_t i = 0; i < m; ++i)
        if (!seen[i] && g.has_edge(i, j)) {
          seen[i] = 1;
          ++reached;
          stack.push_back(i);
        }
    }
    if (reached == m) return root;
  }
  return std::nullopt;
}

std::vector<std::size_t> common_positive_neighbors(const SignedNetwork& net, std::size_t i,
                                                   std::size_t j) {
  if (i == j) throw std::invalid_argument("common_positive_neighbors: i and j must differ");
  if (i >= net.size() || j >= net.size())
    throw std::out_of_range("common_positive_neighbors: node index out of range");
  std::vector<std::size_t> out;
  for (std::size_t k = 0; k < net.size(); ++k)
    if (net.weight(i, k) > 0.0 && net.weight(j, k) > 0.0) out.push_back(k);
  return out;
}

ErgodicQuantities ergodic_quantities(const SignedNetwork& net) {
  const std::size_t m = net.size();
  ErgodicQuantities q;
  if (m < 2) return q;
  double mu0 = std::numeric_limits<double>::infinity();
  double mu1 = -std::numeric_limits<double>::infinity();
  double mu2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < m; ++i)
    for (std::size_t j = 0; j < m; ++j) {
      if (i == j) continue;
      double common = 0.0;
      double penalty = 0.0;
      for (std::size_t k = 0; k < m; ++k) {
        if (k == i || k == j) continue;
        const double aik = net.weight(i, k);
        const double ajk = net.weight(j, k);
        if (aik > 0.0 && ajk > 0.0)
          common += std::min(aik, ajk);
        else
          penalty += -std::min(aik, 0.0) - std::min(ajk, 0.0);
      }
      mu0 = std::min(mu0, common);
      mu1 = std::max(mu1, penalty);
      mu2 = std::min(mu2, net.weight(i, j) + net.weight(j, i));
    }
  q.mu0 = mu0;
  q.mu1 = mu1;
  q.mu2 = mu2;
  return q;
}

ErgodicQuantities ergodic_quantities(const TimeSignal& coupling, std::span<const double> grid) {
  if (grid.empty()) throw std::invalid_argument("ergodic_quantities: empty sampling grid");
  ErgodicQuantities best{-std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity(),
                         -std::numeric_limits<double>::infinity()};
  for (double t : grid) {
    const auto q = ergodic_quantities(SignedNetwork(coupling.evaluate(t)));
    best.mu0 = std::max(best.mu0, q.mu0);
    best.mu1 = std::max(best.mu1, q.mu1);
    best.mu2 = std::max(best.mu2, q.mu2);
  }
  return best;
}

bool is_connected_undirected(const Matrix& adjacency) {
  const std::size_t m = adjacency.rows();
  if (m == 0) return false;
  std::vector<unsigned char> seen(m, 0);
  std::vector<std::size_t> stack{0};
  seen[0] = 1;
  std::size_t reached = 1;
  while (!stack.empty()) {
    const std::size_t u = stack.back();
    stack.pop_back();
    for (std::size_t v = 0; v < m; ++v)
      if (!seen[v] && (adjacency(u, v) != 0.0 || adjacency(v, u) != 0.0)) {
        seen[v] = 1;
        ++reached;
        stack.push_back(v);
      }
  }
  return reached == m;
}

Matrix coupling_from_negated_laplacian(const Matrix& printed) {
  if (!printed.square())
    throw std::invalid_argument("coupling_from_negated_laplacian: matrix must be square");
  Matrix a = printed;
  for (std::size_t i = 0; i < a.rows(); ++i) a(i, i) = 0.0;
  return a;
}

Matrix read_adjacency_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open adjacency file " + path.string());
  std::vector<std::vector<double>> rows;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty() || line[0] == '#') continue;
    std::vector<double> row;
    std::stringstream ss(line);
    std::string cell;
    while (std::getline(ss, cell, ',')) {
      try {
        row.push_back(std::stod(cell));
      } catch (const std::exception&) {
        throw std::invalid_argument("adjacency CSV: bad number '" + cell + "' on row " +
                                    std::to_string(rows.size() + 1));
      }
    }
    rows.push_back(std::move(row));
  }
  const std::size_t m = rows.size();
  Matrix a(m, m);
  for (std::size_t i = 0; i < m; ++i) {
    if (rows[i].size() != m)
      throw std::invalid_argument("adjacency CSV: row " + std::to_string(i + 1) + " has " +
                                  std::to_string(rows[i].size()) + " entries, expected " +
                                  std::to_string(m));
    for (std::size_t j = 0; j < m; ++j) a(i, j) = rows[i][j];
  }
  return a;
}

}  // namespace kuramoto
