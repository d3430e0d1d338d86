#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <span>
#include <vector>

#include "kuramoto/matrix.hpp"
#include "kuramoto/signals.hpp"

namespace kuramoto {

/// Directed, weighted, signed coupling graph. a_ij is the weight of the link
/// j -> i (node j influences node i). Self-links are not allowed.
class SignedNetwork {
 public:
  explicit SignedNetwork(Matrix adjacency);

  std::size_t size() const { return adjacency_.rows(); }
  double weight(std::size_t i, std::size_t j) const { return adjacency_(i, j); }
  const Matrix& adjacency() const { return adjacency_; }
  bool has_link(std::size_t i, std::size_t j) const { return adjacency_(i, j) != 0.0; }

 private:
  Matrix adjacency_;
};

/// Square matrix with zero row sums.
class LaplacianMatrix {
 public:
  static constexpr double kRowSumTolerance = 1e-12;

  /// Validates zero row sums to kRowSumTolerance relative to the largest entry.
  explicit LaplacianMatrix(Matrix values);

  std::size_t size() const { return values_.rows(); }
  double operator()(std::size_t i, std::size_t j) const { return values_(i, j); }
  const Matrix& matrix() const { return values_; }

 private:
  Matrix values_;
};

/// Rebuilds the diagonal so that every row sums to zero.
LaplacianMatrix laplacian_from_offdiagonal(const Matrix& m);

class ThresholdGraph {
 public:
  explicit ThresholdGraph(std::size_t nodes) : nodes_(nodes), edges_(nodes * nodes, 0) {}

  std::size_t size() const { return nodes_; }
  /// Edge (i, j): j influences i.
  bool has_edge(std::size_t i, std::size_t j) const { return edges_[i * nodes_ + j] != 0; }
  void set_edge(std::size_t i, std::size_t j, bool present = true) {
    edges_[i * nodes_ + j] = present ? 1 : 0;
  }
  std::size_t edge_count() const;

 private:
  std::size_t nodes_;
  std::vector<unsigned char> edges_;
};

LaplacianMatrix laplacian_from_adjacency(const SignedNetwork& net);
/// Edge (i, j), i != j, iff l_ij < -eta (strict).
ThresholdGraph threshold_graph(const LaplacianMatrix& l, double eta);

/// A node from which every node is reachable along influence edges, if any.
std::optional<std::size_t> spanning_tree_root(const ThresholdGraph& g);
inline bool has_spanning_tree(const ThresholdGraph& g) { return spanning_tree_root(g).has_value(); }

/// {k : a_ik > 0 and a_jk > 0}. Since a_ii = a_jj = 0 the set never contains
/// i or j.
std::vector<std::size_t> common_positive_neighbors(const SignedNetwork& net, std::size_t i,
                                                   std::size_t j);

struct ErgodicQuantities {
  double mu0 = 0.0;  // ergodic coefficient of the positive part
  double mu1 = 0.0;  // negative-weight penalty outside the common neighborhood
  double mu2 = 0.0;  // weakest mutual coupling a_ij + a_ji
};

/// The three quantities at a single instant (pairs are i != j).
ErgodicQuantities ergodic_quantities(const SignedNetwork& net);
/// Grid maximum of the instantaneous quantities; exact for piecewise-constant
/// couplings when the grid contains every breakpoint.
ErgodicQuantities ergodic_quantities(const TimeSignal& coupling, std::span<const double> grid);

/// Undirected connectivity of the support of a (symmetric) adjacency matrix.
bool is_connected_undirected(const Matrix& adjacency);

/// Off-diagonal part of a printed coupling-side matrix (negative diagonal,
/// zero row sums): a_ij is the printed off-diagonal entry.
Matrix coupling_from_negated_laplacian(const Matrix& printed);

/// Reads a comma-separated square adjacency matrix, one row per line.
Matrix read_adjacency_csv(const std::filesystem::path& path);

}  // namespace kuramoto
