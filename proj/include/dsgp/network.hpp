#pragma once

#include <cstddef>
#include <cstdint>
#include <iosfwd>
#include <set>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include <Eigen/Core>

#include "dsgp/kernel.hpp"

namespace dsgp {

/// Directed communication graph; (i, j) means i talks to j. No self-edges.
struct CommGraph {
  std::size_t robot_count = 0;
  std::set<std::pair<std::size_t, std::size_t>> edges;
  std::int64_t timestamp = 0;

  std::vector<std::size_t> neighbors(std::size_t i) const;
  bool symmetric() const;
  std::size_t max_degree() const;
};

struct AdjacencyMatrix {
  Eigen::MatrixXd weights;
};

/// Edge (i, j) iff 0 < |x_i - x_j| <= comm_range. Positions one per row.
CommGraph graph_from_positions(const Points& positions, double comm_range,
                               std::int64_t timestamp = 0);

/// Uniform off-diagonal weight on edges, diagonal completing each row to 1.
/// weight_floor <= 0 defaults to edge_weight.
AdjacencyMatrix weights_from_graph(const CommGraph& g, double edge_weight,
                                   double weight_floor = 0.0);

struct StochasticityReport {
  bool ok = true;
  std::string detail;
};

/// Row and column sums equal to 1, diagonal >= floor, off-diagonals in {0} or [floor, 1].
StochasticityReport check_doubly_stochastic(const AdjacencyMatrix& a, double weight_floor,
                                            double tol = 1e-12);

bool strongly_connected(std::size_t robot_count,
                        const std::set<std::pair<std::size_t, std::size_t>>& edges);

/// Every window of `period` consecutive graphs has a strongly connected union.
bool check_periodic_connectivity(std::span<const CommGraph> graphs, int period);

/// Largest eigenvalue of A^T A restricted to the subspace orthogonal to the ones vector.
double disagreement_contraction(const AdjacencyMatrix& a);

/// One line per graph: "<round>" followed by " i-j" for each edge.
std::string format_graph_trace_line(const CommGraph& g);
CommGraph parse_graph_trace_line(const std::string& line, std::size_t robot_count);
void write_graph_trace(std::ostream& out, std::span<const CommGraph> graphs);
std::vector<CommGraph> read_graph_trace(std::istream& in, std::size_t robot_count);

}  // namespace dsgp
