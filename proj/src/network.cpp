#include "dsgp/network.hpp"

#include <algorithm>
#include <cmath>
#include <istream>
#include <ostream>
#include <sstream>

#include <Eigen/Eigenvalues>

#include "dsgp/errors.hpp"

namespace dsgp {

std::vector<std::size_t> CommGraph::neighbors(std::size_t i) const {
  std::vector<std::size_t> out;
  for (auto it = edges.lower_bound({i, 0}); it != edges.end() && it->first == i; ++it) {
    out.push_back(it->second);
  }
  return out;
}

bool CommGraph::symmetric() const {
  return std::all_of(edges.begin(), edges.end(),
                     [this](const auto& e) { return edges.count({e.second, e.first}) > 0; });
}

std::size_t CommGraph::max_degree() const {
  std::vector<std::size_t> degree(robot_count, 0);
  for (const auto& e : edges) ++degree[e.first];
  return degree.empty() ? 0 : *std::max_element(degree.begin(), degree.end());
}

CommGraph graph_from_positions(const Points& positions, double comm_range,
                               std::int64_t timestamp) {
  if (!(comm_range > 0.0)) throw ArgumentError("graph: communication range must be positive");
  CommGraph g;
  g.robot_count = static_cast<std::size_t>(positions.rows());
  g.timestamp = timestamp;
  for (Eigen::Index i = 0; i < positions.rows(); ++i) {
    for (Eigen::Index j = i + 1; j < positions.rows(); ++j) {
      const double d = (positions.row(i) - positions.row(j)).norm();
      if (d > 0.0 && d <= comm_range) {
        g.edges.insert({static_cast<std::size_t>(i), static_cast<std::size_t>(j)});
        g.edges.insert({static_cast<std::size_t>(j), static_cast<std::size_t>(i)});
      }
    }
  }
  return g;
}

AdjacencyMatrix weights_from_graph(const CommGraph& g, double edge_weight, double weight_floor) {
  if (!(edge_weight > 0.0 && edge_weight <= 1.0)) {
    throw ArgumentError("weights: edge weight must lie in (0, 1]");
  }
  const double floor = weight_floor > 0.0 ? weight_floor : edge_weight;
  const auto p = static_cast<Eigen::Index>(g.robot_count);
  AdjacencyMatrix a;
  a.weights = Eigen::MatrixXd::Zero(p, p);
  for (const auto& [i, j] : g.edges) {
    if (i == j) throw ArgumentError("weights: self-edge on robot " + std::to_string(i));
    a.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = edge_weight;
  }
  for (Eigen::Index i = 0; i < p; ++i) {
    const double off = a.weights.row(i).sum();
    const double diag = 1.0 - off;
    if (diag < floor - 1e-12) {
      std::ostringstream msg;
      msg << "weights: robot " << i << " has " << g.neighbors(static_cast<std::size_t>(i)).size()
          << " neighbors; edge weight " << edge_weight << " leaves self-weight " << diag
          << " below the floor " << floor;
      throw ArgumentError(msg.str());
    }
    a.weights(i, i) = diag;
  }
  return a;
}

StochasticityReport check_doubly_stochastic(const AdjacencyMatrix& a, double weight_floor,
                                            double tol) {
  StochasticityReport rep;
  const auto& w = a.weights;
  std::ostringstream msg;
  for (Eigen::Index i = 0; i < w.rows(); ++i) {
    const double row = w.row(i).sum();
    const double col = w.col(i).sum();
    if (std::abs(row - 1.0) > tol) msg << "row " << i << " sums to " << row << "; ";
    if (std::abs(col - 1.0) > tol) msg << "column " << i << " sums to " << col << "; ";
    if (w(i, i) < weight_floor - tol) msg << "diagonal " << i << " below floor; ";
    for (Eigen::Index j = 0; j < w.cols(); ++j) {
      if (i == j) continue;
      const double v = w(i, j);
      if (v != 0.0 && (v < weight_floor - tol || v > 1.0 + tol)) {
        msg << "entry (" << i << "," << j << ")=" << v << " outside {0} U [floor, 1]; ";
      }
    }
  }
  rep.detail = msg.str();
  rep.ok = rep.detail.empty();
  return rep;
}

bool strongly_connected(std::size_t robot_count,
                        const std::set<std::pair<std::size_t, std::size_t>>& edges) {
  if (robot_count <= 1) return true;
  std::vector<std::vector<std::size_t>> fwd(robot_count);
  std::vector<std::vector<std::size_t>> bwd(robot_count);
  for (const auto& [i, j] : edges) {
    fwd[i].push_back(j);
    bwd[j].push_back(i);
  }
  auto reaches_all = [robot_count](const std::vector<std::vector<std::size_t>>& adj) {
    std::vector<char> seen(robot_count, 0);
    std::vector<std::size_t> stack{0};
    seen[0] = 1;
    std::size_t count = 1;
    while (!stack.empty()) {
      const std::size_t u = stack.back();
      stack.pop_back();
      for (std::size_t v : adj[u]) {
        if (!seen[v]) {
          seen[v] = 1;
          ++count;
          stack.push_back(v);
        }
      }
    }
    return count == robot_count;
  };
  return reaches_all(fwd) && reaches_all(bwd);
}

bool check_periodic_connectivity(std::span<const CommGraph> graphs, int period) {
  if (period < 1) throw ArgumentError("connectivity: period must be >= 1");
  const auto b = static_cast<std::size_t>(period);
  if (graphs.size() < b) throw ArgumentError("connectivity: fewer graphs than the period");
  const std::size_t p = graphs.front().robot_count;
  for (std::size_t start = 0; start + b <= graphs.size(); ++start) {
    std::set<std::pair<std::size_t, std::size_t>> merged;
    for (std::size_t k = start; k < start + b; ++k) {
      merged.insert(graphs[k].edges.begin(), graphs[k].edges.end());
    }
    if (!strongly_connected(p, merged)) return false;
  }
  return true;
}

double disagreement_contraction(const AdjacencyMatrix& a) {
  const Eigen::Index p = a.weights.rows();
  if (p <= 1) return 0.0;
  const Eigen::MatrixXd proj =
      Eigen::MatrixXd::Identity(p, p) - Eigen::MatrixXd::Constant(p, p, 1.0 / p);
  const Eigen::MatrixXd m = proj * a.weights.transpose() * a.weights * proj;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> eig(0.5 * (m + m.transpose()));
  return eig.eigenvalues().maxCoeff();
}

std::string format_graph_trace_line(const CommGraph& g) {
  std::ostringstream out;
  out << g.timestamp;
  for (const auto& [i, j] : g.edges) out << ' ' << i << '-' << j;
  return out.str();
}

CommGraph parse_graph_trace_line(const std::string& line, std::size_t robot_count) {
  std::istringstream in(line);
  CommGraph g;
  g.robot_count = robot_count;
  if (!(in >> g.timestamp)) throw ArgumentError("graph trace: missing round in '" + line + "'");
  std::string token;
  while (in >> token) {
    const auto dash = token.find('-');
    if (dash == std::string::npos) throw ArgumentError("graph trace: bad edge '" + token + "'");
    const std::size_t i = std::stoul(token.substr(0, dash));
    const std::size_t j = std::stoul(token.substr(dash + 1));
    if (i >= robot_count || j >= robot_count) {
      throw ArgumentError("graph trace: edge '" + token + "' names an unknown robot");
    }
    g.edges.insert({i, j});
  }
  return g;
}

void write_graph_trace(std::ostream& out, std::span<const CommGraph> graphs) {
  for (const auto& g : graphs) out << format_graph_trace_line(g) << '\n';
}

std::vector<CommGraph> read_graph_trace(std::istream& in, std::size_t robot_count) {
  std::vector<CommGraph> graphs;
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    graphs.push_back(parse_graph_trace_line(line, robot_count));
  }
  return graphs;
}

}  // namespace dsgp
