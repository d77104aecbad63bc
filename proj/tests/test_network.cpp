#include <sstream>
#include <vector>

#include <gtest/gtest.h>

#include "dsgp/errors.hpp"
#include "dsgp/network.hpp"

namespace dsgp {
namespace {

CommGraph complete(std::size_t p) {
  CommGraph g;
  g.robot_count = p;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j)
      if (i != j) g.edges.insert({i, j});
  return g;
}

CommGraph with_edges(std::size_t p, std::vector<std::pair<std::size_t, std::size_t>> undirected,
                     std::int64_t t = 0) {
  CommGraph g;
  g.robot_count = p;
  g.timestamp = t;
  for (auto [i, j] : undirected) {
    g.edges.insert({i, j});
    g.edges.insert({j, i});
  }
  return g;
}

TEST(Graph, FromPositionsUsesRange) {
  Points x(4, 2);
  x << 0.0, 0.0,
       1.0, 0.0,
       2.5, 0.0,
       0.0, 0.0;  // coincident with robot 0: distance zero is not an edge
  const auto g = graph_from_positions(x, 1.5, 7);
  EXPECT_EQ(g.timestamp, 7);
  EXPECT_TRUE(g.symmetric());
  EXPECT_EQ(g.edges, (std::set<std::pair<std::size_t, std::size_t>>{
                         {0, 1}, {1, 0}, {1, 2}, {2, 1}, {1, 3}, {3, 1}}));
  EXPECT_EQ(g.neighbors(1), (std::vector<std::size_t>{0, 2, 3}));
  EXPECT_EQ(g.max_degree(), 3u);
  EXPECT_TRUE(graph_from_positions(x, 0.5).edges.empty());
  EXPECT_THROW(graph_from_positions(x, 0.0), ArgumentError);
}

TEST(Weights, TwoRobots) {
  const auto a = weights_from_graph(complete(2), 0.1);
  Eigen::Matrix2d expected;
  expected << 0.9, 0.1, 0.1, 0.9;
  EXPECT_LT((a.weights - expected).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_TRUE(check_doubly_stochastic(a, 0.1).ok);
}

TEST(Weights, FiveRobotComplete) {
  const auto a = weights_from_graph(complete(5), 0.1);
  for (Eigen::Index i = 0; i < 5; ++i) EXPECT_NEAR(a.weights(i, i), 0.6, 1e-15);
  EXPECT_TRUE(check_doubly_stochastic(a, 0.1).ok);
}

TEST(Weights, EmptyGraphIsIdentity) {
  CommGraph g;
  g.robot_count = 3;
  const auto a = weights_from_graph(g, 0.1);
  EXPECT_EQ(a.weights, Eigen::MatrixXd::Identity(3, 3));
}

TEST(Weights, TooManyNeighborsNamesRobot) {
  try {
    weights_from_graph(complete(4), 0.3);
    FAIL() << "expected an error";
  } catch (const ArgumentError& e) {
    EXPECT_NE(std::string(e.what()).find("robot 0"), std::string::npos);
  }
  EXPECT_THROW(weights_from_graph(complete(2), 0.0), ArgumentError);
}

TEST(Weights, StochasticityCheckFlagsBadMatrices) {
  AdjacencyMatrix a{Eigen::Matrix2d::Identity()};
  a.weights(0, 1) = 0.2;
  const auto rep = check_doubly_stochastic(a, 0.1);
  EXPECT_FALSE(rep.ok);
  EXPECT_NE(rep.detail.find("row 0"), std::string::npos);

  AdjacencyMatrix small{Eigen::Matrix2d::Constant(0.5)};
  small.weights << 0.95, 0.05, 0.05, 0.95;
  EXPECT_FALSE(check_doubly_stochastic(small, 0.1).ok);
}

TEST(Connectivity, AlternatingHalves) {
  // Round 0 links {0,1}, round 1 links {1,2}: each graph alone is disconnected.
  std::vector<CommGraph> graphs;
  for (int t = 0; t < 6; ++t) {
    graphs.push_back(t % 2 == 0 ? with_edges(3, {{0, 1}}, t) : with_edges(3, {{1, 2}}, t));
  }
  EXPECT_TRUE(check_periodic_connectivity(graphs, 2));
  EXPECT_FALSE(check_periodic_connectivity(graphs, 1));
  EXPECT_THROW(check_periodic_connectivity(graphs, 0), ArgumentError);
  EXPECT_THROW(check_periodic_connectivity(std::span(graphs).first(1), 2), ArgumentError);
}

TEST(Connectivity, StrongConnectivityNeedsBothDirections) {
  EXPECT_TRUE(strongly_connected(1, {}));
  EXPECT_FALSE(strongly_connected(2, {{0, 1}}));
  EXPECT_TRUE(strongly_connected(2, {{0, 1}, {1, 0}}));
  EXPECT_TRUE(strongly_connected(3, {{0, 1}, {1, 2}, {2, 0}}));
}

TEST(Contraction, ConnectedGraphContracts) {
  const auto ring = with_edges(5, {{0, 1}, {1, 2}, {2, 3}, {3, 4}, {4, 0}});
  const double rho = disagreement_contraction(weights_from_graph(ring, 0.1));
  EXPECT_GT(rho, 0.0);
  EXPECT_LT(rho, 1.0);
  CommGraph empty;
  empty.robot_count = 3;
  EXPECT_NEAR(disagreement_contraction(weights_from_graph(empty, 0.1)), 1.0, 1e-12);
}

TEST(Trace, RoundTrip) {
  const std::vector<CommGraph> graphs{with_edges(3, {{0, 1}}, 0), with_edges(3, {}, 1),
                                      with_edges(3, {{0, 2}, {1, 2}}, 2)};
  std::stringstream io;
  write_graph_trace(io, graphs);
  EXPECT_EQ(format_graph_trace_line(graphs[0]), "0 0-1 1-0");
  const auto back = read_graph_trace(io, 3);
  ASSERT_EQ(back.size(), graphs.size());
  for (std::size_t k = 0; k < graphs.size(); ++k) {
    EXPECT_EQ(back[k].edges, graphs[k].edges);
    EXPECT_EQ(back[k].timestamp, graphs[k].timestamp);
  }
  EXPECT_THROW(parse_graph_trace_line("0 0-5", 3), ArgumentError);
  EXPECT_THROW(parse_graph_trace_line("0 01", 3), ArgumentError);
}

}  // namespace
}  // namespace dsgp
