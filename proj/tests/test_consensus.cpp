#include <cmath>
#include <random>
#include <vector>

#include <gtest/gtest.h>

#include "dsgp/consensus.hpp"
#include "dsgp/errors.hpp"
#include "dsgp/network.hpp"

namespace dsgp {
namespace {

GaussianMap make_map(std::vector<double> mean, std::vector<double> var) {
  GaussianMap m;
  m.mean = Eigen::Map<Eigen::VectorXd>(mean.data(), static_cast<Eigen::Index>(mean.size()));
  m.variance = Eigen::Map<Eigen::VectorXd>(var.data(), static_cast<Eigen::Index>(var.size()));
  m.grid = Points::Zero(m.mean.size(), 1);
  return m;
}

GaussianMap random_map(std::mt19937_64& gen, Eigen::Index n) {
  std::uniform_real_distribution<double> mu(-2.0, 3.0);
  std::uniform_real_distribution<double> var(0.05, 1.0);
  GaussianMap m;
  m.grid = Points::Zero(n, 1);
  m.mean.resize(n);
  m.variance.resize(n);
  for (Eigen::Index i = 0; i < n; ++i) {
    m.mean[i] = mu(gen);
    m.variance[i] = var(gen);
  }
  return m;
}

/// Runs `steps` synchronous rounds on a static graph with static references.
std::vector<ConsensusState> iterate(const std::vector<ReferenceInput>& refs, const CommGraph& g,
                                    const AdjacencyMatrix& a, int steps) {
  std::vector<ConsensusState> states;
  for (const auto& r : refs) states.push_back(ConsensusState::initialize(r));
  for (int t = 0; t < steps; ++t) {
    const auto snapshot = states;
    for (std::size_t i = 0; i < states.size(); ++i) {
      std::vector<const ConsensusState*> nb;
      std::vector<double> w;
      for (std::size_t j : g.neighbors(i)) {
        nb.push_back(&snapshot[j]);
        w.push_back(a.weights(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)));
      }
      states[i] = consensus_step(snapshot[i], nb, w, refs[i]);
    }
  }
  return states;
}

CommGraph ring(std::size_t p) {
  CommGraph g;
  g.robot_count = p;
  for (std::size_t i = 0; i < p; ++i) {
    g.edges.insert({i, (i + 1) % p});
    g.edges.insert({(i + 1) % p, i});
  }
  return g;
}

TEST(ReferenceInput, ScalarArithmetic) {
  const auto r = reference_input(make_map({2.0}, {1.0}), 0.1);
  EXPECT_NEAR(r.mean_term[0], 2.0 / 1.1, 1e-15);
  EXPECT_NEAR(r.precision_term[0], 1.0 / 1.1, 1e-15);
}

TEST(ReferenceInput, ZeroMeanGivesZeroMeanTerm) {
  const auto r = reference_input(make_map({0.0, 0.0}, {0.5, 0.2}), 0.1);
  EXPECT_EQ(r.mean_term.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_NEAR(r.precision_term[1], 1.0 / 0.3, 1e-14);
  EXPECT_THROW(reference_input(make_map({0.0}, {0.5}), 0.0), ArgumentError);
}

TEST(ReferenceInput, RecoverIsInversePair) {
  std::mt19937_64 gen(3);
  const auto m = random_map(gen, 30);
  const auto d = recover_map(ConsensusState::initialize(reference_input(m, 0.1)), m.grid);
  EXPECT_LT((d.map.mean - m.mean).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_LT((d.map.variance - (m.variance.array() + 0.1).matrix()).cwiseAbs().maxCoeff(), 1e-14);
  EXPECT_EQ(d.transient_count, 0u);
}

TEST(ConsensusStep, NoNeighborsConstantReferenceIsFixedPoint) {
  const auto r = reference_input(make_map({1.0, -1.0}, {0.3, 0.4}), 0.1);
  const auto s = ConsensusState::initialize(r);
  const auto next = consensus_step(s, {}, {}, r);
  EXPECT_EQ((next.xi_mean_term - s.xi_mean_term).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ((next.xi_precision_term - s.xi_precision_term).cwiseAbs().maxCoeff(), 0.0);
}

TEST(ConsensusStep, ReferenceChangeIsAddedOnce) {
  const auto r0 = reference_input(make_map({1.0}, {0.3}), 0.1);
  const auto r1 = reference_input(make_map({2.0}, {0.2}), 0.1);
  auto s = ConsensusState::initialize(r0);
  s = consensus_step(s, {}, {}, r1);
  EXPECT_NEAR(s.xi_mean_term[0], r1.mean_term[0], 1e-15);
  s = consensus_step(s, {}, {}, r1);
  EXPECT_NEAR(s.xi_mean_term[0], r1.mean_term[0], 1e-15);
}

TEST(ConsensusStep, TwoNodeAveraging) {
  const std::vector<ReferenceInput> refs{reference_input(make_map({1.0, 3.0}, {0.2, 0.9}), 0.1),
                                         reference_input(make_map({-2.0, 0.5}, {0.7, 0.1}), 0.1)};
  CommGraph g;
  g.robot_count = 2;
  g.edges = {{0, 1}, {1, 0}};
  AdjacencyMatrix a{Eigen::Matrix2d::Constant(0.5)};
  const auto states = iterate(refs, g, a, 60);
  const Eigen::VectorXd avg = 0.5 * (refs[0].mean_term + refs[1].mean_term);
  const Eigen::VectorXd avg_p = 0.5 * (refs[0].precision_term + refs[1].precision_term);
  for (const auto& s : states) {
    EXPECT_LT((s.xi_mean_term - avg).cwiseAbs().maxCoeff(), 1e-12);
    EXPECT_LT((s.xi_precision_term - avg_p).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ConsensusStep, RingConservesSum) {
  std::mt19937_64 gen(5);
  const auto g = ring(5);
  const auto a = weights_from_graph(g, 0.1);
  std::vector<ReferenceInput> refs;
  for (int i = 0; i < 5; ++i) refs.push_back(reference_input(random_map(gen, 12), 0.1));
  Eigen::VectorXd ref_sum = Eigen::VectorXd::Zero(12);
  for (const auto& r : refs) ref_sum += r.mean_term;
  for (int steps : {1, 7, 40}) {
    const auto states = iterate(refs, g, a, steps);
    Eigen::VectorXd sum = Eigen::VectorXd::Zero(12);
    for (const auto& s : states) sum += s.xi_mean_term;
    EXPECT_LT((sum - ref_sum).cwiseAbs().maxCoeff(), 1e-12);
  }
}

TEST(ConsensusStep, RejectsInvalidInputs) {
  const auto r = reference_input(make_map({1.0}, {0.3}), 0.1);
  const auto s = ConsensusState::initialize(r);
  const ConsensusState* nb[] = {&s};
  const double neg[] = {-0.1};
  const double big[] = {1.5};
  EXPECT_THROW(consensus_step(s, nb, neg, r), ArgumentError);
  EXPECT_THROW(consensus_step(s, nb, big, r), ArgumentError);
  EXPECT_THROW(consensus_step(s, nb, {}, r), ArgumentError);
  const auto other = reference_input(make_map({1.0, 2.0}, {0.3, 0.3}), 0.1);
  EXPECT_THROW(consensus_step(s, {}, {}, other), ArgumentError);
}

TEST(RecoverMap, ClampsAndFlagsNonPositivePrecision) {
  ConsensusState s = ConsensusState::initialize(reference_input(make_map({1.0, 2.0}, {0.3, 0.3}), 0.1));
  s.xi_precision_term[1] = 0.0;
  const auto d = recover_map(s, Points::Zero(2, 1));
  EXPECT_EQ(d.transient_count, 1u);
  EXPECT_EQ(d.transient[0], 0);
  EXPECT_EQ(d.transient[1], 1);
  EXPECT_DOUBLE_EQ(d.map.variance[1], 1.0 / kPrecisionFloor);
}

TEST(CentralizedPoe, IdenticalExpertsKeepMean) {
  const auto m = make_map({1.0, -0.5}, {0.2, 0.6});
  const std::vector<GaussianMap> maps{m, m, m};
  const auto poe = centralized_poe(maps, 0.1);
  EXPECT_LT((poe.mean - m.mean).cwiseAbs().maxCoeff(), 1e-15);
  EXPECT_LT((poe.variance - (m.variance.array() + 0.1).matrix()).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(CentralizedPoe, VeryUncertainExpertIsIgnored) {
  const std::vector<GaussianMap> maps{make_map({1.0}, {0.2}), make_map({50.0}, {1e12})};
  EXPECT_NEAR(centralized_poe(maps, 0.1).mean[0], 1.0, 1e-9);
  EXPECT_THROW(centralized_poe(std::vector<GaussianMap>{}, 0.1), ArgumentError);
}

TEST(CentralizedPoe, IsTheConsensusLimit) {
  std::mt19937_64 gen(17);
  std::vector<GaussianMap> maps;
  std::vector<ReferenceInput> refs;
  for (int i = 0; i < 3; ++i) {
    maps.push_back(random_map(gen, 20));
    refs.push_back(reference_input(maps.back(), 0.1));
  }
  CommGraph g;
  g.robot_count = 3;
  g.edges = {{0, 1}, {1, 0}, {1, 2}, {2, 1}};
  const auto states = iterate(refs, g, weights_from_graph(g, 0.1), 10000);
  const auto poe = centralized_poe(maps, 0.1);
  for (const auto& s : states) {
    const auto d = recover_map(s, maps[0].grid);
    EXPECT_LT((d.map.mean - poe.mean).cwiseAbs().maxCoeff(), 1e-9);
    EXPECT_LT((d.map.variance - poe.variance).cwiseAbs().maxCoeff(), 1e-9);
  }
}

TEST(CentralizedPoe, MeanIsConvexCombination) {
  std::mt19937_64 gen(23);
  for (int trial = 0; trial < 20; ++trial) {
    std::vector<GaussianMap> maps;
    for (int i = 0; i < 4; ++i) maps.push_back(random_map(gen, 15));
    const auto poe = centralized_poe(maps, 0.1);
    for (Eigen::Index j = 0; j < 15; ++j) {
      double lo = maps[0].mean[j];
      double hi = lo;
      for (const auto& m : maps) {
        lo = std::min(lo, m.mean[j]);
        hi = std::max(hi, m.mean[j]);
      }
      EXPECT_GE(poe.mean[j], lo - 1e-12);
      EXPECT_LE(poe.mean[j], hi + 1e-12);
    }
  }
}

KernelSpec unit_kernel() {
  KernelSpec k;
  k.signal_variance = 1.0;
  k.noise_variance = 0.1;
  return k;
}

TEST(BoundConstants, HandEvaluatedEta) {
  ConsensusParams p{0.1, 1, 0.5, 2};
  const auto c = error_bound_constants(unit_kernel(), p, 1.0, 1.0);
  EXPECT_EQ(c.eta, 16.0);
}

TEST(BoundConstants, UnitPriorParameters) {
  ConsensusParams p{0.1, 1, 0.5, 2};
  const auto c = error_bound_constants(unit_kernel(), p, 1.0, 1.0);
  EXPECT_NEAR(c.delta2_hat, 1.0 / (0.1 * 1.1), 1e-12);
  EXPECT_NEAR(c.delta2_hat, 9.0909090909, 1e-9);
  EXPECT_NEAR(c.delta1_hat, 19.09090909090909, 1e-12);
  EXPECT_NEAR(c.alpha, 2.085661080074488, 1e-12);
  EXPECT_NEAR(c.beta, 1.0069225928256764, 1e-12);
  EXPECT_NEAR(c.sigma_n_min, 14.545454545454545, 1e-12);
  EXPECT_FALSE(c.correction_rule_met(p));
  p.correction_variance = 15.0;
  EXPECT_TRUE(error_bound_constants(unit_kernel(), p, 1.0, 1.0).correction_rule_met(p));
}

TEST(BoundConstants, BetaVanishesWithSmallEtaDelta) {
  // A single robot gives eta = 0, so the bound collapses to alpha = 0.
  ConsensusParams p{0.1, 1, 0.5, 1};
  const auto c = error_bound_constants(unit_kernel(), p, 1.0, 1.0);
  EXPECT_EQ(c.eta, 0.0);
  EXPECT_EQ(c.beta, 0.0);
  EXPECT_EQ(c.alpha, 0.0);
}

TEST(BoundConstants, MonotoneInRobotsPeriodAndFloor) {
  const auto k = unit_kernel();
  auto eval = [&](int p, int b, double phi) {
    return error_bound_constants(k, ConsensusParams{0.1, b, phi, p}, 1.0, 1.0);
  };
  for (int p = 2; p < 6; ++p) {
    EXPECT_LE(eval(p, 1, 0.3).alpha, eval(p + 1, 1, 0.3).alpha);
    EXPECT_LE(eval(p, 1, 0.3).sigma_n_min, eval(p + 1, 1, 0.3).sigma_n_min);
  }
  for (int b = 1; b < 4; ++b) {
    EXPECT_LE(eval(3, b, 0.3).sigma_n_min, eval(3, b + 1, 0.3).sigma_n_min);
    EXPECT_LE(eval(3, b, 0.3).alpha, eval(3, b + 1, 0.3).alpha);
  }
  for (double phi : {0.1, 0.2, 0.4, 0.8}) {
    EXPECT_GE(eval(3, 1, phi).sigma_n_min, eval(3, 1, phi * 1.2).sigma_n_min);
    EXPECT_GE(eval(3, 1, phi).alpha, eval(3, 1, phi * 1.2).alpha);
  }
}

TEST(BoundConstants, RejectsBadArguments) {
  const auto k = unit_kernel();
  EXPECT_THROW(error_bound_constants(k, ConsensusParams{0.1, 1, 0.0, 2}, 1, 1), ArgumentError);
  EXPECT_THROW(error_bound_constants(k, ConsensusParams{0.1, 1, 1.5, 2}, 1, 1), ArgumentError);
  EXPECT_THROW(error_bound_constants(k, ConsensusParams{0.1, 1, 0.5, 2}, 0, 1), ArgumentError);
}

TEST(ObservationBound, SafetyFactor) {
  const std::vector<double> v{0.5, -2.0, 1.0};
  EXPECT_DOUBLE_EQ(estimate_observation_bound(v), 3.0);
}

TEST(CheckBound, ZeroErrorPasses) {
  const auto m = make_map({1.0, -3.0}, {0.1, 0.1});
  const auto rep = check_bound(m, m, BoundConstants{});
  EXPECT_TRUE(rep.all_pass());
  EXPECT_EQ(rep.max_error, 0.0);
}

TEST(CheckBound, ZeroBoundRejectsMismatch) {
  const auto rep = check_bound(make_map({1.0}, {0.1}), make_map({1.1}, {0.1}), BoundConstants{});
  EXPECT_EQ(rep.failures, 1u);
  EXPECT_NEAR(rep.max_violation, 0.1, 1e-12);
}

TEST(CheckBound, SignedFormDiffersForNegativeMeans) {
  BoundConstants b;
  b.alpha = 0.1;
  b.beta = 0.5;
  const auto rep = check_bound(make_map({-1.5}, {0.1}), make_map({-1.0}, {0.1}), b);
  EXPECT_TRUE(rep.all_pass());          // 0.5 <= 0.1 + 0.5 * 1
  EXPECT_EQ(rep.failures_signed, 1u);   // 0.5 >  0.1 - 0.5
}

}  // namespace
}  // namespace dsgp
