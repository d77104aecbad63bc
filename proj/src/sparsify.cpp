#include "dsgp/sparsify.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "dsgp/errors.hpp"

namespace dsgp {

namespace {

constexpr double kScoreDegenerate = 1e-12;

// Leave-one-out variances can round to <= 0 next to dense data; the distance needs them positive.
constexpr double kVarianceFloorRatio = 1e-12;

void require_positive(const Eigen::VectorXd& v, const char* what) {
  for (Eigen::Index i = 0; i < v.size(); ++i) {
    if (!(v[i] > 0.0)) {
      throw ArgumentError(std::string("br_distance: ") + what + " variance at index " +
                          std::to_string(i) + " is not positive");
    }
  }
}

Points select_rows(const Points& grid, const std::vector<Eigen::Index>& rows) {
  Points out(static_cast<Eigen::Index>(rows.size()), grid.cols());
  for (std::size_t i = 0; i < rows.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = grid.row(rows[i]);
  }
  return out;
}

Eigen::VectorXd select(const Eigen::VectorXd& v, const std::vector<Eigen::Index>& rows) {
  Eigen::VectorXd out(static_cast<Eigen::Index>(rows.size()));
  for (std::size_t i = 0; i < rows.size(); ++i) out[static_cast<Eigen::Index>(i)] = v[rows[i]];
  return out;
}

CompressResult remove_in_order(Dataset& data, RecursiveState& state, MetricScores scores,
                               RemovalRule rule) {
  CompressResult result;
  const auto order = scores.removal_order();
  for (std::size_t candidate : order) {
    try {
      remove_point_in_place(state, data, candidate, rule);
      result.removed_index = candidate;
      result.scores = std::move(scores);
      return result;
    } catch (const RemovalSingularityError&) {
      ++result.fallbacks;
    }
  }
  throw NumericalError("compress: every candidate removal was singular");
}

}  // namespace

void SparsityConfig::validate() const {
  if (budget < 1) throw ArgumentError("sparsity: budget must be at least 1");
  if (!(k_phi > 0.0 && k_phi < 1.0)) {
    throw ArgumentError("sparsity: k_phi must lie in (0, 1), got " + std::to_string(k_phi));
  }
}

std::vector<std::size_t> MetricScores::removal_order() const {
  std::vector<std::size_t> order(static_cast<std::size_t>(fused.size()));
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::stable_sort(order.begin(), order.end(), [this](std::size_t a, std::size_t b) {
    return fused[static_cast<Eigen::Index>(a)] < fused[static_cast<Eigen::Index>(b)];
  });
  return order;
}

double local_score(const RecursiveState& state, std::size_t k) {
  if (k >= state.size()) {
    throw ArgumentError("local_score: index " + std::to_string(k) + " out of range");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  const double q = state.q_mat(kk, kk);
  if (!(std::abs(q) >= kScoreDegenerate)) {
    throw NumericalError("local_score: Q diagonal entry " + std::to_string(k) +
                         " is degenerate");
  }
  return std::abs(state.alpha[kk] / q);
}

GaussianMap leave_one_out_posterior(const RecursiveState& state, const Dataset& data,
                                    std::size_t k, const KernelSpec& spec, const Points& grid,
                                    RemovalRule rule) {
  const auto [reduced_state, reduced_data] = remove_point(state, data, k, rule);
  return recursive_predict(reduced_state, reduced_data, spec, grid);
}

LeaveOneOutSet leave_one_out_all(const RecursiveState& state, const Dataset& data,
                                 const KernelSpec& spec, const Points& grid, RemovalRule rule) {
  const auto t = static_cast<Eigen::Index>(data.size());
  if (t < 2) throw ArgumentError("leave_one_out_all: dataset must hold at least two observations");
  if (state.alpha.size() != t) throw ArgumentError("leave_one_out_all: state/data mismatch");

  const Eigen::MatrixXd k_star = cross_covariance(grid, data.positions(), spec);
  const Eigen::MatrixXd w = k_star * state.c_mat;
  const Eigen::VectorXd mean = k_star * state.alpha;
  Eigen::VectorXd variance = (w.array() * k_star.array()).rowwise().sum().matrix();
  variance.array() += spec.signal_variance;

  LeaveOneOutSet out;
  out.mean.resize(grid.rows(), t);
  out.variance.resize(grid.rows(), t);
  if (rule == RemovalRule::exact) {
    for (Eigen::Index k = 0; k < t; ++k) {
      const double c_star = state.c_mat(k, k);
      out.mean.col(k) = mean - (state.alpha[k] / c_star) * w.col(k);
      out.variance.col(k) = variance.array() - w.col(k).array().square() / c_star;
    }
  } else {
    const Eigen::MatrixXd p = k_star * state.q_mat;
    for (Eigen::Index k = 0; k < t; ++k) {
      const double q_star = state.q_mat(k, k);
      const double c_star = state.c_mat(k, k);
      out.mean.col(k) = mean - (state.alpha[k] / q_star) * p.col(k);
      out.variance.col(k) = variance.array() +
                            (c_star / (q_star * q_star)) * p.col(k).array().square() -
                            (2.0 / q_star) * p.col(k).array() * w.col(k).array();
    }
  }
  return out;
}

double bhattacharyya_term(const Eigen::VectorXd& mean1, const Eigen::VectorXd& var1,
                          const Eigen::VectorXd& mean2, const Eigen::VectorXd& var2) {
  const Eigen::ArrayXd avg = 0.5 * (var1.array() + var2.array());
  return std::sqrt(((mean1 - mean2).array().square() / avg).sum());
}

double riemannian_term(const Eigen::VectorXd& var1, const Eigen::VectorXd& var2) {
  return std::sqrt((var1.array() / var2.array()).log().square().sum());
}

double br_distance(const GaussianMap& m1, const GaussianMap& m2) {
  if (m1.mean.size() != m2.mean.size() || m1.variance.size() != m2.variance.size() ||
      m1.mean.size() != m1.variance.size()) {
    throw ArgumentError("br_distance: maps are defined on different grids");
  }
  require_positive(m1.variance, "first");
  require_positive(m2.variance, "second");
  return bhattacharyya_term(m1.mean, m1.variance, m2.mean, m2.variance) +
         riemannian_term(m1.variance, m2.variance);
}

Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v) {
  if (v.size() == 0) return v;
  const double lo = v.minCoeff();
  const double hi = v.maxCoeff();
  if (!(hi > lo)) return Eigen::VectorXd::Constant(v.size(), 0.5);
  return ((v.array() - lo) / (hi - lo)).matrix();
}

MetricScores local_metric(const RecursiveState& state) {
  MetricScores scores;
  const auto t = static_cast<Eigen::Index>(state.size());
  scores.local_score.resize(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    scores.local_score[k] = local_score(state, static_cast<std::size_t>(k));
  }
  scores.fused = min_max_normalize(scores.local_score);
  return scores;
}

MetricScores distributed_metric(const Dataset& data, const RecursiveState& state,
                                const GaussianMap& dist_map, const SparsityConfig& cfg,
                                const KernelSpec& spec) {
  cfg.validate();
  if (data.size() != cfg.budget + 1) {
    throw ArgumentError("distributed_metric: expected " + std::to_string(cfg.budget + 1) +
                        " candidates, dataset holds " + std::to_string(data.size()));
  }
  MetricScores scores = local_metric(state);

  Points eval_grid;
  Eigen::VectorXd dist_mean;
  Eigen::VectorXd dist_var;
  if (cfg.eval_indices.empty()) {
    eval_grid = dist_map.grid;
    dist_mean = dist_map.mean;
    dist_var = dist_map.variance;
  } else {
    for (Eigen::Index row : cfg.eval_indices) {
      if (row < 0 || row >= dist_map.grid.rows()) {
        throw ArgumentError("distributed_metric: evaluation index out of range");
      }
    }
    eval_grid = select_rows(dist_map.grid, cfg.eval_indices);
    dist_mean = select(dist_map.mean, cfg.eval_indices);
    dist_var = select(dist_map.variance, cfg.eval_indices);
  }
  require_positive(dist_var, "distributed");

  const LeaveOneOutSet loo = leave_one_out_all(state, data, spec, eval_grid, cfg.removal_rule);
  const double floor = kVarianceFloorRatio * spec.signal_variance;
  const auto t = static_cast<Eigen::Index>(data.size());
  scores.br_distance.resize(t);
  for (Eigen::Index k = 0; k < t; ++k) {
    const Eigen::VectorXd var_k = loo.variance.col(k).cwiseMax(floor);
    scores.br_distance[k] = bhattacharyya_term(dist_mean, dist_var, loo.mean.col(k), var_k) +
                            riemannian_term(dist_var, var_k);
  }

  const Eigen::VectorXd signed_distance =
      cfg.br_sign == BrSign::paper ? Eigen::VectorXd(-scores.br_distance) : scores.br_distance;
  scores.fused = cfg.k_phi * min_max_normalize(signed_distance) +
                 (1.0 - cfg.k_phi) * min_max_normalize(scores.local_score);
  return scores;
}

CompressResult compress_in_place(Dataset& data, RecursiveState& state,
                                 const GaussianMap& dist_map, const SparsityConfig& cfg,
                                 const KernelSpec& spec) {
  MetricScores scores = distributed_metric(data, state, dist_map, cfg, spec);
  return remove_in_order(data, state, std::move(scores), cfg.removal_rule);
}

CompressResult compress_local_in_place(Dataset& data, RecursiveState& state,
                                       const SparsityConfig& cfg) {
  if (data.size() != cfg.budget + 1) {
    throw ArgumentError("compress: expected " + std::to_string(cfg.budget + 1) +
                        " candidates, dataset holds " + std::to_string(data.size()));
  }
  return remove_in_order(data, state, local_metric(state), cfg.removal_rule);
}

Compressed compress(const Dataset& data, const RecursiveState& state, const GaussianMap& dist_map,
                    const SparsityConfig& cfg, const KernelSpec& spec) {
  Compressed out{data, state, {}};
  out.result = compress_in_place(out.data, out.state, dist_map, cfg, spec);
  return out;
}

}  // namespace dsgp
