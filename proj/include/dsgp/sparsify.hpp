#pragma once

#include <cstddef>
#include <vector>

#include <Eigen/Core>

#include "dsgp/gp_core.hpp"
#include "dsgp/kernel.hpp"

namespace dsgp {

/// Direction of the distributed term in the fused score.
///   paper:    k_phi * norm(-d_BR) + (1 - k_phi) * norm(eps)
///   inverted: k_phi * norm(+d_BR) + (1 - k_phi) * norm(eps)
enum class BrSign { paper, inverted };

struct SparsityConfig {
  std::size_t budget = 10;
  double k_phi = 0.2;
  /// Test-grid rows used for the distance term; empty means the whole grid.
  std::vector<Eigen::Index> eval_indices;
  BrSign br_sign = BrSign::paper;
  RemovalRule removal_rule = RemovalRule::exact;

  void validate() const;
};

struct MetricScores {
  Eigen::VectorXd local_score;  ///< eps_k
  Eigen::VectorXd br_distance;  ///< d_BR(distributed, posterior without k); empty for local-only
  Eigen::VectorXd fused;        ///< phi_k in [0, 1]

  /// Candidate indices sorted by ascending fused score, ties by lower index.
  std::vector<std::size_t> removal_order() const;
};

/// |alpha_k / Q_kk|: change in posterior mean over the training inputs caused by
/// observation k.
double local_score(const RecursiveState& state, std::size_t k);

/// Posterior on grid with observation k removed, via remove_point + recursive_predict.
GaussianMap leave_one_out_posterior(const RecursiveState& state, const Dataset& data,
                                    std::size_t k, const KernelSpec& spec, const Points& grid,
                                    RemovalRule rule = RemovalRule::exact);

/// All leave-one-out posteriors at once from rank-one identities; column k of
/// mean/variance is the posterior without observation k. O(T t^2) overall.
struct LeaveOneOutSet {
  Eigen::MatrixXd mean;
  Eigen::MatrixXd variance;
};

LeaveOneOutSet leave_one_out_all(const RecursiveState& state, const Dataset& data,
                                 const KernelSpec& spec, const Points& grid,
                                 RemovalRule rule = RemovalRule::exact);

/// Mean term sqrt(sum_j (m1_j - m2_j)^2 / avg_var_j) of the Bhattacharyya-Riemannian distance.
double bhattacharyya_term(const Eigen::VectorXd& mean1, const Eigen::VectorXd& var1,
                          const Eigen::VectorXd& mean2, const Eigen::VectorXd& var2);

/// Covariance term sqrt(sum_j log(var1_j / var2_j)^2) for diagonal covariances.
double riemannian_term(const Eigen::VectorXd& var1, const Eigen::VectorXd& var2);

/// Bhattacharyya-Riemannian distance between two maps viewed as diagonal Gaussians.
double br_distance(const GaussianMap& m1, const GaussianMap& m2);

/// Min-max normalization to [0, 1]; constant input maps to 0.5.
Eigen::VectorXd min_max_normalize(const Eigen::VectorXd& v);

/// Scores every candidate of a dataset holding budget + 1 observations.
MetricScores distributed_metric(const Dataset& data, const RecursiveState& state,
                                const GaussianMap& dist_map, const SparsityConfig& cfg,
                                const KernelSpec& spec);

/// Local-only score (phi = norm(eps)).
MetricScores local_metric(const RecursiveState& state);

struct CompressResult {
  std::size_t removed_index = 0;
  /// Number of candidates skipped because their removal pivot was singular.
  std::size_t fallbacks = 0;
  MetricScores scores;
};

/// Removes the minimal-utility observation in place using the distributed metric.
CompressResult compress_in_place(Dataset& data, RecursiveState& state,
                                 const GaussianMap& dist_map, const SparsityConfig& cfg,
                                 const KernelSpec& spec);

/// Same, scored by the local metric alone.
CompressResult compress_local_in_place(Dataset& data, RecursiveState& state,
                                       const SparsityConfig& cfg);

struct Compressed {
  Dataset data;
  RecursiveState state;
  CompressResult result;
};

Compressed compress(const Dataset& data, const RecursiveState& state, const GaussianMap& dist_map,
                    const SparsityConfig& cfg, const KernelSpec& spec);

}  // namespace dsgp
