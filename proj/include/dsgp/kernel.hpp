#pragma once

#include <Eigen/Core>

namespace dsgp {

/// Positions stacked one per row (n x dim).
using Points = Eigen::MatrixXd;

/// Squared-exponential kernel hyper-parameters.
///
/// k(a, b) = signal_variance * exp(-sum_d ((a_d - b_d) / length_scales_d)^2)
struct KernelSpec {
  double signal_variance = 1.0;
  Eigen::VectorXd length_scales = Eigen::VectorXd::Ones(1);
  double noise_variance = 0.1;

  Eigen::Index dimension() const { return length_scales.size(); }

  /// Throws ArgumentError unless every field is strictly positive and finite.
  void validate() const;
};

double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b,
                   const KernelSpec& spec);

/// K(a, b) with a.rows() x b.rows() entries.
Eigen::MatrixXd cross_covariance(const Points& a, const Points& b, const KernelSpec& spec);

/// Noiseless Gram matrix K(X, X), exactly symmetric.
Eigen::MatrixXd gram_matrix(const Points& x, const KernelSpec& spec);

/// K(X, x) for a single query position.
Eigen::VectorXd kernel_column(const Points& x, const Eigen::Ref<const Eigen::VectorXd>& query,
                              const KernelSpec& spec);

}  // namespace dsgp
