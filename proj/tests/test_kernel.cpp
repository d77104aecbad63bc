#include <cmath>

#include <gtest/gtest.h>

#include "dsgp/errors.hpp"
#include "dsgp/kernel.hpp"
#include "support.hpp"

namespace dsgp {
namespace {

TEST(Kernel, ZeroDistanceGivesSignalVariance) {
  KernelSpec k;
  k.signal_variance = 1.0;
  k.length_scales = Eigen::Vector2d(0.3, 0.7);
  const Eigen::Vector2d a(1.5, -2.0);
  EXPECT_DOUBLE_EQ(kernel_eval(a, a, k), 1.0);
}

TEST(Kernel, UnitScaledDistance) {
  KernelSpec k;
  k.length_scales = Eigen::VectorXd::Constant(1, 0.37);
  EXPECT_NEAR(kernel_eval(Eigen::VectorXd::Zero(1), Eigen::VectorXd::Constant(1, 0.37), k),
              0.36787944117144233, 1e-15);
}

TEST(Kernel, LightFieldValuesMatchIndependentEvaluation) {
  const auto k = testing::light_field_kernel();
  // Evaluated with 30-digit arithmetic outside this code base.
  EXPECT_NEAR(kernel_eval(Eigen::Vector2d(0, 0), Eigen::Vector2d(1, 2), k) / 1.66427989189435510e-81,
              1.0, 1e-12);
  EXPECT_NEAR(kernel_eval(Eigen::Vector2d(0.3, 2.0), Eigen::Vector2d(1.1, 1.5), k),
              2.69398393825924232e-12, 1e-24);
}

TEST(Kernel, SymmetricAndBounded) {
  const auto k = testing::smooth_kernel_2d();
  const auto d = testing::random_dataset(20, 3);
  const Points x = d.positions();
  const Eigen::MatrixXd g = gram_matrix(x, k);
  EXPECT_EQ((g - g.transpose()).cwiseAbs().maxCoeff(), 0.0);
  EXPECT_LE(g.maxCoeff(), k.signal_variance);
  EXPECT_GT(g.minCoeff(), 0.0);
  const Eigen::MatrixXd cross = cross_covariance(x, x, k);
  EXPECT_LT((cross - g).cwiseAbs().maxCoeff(), 1e-15);
  const Eigen::VectorXd col = kernel_column(x, x.row(4).transpose(), k);
  EXPECT_LT((col - g.col(4)).cwiseAbs().maxCoeff(), 1e-15);
}

TEST(Kernel, DimensionMismatchThrows) {
  const auto k = testing::smooth_kernel_2d();
  EXPECT_THROW(kernel_eval(Eigen::VectorXd::Zero(3), Eigen::VectorXd::Zero(3), k), ArgumentError);
  EXPECT_THROW(cross_covariance(Points::Zero(2, 1), Points::Zero(2, 2), k), ArgumentError);
}

TEST(Kernel, ValidateRejectsNonPositiveFields) {
  KernelSpec k;
  k.signal_variance = 0.0;
  EXPECT_THROW(k.validate(), ArgumentError);
  k.signal_variance = 1.0;
  k.noise_variance = -0.1;
  EXPECT_THROW(k.validate(), ArgumentError);
  k.noise_variance = 0.1;
  k.length_scales = Eigen::VectorXd::Constant(1, std::nan(""));
  EXPECT_THROW(k.validate(), ArgumentError);
  k.length_scales = Eigen::VectorXd::Constant(1, 1.0);
  EXPECT_NO_THROW(k.validate());
}

}  // namespace
}  // namespace dsgp
