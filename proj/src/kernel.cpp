#include "dsgp/kernel.hpp"

#include <cmath>
#include <string>

#include "dsgp/errors.hpp"

namespace dsgp {

void KernelSpec::validate() const {
  auto positive = [](double v) { return std::isfinite(v) && v > 0.0; };
  if (!positive(signal_variance)) {
    throw ArgumentError("kernel: signal_variance must be positive, got " +
                        std::to_string(signal_variance));
  }
  if (!positive(noise_variance)) {
    throw ArgumentError("kernel: noise_variance must be positive, got " +
                        std::to_string(noise_variance));
  }
  if (length_scales.size() == 0) {
    throw ArgumentError("kernel: at least one length scale is required");
  }
  for (Eigen::Index d = 0; d < length_scales.size(); ++d) {
    if (!positive(length_scales[d])) {
      throw ArgumentError("kernel: length_scales[" + std::to_string(d) + "] must be positive");
    }
  }
}

namespace {

inline double scaled_sq_distance(const double* a, Eigen::Index a_stride, const double* b,
                                 Eigen::Index b_stride, const Eigen::VectorXd& ls) {
  double acc = 0.0;
  for (Eigen::Index d = 0; d < ls.size(); ++d) {
    const double z = (a[d * a_stride] - b[d * b_stride]) / ls[d];
    acc += z * z;
  }
  return acc;
}

void check_dimension(Eigen::Index got, const KernelSpec& spec, const char* what) {
  if (got != spec.dimension()) {
    throw ArgumentError(std::string("kernel: ") + what + " has dimension " +
                        std::to_string(got) + ", expected " +
                        std::to_string(spec.dimension()));
  }
}

}  // namespace

double kernel_eval(const Eigen::Ref<const Eigen::VectorXd>& a,
                   const Eigen::Ref<const Eigen::VectorXd>& b, const KernelSpec& spec) {
  check_dimension(a.size(), spec, "first position");
  check_dimension(b.size(), spec, "second position");
  return spec.signal_variance *
         std::exp(-scaled_sq_distance(a.data(), 1, b.data(), 1, spec.length_scales));
}

Eigen::MatrixXd cross_covariance(const Points& a, const Points& b, const KernelSpec& spec) {
  if (a.rows() > 0) check_dimension(a.cols(), spec, "left point set");
  if (b.rows() > 0) check_dimension(b.cols(), spec, "right point set");
  Eigen::MatrixXd out(a.rows(), b.rows());
  const Eigen::Index a_stride = a.outerStride();
  const Eigen::Index b_stride = b.outerStride();
  for (Eigen::Index j = 0; j < b.rows(); ++j) {
    for (Eigen::Index i = 0; i < a.rows(); ++i) {
      out(i, j) = spec.signal_variance *
                  std::exp(-scaled_sq_distance(a.data() + i, a_stride, b.data() + j, b_stride,
                                               spec.length_scales));
    }
  }
  return out;
}

Eigen::MatrixXd gram_matrix(const Points& x, const KernelSpec& spec) {
  if (x.rows() > 0) check_dimension(x.cols(), spec, "point set");
  const Eigen::Index n = x.rows();
  Eigen::MatrixXd out(n, n);
  const Eigen::Index stride = x.outerStride();
  for (Eigen::Index j = 0; j < n; ++j) {
    out(j, j) = spec.signal_variance;
    for (Eigen::Index i = j + 1; i < n; ++i) {
      const double v =
          spec.signal_variance *
          std::exp(-scaled_sq_distance(x.data() + i, stride, x.data() + j, stride,
                                       spec.length_scales));
      out(i, j) = v;
      out(j, i) = v;
    }
  }
  return out;
}

Eigen::VectorXd kernel_column(const Points& x, const Eigen::Ref<const Eigen::VectorXd>& query,
                              const KernelSpec& spec) {
  check_dimension(query.size(), spec, "query position");
  if (x.rows() > 0) check_dimension(x.cols(), spec, "point set");
  Eigen::VectorXd out(x.rows());
  const Eigen::Index stride = x.outerStride();
  for (Eigen::Index i = 0; i < x.rows(); ++i) {
    out[i] = spec.signal_variance * std::exp(-scaled_sq_distance(x.data() + i, stride,
                                                                 query.data(), 1,
                                                                 spec.length_scales));
  }
  return out;
}

}  // namespace dsgp
