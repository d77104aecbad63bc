#pragma once

#include <cstddef>
#include <cstdint>
#include <optional>
#include <utility>
#include <vector>

#include <Eigen/Cholesky>
#include <Eigen/Core>

#include "dsgp/kernel.hpp"

namespace dsgp {

struct Observation {
  Eigen::VectorXd position;
  double value = 0.0;
  int robot_id = 0;
  std::int64_t step_index = 0;
};

/// Insertion-ordered training set. Index k of every recursive quantity refers to
/// observations[k].
struct Dataset {
  std::vector<Observation> observations;

  std::size_t size() const { return observations.size(); }
  bool empty() const { return observations.empty(); }
  Points positions() const;
  Eigen::VectorXd values() const;
};

/// Streaming GP variables aligned to a dataset of size t.
///
///   alpha = (K + s_e^2 I)^-1 y,  c_mat = -(K + s_e^2 I)^-1,  q_mat = K^-1
struct RecursiveState {
  Eigen::VectorXd alpha;
  Eigen::MatrixXd c_mat;
  Eigen::MatrixXd q_mat;

  std::size_t size() const { return static_cast<std::size_t>(alpha.size()); }
};

/// Mean and variance over an ordered set of test positions.
struct GaussianMap {
  Points grid;
  Eigen::VectorXd mean;
  Eigen::VectorXd variance;

  std::size_t size() const { return static_cast<std::size_t>(mean.size()); }
};

/// The GP prior on a grid: zero mean, signal variance everywhere.
GaussianMap prior_map(const Points& grid, const KernelSpec& spec);

/// Reference posterior from a dense SPD solve of (K + s_e^2 I).
GaussianMap batch_predict(const Dataset& data, const KernelSpec& spec, const Points& grid);

struct AddResult {
  /// 1 / gamma: noiseless predictive variance of the new input given the old inputs.
  double noiseless_variance = 0.0;
  /// Set when the input is numerically a duplicate; the state is left untouched.
  std::optional<std::size_t> duplicate_of;

  bool accepted() const { return !duplicate_of.has_value(); }
};

/// Default novelty floor, as a fraction of the signal variance.
inline constexpr double kDuplicateRatio = 1e-12;

/// Appends obs to data and extends state by one dimension. Rejects numerically
/// duplicated inputs (noiseless predictive variance <= duplicate_ratio * signal
/// variance) without modifying either argument. A larger ratio keeps the Gram
/// matrix of dense sample streams well conditioned.
AddResult recursive_add_in_place(RecursiveState& state, Dataset& data, const Observation& obs,
                                 const KernelSpec& spec, double duplicate_ratio = kDuplicateRatio);

struct AddOutcome {
  RecursiveState state;
  Dataset data;
  AddResult result;
};

AddOutcome recursive_add(const RecursiveState& state, const Dataset& data,
                         const Observation& obs, const KernelSpec& spec,
                         double duplicate_ratio = kDuplicateRatio);

GaussianMap recursive_predict(const RecursiveState& state, const Dataset& data,
                              const KernelSpec& spec, const Points& grid);

enum class RemovalRule {
  /// Exact block-inverse downdate: the result equals a GP trained on the survivors.
  exact,
  /// Sparse online GP projection: the removed input's kernel column is projected
  /// onto the survivors, so its observation keeps contributing to alpha and C.
  projected,
};

/// Drops observation k (0-based). Survivors keep their relative order.
void remove_point_in_place(RecursiveState& state, Dataset& data, std::size_t k,
                           RemovalRule rule = RemovalRule::exact);

std::pair<RecursiveState, Dataset> remove_point(const RecursiveState& state, const Dataset& data,
                                                std::size_t k,
                                                RemovalRule rule = RemovalRule::exact);

/// Replaces the value of observation k and corrects alpha accordingly.
void update_value_in_place(RecursiveState& state, Dataset& data, std::size_t k, double value);

/// Rebuilds the recursive state from scratch by dense inversion.
RecursiveState state_from_batch(const Dataset& data, const KernelSpec& spec);

struct StateResiduals {
  double q_identity = 0.0;      ///< ||Q K - I||_F
  double c_identity = 0.0;      ///< ||C (K + s_e^2 I) + I||_F
  double alpha_error = 0.0;     ///< ||alpha - (K + s_e^2 I)^-1 y||_inf
  double c_asymmetry = 0.0;     ///< max |C - C^T|
  double q_asymmetry = 0.0;     ///< max |Q - Q^T|
};

StateResiduals state_residuals(const RecursiveState& state, const Dataset& data,
                               const KernelSpec& spec);

/// Cholesky factor of a + jitter * I, retrying with doubled jitter up to three times.
/// The initial jitter is 1e-10 * signal_variance.
Eigen::LLT<Eigen::MatrixXd> spd_cholesky(const Eigen::MatrixXd& a, double signal_variance);

}  // namespace dsgp
