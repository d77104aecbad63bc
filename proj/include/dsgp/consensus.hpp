#pragma once

#include <cstddef>
#include <span>
#include <vector>

#include <Eigen/Core>

#include "dsgp/gp_core.hpp"
#include "dsgp/kernel.hpp"

namespace dsgp {

/// Product-of-experts reference signal of one robot: (mu / S, 1 / S) with
/// S = local variance + correction variance, evaluated per grid point.
struct ReferenceInput {
  Eigen::VectorXd mean_term;
  Eigen::VectorXd precision_term;
};

ReferenceInput reference_input(const GaussianMap& local_map, double correction_variance);

/// Per-robot state of first-order dynamic average consensus, one entry per grid point.
struct ConsensusState {
  Eigen::VectorXd xi_mean_term;
  Eigen::VectorXd xi_precision_term;
  ReferenceInput prev_reference;

  /// xi_0 = r_0 with no pending reference change.
  static ConsensusState initialize(const ReferenceInput& initial_reference);

  std::size_t size() const { return static_cast<std::size_t>(xi_mean_term.size()); }
};

/// xi <- xi + sum_j a_ij (xi_j - xi) + (new_reference - prev_reference).
///
/// neighbors[j] pairs with weights[j]; all states must come from the same round.
ConsensusState consensus_step(const ConsensusState& state,
                              std::span<const ConsensusState* const> neighbors,
                              std::span<const double> weights,
                              const ReferenceInput& new_reference);

/// Precision floor below which a recovered grid point is reported as transient.
inline constexpr double kPrecisionFloor = 1e-9;

struct DistributedMap {
  GaussianMap map;
  /// Nonzero where the precision term was clamped to kPrecisionFloor.
  std::vector<unsigned char> transient;
  std::size_t transient_count = 0;
};

DistributedMap recover_map(const ConsensusState& state, const Points& grid);

/// Precision-weighted fusion of all local experts, the fixed point of consensus.
/// The variance is p / sum_i (S_i + s_n^2)^-1.
GaussianMap centralized_poe(std::span<const GaussianMap> maps, double correction_variance);

struct ConsensusParams {
  double correction_variance = 0.1;
  int connectivity_period = 1;
  double weight_floor = 0.1;
  int robot_count = 1;
};

struct BoundConstants {
  double eta = 0.0;
  double delta1_hat = 0.0;
  double delta2_hat = 0.0;
  double alpha = 0.0;
  double beta = 0.0;
  double sigma_n_min = 0.0;

  /// True when the correction variance meets sigma_n_min.
  bool correction_rule_met(const ConsensusParams& params) const {
    return params.correction_variance >= sigma_n_min;
  }
};

/// Asymptotic error-bound constants for the distributed mean versus the PoE mean.
/// y_bar and mu_bar bound |observations| and |local predictions|.
BoundConstants error_bound_constants(const KernelSpec& kernel, const ConsensusParams& params,
                                     double y_bar, double mu_bar);

/// Bound on |observations| estimated from data: 1.5 * max |y|.
double estimate_observation_bound(std::span<const double> values);

struct BoundReport {
  std::vector<unsigned char> pass;         ///< |mu_D - mu_poe| <= alpha + beta |mu_poe|
  std::vector<unsigned char> pass_signed;  ///< |mu_D - mu_poe| <= alpha + beta mu_poe
  std::size_t failures = 0;
  std::size_t failures_signed = 0;
  double max_violation = 0.0;        ///< max(0, err - bound) over the grid
  double max_violation_signed = 0.0;
  double max_error = 0.0;

  bool all_pass() const { return failures == 0; }
};

BoundReport check_bound(const GaussianMap& distributed, const GaussianMap& poe,
                        const BoundConstants& bounds);

}  // namespace dsgp
