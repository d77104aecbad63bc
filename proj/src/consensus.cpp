#include "dsgp/consensus.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "dsgp/errors.hpp"

namespace dsgp {

namespace {

void require_same_size(Eigen::Index a, Eigen::Index b, const char* what) {
  if (a != b) {
    throw ArgumentError(std::string(what) + ": grid size mismatch (" + std::to_string(a) +
                        " vs " + std::to_string(b) + ")");
  }
}

}  // namespace

ReferenceInput reference_input(const GaussianMap& local_map, double correction_variance) {
  require_same_size(local_map.mean.size(), local_map.variance.size(), "reference_input");
  if (!(correction_variance > 0.0)) {
    throw ArgumentError("reference_input: correction variance must be positive");
  }
  ReferenceInput r;
  r.precision_term = (local_map.variance.array() + correction_variance).inverse().matrix();
  r.mean_term = (local_map.mean.array() * r.precision_term.array()).matrix();
  return r;
}

ConsensusState ConsensusState::initialize(const ReferenceInput& initial_reference) {
  require_same_size(initial_reference.mean_term.size(), initial_reference.precision_term.size(),
                    "consensus initialize");
  ConsensusState s;
  s.xi_mean_term = initial_reference.mean_term;
  s.xi_precision_term = initial_reference.precision_term;
  s.prev_reference = initial_reference;
  return s;
}

ConsensusState consensus_step(const ConsensusState& state,
                              std::span<const ConsensusState* const> neighbors,
                              std::span<const double> weights,
                              const ReferenceInput& new_reference) {
  if (neighbors.size() != weights.size()) {
    throw ArgumentError("consensus_step: " + std::to_string(neighbors.size()) +
                        " neighbors but " + std::to_string(weights.size()) + " weights");
  }
  const Eigen::Index n = state.xi_mean_term.size();
  require_same_size(n, state.xi_precision_term.size(), "consensus_step");
  require_same_size(n, new_reference.mean_term.size(), "consensus_step");
  require_same_size(n, new_reference.precision_term.size(), "consensus_step");
  require_same_size(n, state.prev_reference.mean_term.size(), "consensus_step");

  ConsensusState next;
  next.xi_mean_term = state.xi_mean_term;
  next.xi_precision_term = state.xi_precision_term;
  for (std::size_t j = 0; j < neighbors.size(); ++j) {
    const ConsensusState& other = *neighbors[j];
    require_same_size(n, other.xi_mean_term.size(), "consensus_step");
    require_same_size(n, other.xi_precision_term.size(), "consensus_step");
    if (!(weights[j] >= 0.0)) throw ArgumentError("consensus_step: negative weight");
    next.xi_mean_term += weights[j] * (other.xi_mean_term - state.xi_mean_term);
    next.xi_precision_term += weights[j] * (other.xi_precision_term - state.xi_precision_term);
  }
  double weight_sum = 0.0;
  for (double w : weights) weight_sum += w;
  if (weight_sum > 1.0 + 1e-12) {
    throw ArgumentError("consensus_step: neighbor weights sum to " + std::to_string(weight_sum) +
                        " > 1");
  }
  next.xi_mean_term += new_reference.mean_term - state.prev_reference.mean_term;
  next.xi_precision_term += new_reference.precision_term - state.prev_reference.precision_term;
  next.prev_reference = new_reference;
  return next;
}

DistributedMap recover_map(const ConsensusState& state, const Points& grid) {
  const Eigen::Index n = state.xi_mean_term.size();
  require_same_size(n, grid.rows(), "recover_map");
  DistributedMap out;
  out.map.grid = grid;
  out.map.mean.resize(n);
  out.map.variance.resize(n);
  out.transient.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    double precision = state.xi_precision_term[i];
    if (!(precision > kPrecisionFloor)) {
      precision = kPrecisionFloor;
      out.transient[static_cast<std::size_t>(i)] = 1;
      ++out.transient_count;
    }
    out.map.mean[i] = state.xi_mean_term[i] / precision;
    out.map.variance[i] = 1.0 / precision;
  }
  return out;
}

GaussianMap centralized_poe(std::span<const GaussianMap> maps, double correction_variance) {
  if (maps.empty()) throw ArgumentError("centralized_poe: no expert maps given");
  const Eigen::Index n = maps.front().mean.size();
  Eigen::ArrayXd precision_sum = Eigen::ArrayXd::Zero(n);
  Eigen::ArrayXd weighted_mean = Eigen::ArrayXd::Zero(n);
  for (const auto& m : maps) {
    require_same_size(n, m.mean.size(), "centralized_poe");
    require_same_size(n, m.variance.size(), "centralized_poe");
    const Eigen::ArrayXd precision = (m.variance.array() + correction_variance).inverse();
    precision_sum += precision;
    weighted_mean += precision * m.mean.array();
  }
  GaussianMap out;
  out.grid = maps.front().grid;
  out.mean = (weighted_mean / precision_sum).matrix();
  out.variance = (static_cast<double>(maps.size()) / precision_sum).matrix();
  return out;
}

BoundConstants error_bound_constants(const KernelSpec& kernel, const ConsensusParams& params,
                                     double y_bar, double mu_bar) {
  if (!(params.weight_floor > 0.0 && params.weight_floor <= 1.0)) {
    throw ArgumentError("error bound: weight floor must lie in (0, 1], got " +
                        std::to_string(params.weight_floor));
  }
  if (params.robot_count < 1 || params.connectivity_period < 1) {
    throw ArgumentError("error bound: robot count and connectivity period must be >= 1");
  }
  if (!(params.correction_variance > 0.0)) {
    throw ArgumentError("error bound: correction variance must be positive");
  }
  if (!(y_bar > 0.0) || !(mu_bar > 0.0)) {
    throw ArgumentError("error bound: observation and prediction bounds must be positive");
  }
  const double p = params.robot_count;
  const double b = params.connectivity_period;
  const double sf2 = kernel.signal_variance;
  const double se2 = kernel.noise_variance;
  const double sn2 = params.correction_variance;

  BoundConstants c;
  c.eta = 4.0 * (p * b - 1.0) / std::pow(params.weight_floor, 0.5 * p * (p + 1.0) * b - 1.0);
  c.delta1_hat = y_bar * sf2 * (sn2 + sf2) / (sn2 * (se2 + sf2)) +
                 mu_bar * sf2 * sf2 / (sn2 * (se2 + sf2));
  c.delta2_hat = sf2 * sf2 / (sn2 * (se2 + sf2));
  const double ed2 = c.eta * c.delta2_hat;
  c.alpha = c.eta * c.delta1_hat / (1.0 + ed2);
  c.beta = std::abs(ed2 / (1.0 - ed2));
  c.sigma_n_min = c.eta * sf2 * sf2 / (se2 + sf2);
  return c;
}

double estimate_observation_bound(std::span<const double> values) {
  double m = 0.0;
  for (double v : values) m = std::max(m, std::abs(v));
  return 1.5 * m;
}

BoundReport check_bound(const GaussianMap& distributed, const GaussianMap& poe,
                        const BoundConstants& bounds) {
  const Eigen::Index n = distributed.mean.size();
  require_same_size(n, poe.mean.size(), "check_bound");
  BoundReport rep;
  rep.pass.assign(static_cast<std::size_t>(n), 0);
  rep.pass_signed.assign(static_cast<std::size_t>(n), 0);
  for (Eigen::Index i = 0; i < n; ++i) {
    const double err = std::abs(distributed.mean[i] - poe.mean[i]);
    const double bound = bounds.alpha + bounds.beta * std::abs(poe.mean[i]);
    const double bound_signed = bounds.alpha + bounds.beta * poe.mean[i];
    rep.max_error = std::max(rep.max_error, err);
    const auto idx = static_cast<std::size_t>(i);
    if (err <= bound) {
      rep.pass[idx] = 1;
    } else {
      ++rep.failures;
      rep.max_violation = std::max(rep.max_violation, err - bound);
    }
    if (err <= bound_signed) {
      rep.pass_signed[idx] = 1;
    } else {
      ++rep.failures_signed;
      rep.max_violation_signed = std::max(rep.max_violation_signed, err - bound_signed);
    }
  }
  return rep;
}

}  // namespace dsgp
