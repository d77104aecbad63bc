#include "dsgp/gp_core.hpp"

#include <cmath>
#include <limits>
#include <sstream>
#include <string>

#include "dsgp/errors.hpp"

namespace dsgp {

namespace {

constexpr double kBaseJitterRatio = 1e-10;
constexpr int kJitterRetries = 3;

void check_consistent(const RecursiveState& state, const Dataset& data) {
  const auto t = static_cast<Eigen::Index>(data.size());
  if (state.alpha.size() != t || state.c_mat.rows() != t || state.c_mat.cols() != t ||
      state.q_mat.rows() != t || state.q_mat.cols() != t) {
    throw ArgumentError("recursive state has dimension " + std::to_string(state.alpha.size()) +
                        " but dataset has " + std::to_string(t) + " observations");
  }
}

void mirror_lower(Eigen::MatrixXd& m) {
  m.triangularView<Eigen::StrictlyUpper>() = m.transpose();
}

// Order [0..k-1, k+1..t-1, k].
Eigen::PermutationMatrix<Eigen::Dynamic> move_to_last(Eigen::Index t, Eigen::Index k) {
  Eigen::VectorXi order(t);
  Eigen::Index pos = 0;
  for (Eigen::Index i = 0; i < t; ++i) {
    if (i != k) order[pos++] = static_cast<int>(i);
  }
  order[t - 1] = static_cast<int>(k);
  // P * v picks v[order[i]] for a permutation built from the inverse indices.
  Eigen::PermutationMatrix<Eigen::Dynamic> perm(t);
  for (Eigen::Index i = 0; i < t; ++i) perm.indices()[order[i]] = static_cast<int>(i);
  return perm;
}

}  // namespace

Points Dataset::positions() const {
  if (observations.empty()) return Points(0, 0);
  const auto dim = observations.front().position.size();
  Points out(static_cast<Eigen::Index>(observations.size()), dim);
  for (std::size_t i = 0; i < observations.size(); ++i) {
    out.row(static_cast<Eigen::Index>(i)) = observations[i].position.transpose();
  }
  return out;
}

Eigen::VectorXd Dataset::values() const {
  Eigen::VectorXd out(static_cast<Eigen::Index>(observations.size()));
  for (std::size_t i = 0; i < observations.size(); ++i) {
    out[static_cast<Eigen::Index>(i)] = observations[i].value;
  }
  return out;
}

GaussianMap prior_map(const Points& grid, const KernelSpec& spec) {
  GaussianMap map;
  map.grid = grid;
  map.mean = Eigen::VectorXd::Zero(grid.rows());
  map.variance = Eigen::VectorXd::Constant(grid.rows(), spec.signal_variance);
  return map;
}

Eigen::LLT<Eigen::MatrixXd> spd_cholesky(const Eigen::MatrixXd& a, double signal_variance) {
  double jitter = kBaseJitterRatio * signal_variance;
  const Eigen::Index n = a.rows();
  for (int attempt = 0; attempt <= kJitterRetries; ++attempt) {
    Eigen::MatrixXd shifted = a;
    shifted.diagonal().array() += jitter;
    Eigen::LLT<Eigen::MatrixXd> llt(shifted);
    if (llt.info() == Eigen::Success) return llt;
    jitter *= 2.0;
  }
  const double max_diag = n > 0 ? a.diagonal().maxCoeff() : 0.0;
  const double min_diag = n > 0 ? a.diagonal().minCoeff() : 0.0;
  std::ostringstream msg;
  msg << "SPD factorization of a " << n << "x" << n << " system failed after "
      << kJitterRetries << " jitter doublings (final jitter " << jitter / 2.0
      << ", diagonal range [" << min_diag << ", " << max_diag << "])";
  throw NumericalError(msg.str());
}

GaussianMap batch_predict(const Dataset& data, const KernelSpec& spec, const Points& grid) {
  if (data.empty()) throw ArgumentError("batch_predict: dataset is empty");
  const Points x = data.positions();
  Eigen::MatrixXd system = gram_matrix(x, spec);
  system.diagonal().array() += spec.noise_variance;
  const auto llt = spd_cholesky(system, spec.signal_variance);

  const Eigen::MatrixXd k_star = cross_covariance(grid, x, spec);
  GaussianMap map;
  map.grid = grid;
  map.mean = k_star * llt.solve(data.values());
  const Eigen::MatrixXd v = llt.matrixL().solve(k_star.transpose());
  map.variance =
      (Eigen::VectorXd::Constant(grid.rows(), spec.signal_variance).array() -
       v.colwise().squaredNorm().transpose().array())
          .matrix();
  return map;
}

AddResult recursive_add_in_place(RecursiveState& state, Dataset& data, const Observation& obs,
                                 const KernelSpec& spec, double duplicate_ratio) {
  if (!(duplicate_ratio >= 0.0 && duplicate_ratio < 1.0)) {
    throw ArgumentError("recursive_add: duplicate ratio must lie in [0, 1)");
  }
  check_consistent(state, data);
  if (obs.position.size() != spec.dimension()) {
    throw ArgumentError("recursive_add: observation dimension " +
                        std::to_string(obs.position.size()) + " does not match kernel");
  }
  for (Eigen::Index d = 0; d < obs.position.size(); ++d) {
    if (!std::isfinite(obs.position[d])) {
      throw ArgumentError("recursive_add: observation position is not finite");
    }
  }

  const Eigen::Index t = state.alpha.size();
  const Eigen::VectorXd k = kernel_column(data.positions(), obs.position, spec);
  const double prior = spec.signal_variance;

  const Eigen::VectorXd ck = state.c_mat * k;
  const Eigen::VectorXd qk = state.q_mat * k;
  const double noiseless = prior - k.dot(qk);

  AddResult result;
  result.noiseless_variance = noiseless;
  if (noiseless <= duplicate_ratio * prior) {
    Eigen::Index nearest = 0;
    k.maxCoeff(&nearest);
    result.duplicate_of = static_cast<std::size_t>(nearest);
    return result;
  }

  const double denom = spec.noise_variance + prior + k.dot(ck);
  const double q = (obs.value - k.dot(state.alpha)) / denom;
  const double r = -1.0 / denom;
  const double gamma = 1.0 / noiseless;

  Eigen::VectorXd s(t + 1);
  s.head(t) = ck;
  s[t] = 1.0;
  Eigen::VectorXd e(t + 1);
  e.head(t) = qk;
  e[t] = -1.0;

  state.alpha.conservativeResize(t + 1);
  state.alpha[t] = 0.0;
  state.alpha += q * s;

  state.c_mat.conservativeResize(t + 1, t + 1);
  state.c_mat.row(t).setZero();
  state.c_mat.col(t).setZero();
  state.c_mat.noalias() += (r * s) * s.transpose();
  mirror_lower(state.c_mat);

  state.q_mat.conservativeResize(t + 1, t + 1);
  state.q_mat.row(t).setZero();
  state.q_mat.col(t).setZero();
  state.q_mat.noalias() += (gamma * e) * e.transpose();
  mirror_lower(state.q_mat);

  data.observations.push_back(obs);
  return result;
}

AddOutcome recursive_add(const RecursiveState& state, const Dataset& data, const Observation& obs,
                         const KernelSpec& spec, double duplicate_ratio) {
  AddOutcome out{state, data, {}};
  out.result = recursive_add_in_place(out.state, out.data, obs, spec, duplicate_ratio);
  return out;
}

GaussianMap recursive_predict(const RecursiveState& state, const Dataset& data,
                              const KernelSpec& spec, const Points& grid) {
  check_consistent(state, data);
  if (data.empty()) return prior_map(grid, spec);
  const Eigen::MatrixXd k_star = cross_covariance(grid, data.positions(), spec);
  GaussianMap map;
  map.grid = grid;
  map.mean = k_star * state.alpha;
  const Eigen::MatrixXd kc = k_star * state.c_mat;
  map.variance = (kc.array() * k_star.array()).rowwise().sum().matrix();
  map.variance.array() += spec.signal_variance;
  return map;
}

void remove_point_in_place(RecursiveState& state, Dataset& data, std::size_t k,
                           RemovalRule rule) {
  check_consistent(state, data);
  const auto t = static_cast<Eigen::Index>(data.size());
  if (t < 2) throw ArgumentError("remove_point: dataset must hold at least two observations");
  if (k >= data.size()) {
    throw ArgumentError("remove_point: index " + std::to_string(k) + " out of range for " +
                        std::to_string(t) + " observations");
  }
  const auto kk = static_cast<Eigen::Index>(k);
  const double q_star = state.q_mat(kk, kk);
  const double c_star = state.c_mat(kk, kk);
  const double alpha_star = state.alpha[kk];

  // Pivot magnitudes are compared against the scale of their own matrix inverses.
  const double scale = state.q_mat.diagonal().cwiseAbs().maxCoeff();
  if (!(std::abs(q_star) >= kDuplicateRatio * scale) || !std::isfinite(q_star)) {
    throw RemovalSingularityError("remove_point: pivot q* is singular for index " +
                                  std::to_string(k), k);
  }
  if (rule == RemovalRule::exact && !(std::abs(c_star) > 0.0)) {
    throw RemovalSingularityError("remove_point: pivot c* is zero for index " +
                                  std::to_string(k), k);
  }

  const auto perm = move_to_last(t, kk);
  const Eigen::VectorXd alpha_p = perm * state.alpha;
  const Eigen::MatrixXd c_p = perm * state.c_mat * perm.transpose();
  const Eigen::MatrixXd q_p = perm * state.q_mat * perm.transpose();

  const Eigen::Index m = t - 1;
  const Eigen::VectorXd q_col = q_p.col(m).head(m);
  const Eigen::VectorXd c_col = c_p.col(m).head(m);

  Eigen::MatrixXd q_hat = q_p.topLeftCorner(m, m);
  q_hat.noalias() -= (q_col / q_star) * q_col.transpose();

  Eigen::VectorXd alpha_hat = alpha_p.head(m);
  Eigen::MatrixXd c_hat = c_p.topLeftCorner(m, m);
  if (rule == RemovalRule::exact) {
    alpha_hat -= (alpha_star / c_star) * c_col;
    c_hat.noalias() -= (c_col / c_star) * c_col.transpose();
  } else {
    alpha_hat -= (alpha_star / q_star) * q_col;
    c_hat.noalias() += (c_star / (q_star * q_star)) * q_col * q_col.transpose();
    c_hat.noalias() -= (1.0 / q_star) * (q_col * c_col.transpose() + c_col * q_col.transpose());
  }
  mirror_lower(q_hat);
  mirror_lower(c_hat);

  state.alpha = std::move(alpha_hat);
  state.c_mat = std::move(c_hat);
  state.q_mat = std::move(q_hat);
  data.observations.erase(data.observations.begin() + static_cast<std::ptrdiff_t>(k));
}

std::pair<RecursiveState, Dataset> remove_point(const RecursiveState& state, const Dataset& data,
                                                std::size_t k, RemovalRule rule) {
  std::pair<RecursiveState, Dataset> out{state, data};
  remove_point_in_place(out.first, out.second, k, rule);
  return out;
}

void update_value_in_place(RecursiveState& state, Dataset& data, std::size_t k, double value) {
  check_consistent(state, data);
  if (k >= data.size()) throw ArgumentError("update_value: index out of range");
  const double delta = value - data.observations[k].value;
  // alpha = -C y, so a change in y_k shifts alpha along column k of -C.
  state.alpha -= delta * state.c_mat.col(static_cast<Eigen::Index>(k));
  data.observations[k].value = value;
}

RecursiveState state_from_batch(const Dataset& data, const KernelSpec& spec) {
  RecursiveState state;
  const auto t = static_cast<Eigen::Index>(data.size());
  if (t == 0) {
    state.alpha.resize(0);
    state.c_mat.resize(0, 0);
    state.q_mat.resize(0, 0);
    return state;
  }
  const Eigen::MatrixXd k = gram_matrix(data.positions(), spec);
  Eigen::MatrixXd noisy = k;
  noisy.diagonal().array() += spec.noise_variance;
  const auto noisy_llt = spd_cholesky(noisy, spec.signal_variance);
  const Eigen::MatrixXd noisy_inv = noisy_llt.solve(Eigen::MatrixXd::Identity(t, t));
  state.alpha = noisy_inv * data.values();
  state.c_mat = -noisy_inv;
  mirror_lower(state.c_mat);
  state.q_mat = k.ldlt().solve(Eigen::MatrixXd::Identity(t, t));
  mirror_lower(state.q_mat);
  return state;
}

StateResiduals state_residuals(const RecursiveState& state, const Dataset& data,
                               const KernelSpec& spec) {
  check_consistent(state, data);
  StateResiduals res;
  const auto t = static_cast<Eigen::Index>(data.size());
  if (t == 0) return res;
  const Eigen::MatrixXd k = gram_matrix(data.positions(), spec);
  const Eigen::MatrixXd eye = Eigen::MatrixXd::Identity(t, t);
  Eigen::MatrixXd noisy = k;
  noisy.diagonal().array() += spec.noise_variance;
  res.q_identity = (state.q_mat * k - eye).norm();
  res.c_identity = (state.c_mat * noisy + eye).norm();
  const Eigen::VectorXd alpha_ref = noisy.llt().solve(data.values());
  res.alpha_error = (state.alpha - alpha_ref).cwiseAbs().maxCoeff();
  res.c_asymmetry = (state.c_mat - state.c_mat.transpose()).cwiseAbs().maxCoeff();
  res.q_asymmetry = (state.q_mat - state.q_mat.transpose()).cwiseAbs().maxCoeff();
  return res;
}

}  // namespace dsgp
