#pragma once

#include <cstdint>
#include <filesystem>
#include <random>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Core>

#include "dsgp/gp_core.hpp"
#include "dsgp/kernel.hpp"

namespace dsgp {

/// sin(2x) + cos(6x) + 0.5
double toy_field(double x);

struct Bump {
  Eigen::VectorXd center;
  double amplitude = 1.0;
  double width = 1.0;
};

/// sum_b amplitude_b * exp(-|x - center_b|^2 / width_b^2)
double gaussian_mixture_field(const Eigen::Ref<const Eigen::VectorXd>& x,
                              std::span<const Bump> bumps);

/// Regular 2-D grid of samples with bilinear interpolation; clamps outside the hull.
class TabulatedField {
 public:
  TabulatedField(std::vector<double> xs, std::vector<double> ys, Eigen::MatrixXd values);

  /// Reads a CSV with header "x,y,value"; rows may arrive in any order but must fill the grid.
  static TabulatedField from_csv(const std::filesystem::path& path);

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;

  const std::vector<double>& xs() const { return xs_; }
  const std::vector<double>& ys() const { return ys_; }

 private:
  std::vector<double> xs_;
  std::vector<double> ys_;
  Eigen::MatrixXd values_;  // values_(ix, iy)
};

struct ToyField {};
struct GaussianMixtureField {
  std::vector<Bump> bumps;
};

class ScalarField {
 public:
  using Kind = std::variant<ToyField, GaussianMixtureField, TabulatedField>;

  ScalarField() = default;
  explicit ScalarField(Kind kind) : kind_(std::move(kind)) {}

  double operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const;
  const Kind& kind() const { return kind_; }
  std::string name() const;

 private:
  Kind kind_ = ToyField{};
};

/// Two-lamp stand-in for the light field of a 7.5 m x 5 m arena.
ScalarField two_lamp_field();

/// Portable generator: 64-bit Mersenne Twister, 53-bit uniforms, Box-Muller normals.
/// Outputs depend only on the seed.
class Rng {
 public:
  explicit Rng(std::uint64_t seed) : engine_(seed) {}

  /// Uniform in [0, 1) built from the top 53 bits of one draw.
  double uniform();
  /// Standard normal; values are produced in Box-Muller pairs.
  double normal();

 private:
  std::mt19937_64 engine_;
  double spare_ = 0.0;
  bool has_spare_ = false;
};

/// Per-robot seed: scenario seed xor robot id.
inline std::uint64_t robot_seed(std::uint64_t scenario_seed, int robot_id) {
  return scenario_seed ^ static_cast<std::uint64_t>(robot_id);
}

Observation sample(const ScalarField& field, const Eigen::Ref<const Eigen::VectorXd>& x,
                   double noise_sd, Rng& rng, int robot_id = 0, std::int64_t step_index = 0);

struct Workspace {
  Eigen::VectorXd lower;
  Eigen::VectorXd upper;

  bool contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol = 1e-9) const;
};

struct Trajectory {
  Points positions;  ///< one sample position per row

  std::size_t size() const { return static_cast<std::size_t>(positions.rows()); }
};

Trajectory linear_sweep(const Eigen::VectorXd& start, const Eigen::VectorXd& end, std::size_t n);

/// n equally spaced samples (by arc length) along a polyline through the waypoints.
Trajectory polyline(const std::vector<Eigen::VectorXd>& waypoints, std::size_t n);

/// Boustrophedon over a 2-D rectangle: `rows` horizontal passes at the row centers,
/// alternating direction, joined by vertical segments.
Trajectory lawnmower(const Workspace& workspace, std::size_t rows, std::size_t n);

/// Header "step,x,y". One-dimensional trajectories write y = 0.
void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj);
Trajectory read_trajectory_csv(const std::filesystem::path& path, int dimension);

/// Header "x,y,value", rows in grid order.
void write_field_grid_csv(const std::filesystem::path& path, const Points& grid,
                          const Eigen::VectorXd& values);

/// Regular grid over a workspace, x varying fastest. resolution has one entry per axis.
Points make_grid(const Workspace& workspace, const std::vector<int>& resolution);

Eigen::VectorXd evaluate_on(const ScalarField& field, const Points& grid);

}  // namespace dsgp
