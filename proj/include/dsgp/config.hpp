#pragma once

#include <cstdint>
#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "dsgp/field.hpp"
#include "dsgp/gp_core.hpp"
#include "dsgp/kernel.hpp"
#include "dsgp/sparsify.hpp"

namespace dsgp {

enum class FieldKind { toy_1d, gaussian_mixture_2d, tabulated_grid };
enum class TrajectoryKind { linear, lawnmower, csv };
enum class CompressionMode { distributed, local, none };

/// Everything a simulation run needs. Keys in config files are flat and map
/// one-to-one onto these fields (see README for the schema).
struct ScenarioConfig {
  std::string name = "scenario";
  int dimension = 1;
  Workspace workspace;

  FieldKind field_kind = FieldKind::toy_1d;
  std::vector<Bump> field_bumps;  ///< empty with gaussian_mixture_2d means the two-lamp field
  std::string field_csv;

  int robots = 1;
  TrajectoryKind trajectory = TrajectoryKind::linear;
  std::vector<Eigen::VectorXd> trajectory_starts;
  std::vector<Eigen::VectorXd> trajectory_ends;
  int lawnmower_rows = 1;
  std::vector<std::string> trajectory_csv;
  int samples_per_robot = 100;

  KernelSpec kernel;
  double correction_variance = 0.1;
  double k_phi = 0.2;
  std::size_t budget = 10;
  CompressionMode compression = CompressionMode::distributed;
  RemovalRule removal_rule = RemovalRule::exact;
  BrSign br_sign = BrSign::paper;
  int eval_grid_stride = 1;  ///< metric uses every n-th test-grid point
  /// Samples whose noiseless predictive variance falls below this fraction of the
  /// signal variance are averaged into their nearest retained twin.
  double novelty_threshold = 1e-3;

  double comm_range = 3.0;
  double edge_weight = 0.1;
  int connectivity_period = 1;
  double weight_floor = 0.1;
  int local_steps_per_round = 6;
  int settle_rounds = 0;  ///< extra consensus rounds with frozen references after sampling

  std::vector<int> grid_resolution{50};
  std::uint64_t seed = 1;
  std::optional<double> y_bar;
  std::optional<double> mu_bar;
  int threads = 1;
  std::string out_dir = "out";

  /// Relative paths in the file (field_csv, trajectory_csv) resolve against this.
  std::filesystem::path base_dir;

  /// Throws ArgumentError describing the first structural problem found.
  void validate() const;

  std::size_t total_samples() const {
    return static_cast<std::size_t>(robots) * static_cast<std::size_t>(samples_per_robot);
  }
};

/// Loads a .json or .toml file. TOML support covers the flat subset the schema
/// needs: `key = value` lines with numbers, booleans, strings and flat arrays.
ScenarioConfig load_config(const std::filesystem::path& path);
ScenarioConfig parse_config_json(const std::string& text);
ScenarioConfig parse_config_toml(const std::string& text);

/// Serializes to the flat JSON schema; parse_config_json(to_json) reproduces cfg.
std::string config_to_json(const ScenarioConfig& cfg);

BrSign parse_br_sign(const std::string& s);
std::string to_string(BrSign s);
std::string to_string(CompressionMode m);
std::string to_string(RemovalRule r);

ScalarField build_field(const ScenarioConfig& cfg);
/// One trajectory per robot with exactly samples_per_robot positions.
std::vector<Trajectory> build_trajectories(const ScenarioConfig& cfg);
Points build_grid(const ScenarioConfig& cfg);

}  // namespace dsgp
