#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <iosfwd>
#include <string>
#include <vector>

#include "dsgp/config.hpp"
#include "dsgp/consensus.hpp"
#include "dsgp/field.hpp"
#include "dsgp/gp_core.hpp"
#include "dsgp/network.hpp"

namespace dsgp {

/// One row of the per-round output, one per robot per round.
struct RoundRecord {
  std::int64_t round = 0;
  int robot_id = 0;
  double rmse_local = 0.0;
  double rmse_distributed = 0.0;
  double consensus_err_vs_poe = 0.0;  ///< max over the grid of |mu_D - mu_poe|
  std::size_t dataset_size = 0;
  double pred_time = 0.0;      ///< seconds, median of the last 10 rounds
  double compress_time = 0.0;  ///< seconds, median of the last 10 rounds

  bool operator==(const RoundRecord&) const = default;
};

/// sqrt(mean_j (mean_j - truth_j)^2) over the map grid.
double rmse(const GaussianMap& map, const ScalarField& truth);
double rmse(const Eigen::VectorXd& mean, const Eigen::VectorXd& truth);

inline constexpr const char* kRecordHeader =
    "round,robot_id,rmse_local,rmse_distributed,consensus_err_vs_poe,dataset_size,pred_time,"
    "compress_time";

/// Doubles are written in shortest round-trip form.
void write_records_csv(std::ostream& out, const std::vector<RoundRecord>& records);
void export_csv(const std::filesystem::path& path, const std::vector<RoundRecord>& records);
std::vector<RoundRecord> parse_records_csv(std::istream& in);
std::vector<RoundRecord> read_records_csv(const std::filesystem::path& path);

/// Self-contained gnuplot program (data inlined) drawing RMSE against round and
/// prediction time against samples per robot. Renders to `image_name` as SVG.
std::string plot_script(const std::vector<RoundRecord>& records, int local_steps_per_round,
                        const std::string& image_name = "performance.svg");
void emit_plot_script(const std::filesystem::path& path, const std::vector<RoundRecord>& records,
                      int local_steps_per_round);

/// How the per-robot map is produced in a run.
struct RunOptions {
  /// Predict with a dense solve on the robot's data instead of the recursive state.
  bool batch_prediction = false;
  /// Exchange consensus messages. Without it every robot keeps an empty graph.
  bool communicate = true;
};

/// Snapshot handed to an observer after each round's exchange.
struct RoundView {
  std::int64_t round = 0;
  bool sampling = true;  ///< false during settle rounds
  const std::vector<GaussianMap>& local_maps;
  const std::vector<DistributedMap>& distributed;
  const std::vector<GaussianMap>& served;  ///< distributed maps with transient points filled locally
  const GaussianMap& poe;
  const CommGraph& graph;
};
using RoundObserver = std::function<void(const RoundView&)>;

struct RunResult {
  std::vector<RoundRecord> records;
  Points grid;
  Eigen::VectorXd truth;
  std::vector<Trajectory> trajectories;
  std::vector<Dataset> datasets;
  std::vector<GaussianMap> local_maps;
  std::vector<DistributedMap> distributed_maps;
  /// What each robot acts on: the recovered map with transient points replaced by
  /// its local posterior. Used for rmse_distributed and compression.
  std::vector<GaussianMap> served_maps;
  GaussianMap poe;
  std::vector<CommGraph> graphs;
  std::size_t compress_fallbacks = 0;
  std::size_t duplicates_merged = 0;
  std::size_t transient_points = 0;  ///< summed over robots and rounds
  std::size_t rounds = 0;
};

/// Runs the whole scenario. Results depend only on (cfg, seed), never on cfg.threads.
/// Module errors are rethrown with robot and round context.
RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options = {},
                       const RoundObserver& observer = {});

/// Writes records.csv, plot.gp, graph_trace.txt, truth_grid.csv, maps.csv and
/// config.json under dir.
void write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                       const RunResult& result);

/// Pre-flight checks: weight matrices along the planned graph sequence,
/// periodic connectivity and the correction-variance rule.
struct ValidationReport {
  BoundConstants bounds;
  ConsensusParams params;
  double y_bar = 0.0;
  double mu_bar = 0.0;
  bool weights_ok = true;
  bool connectivity_ok = true;
  bool correction_rule_met = true;
  std::vector<std::string> errors;
  std::vector<std::string> warnings;
  bool ok() const { return errors.empty(); }
};
ValidationReport validate_scenario(const ScenarioConfig& cfg);
void print_validation(std::ostream& out, const ValidationReport& report);

/// Planned graph per round from trajectory positions (settle rounds repeat the last one).
std::vector<CommGraph> planned_graphs(const ScenarioConfig& cfg,
                                      const std::vector<Trajectory>& trajectories);
std::size_t sampling_rounds(const ScenarioConfig& cfg);

enum class Variant { full_gpr, recursive, distributed_no_compress, local_compress, distributed_compress };
std::string to_string(Variant v);
std::vector<Variant> all_variants();
ScenarioConfig variant_config(const ScenarioConfig& cfg, Variant v, RunOptions& options);

struct VariantSummary {
  Variant variant = Variant::full_gpr;
  double final_rmse = 0.0;  ///< mean over robots of the map each variant serves
  double mean_rmse = 0.0;   ///< mean over robots and rounds
  double final_dataset_size = 0.0;
  double median_pred_time = 0.0;
  double wall_time = 0.0;
};
VariantSummary summarize_variant(Variant v, const RunResult& result, double wall_time);
std::vector<VariantSummary> compare_variants(const ScenarioConfig& cfg);
void print_comparison(std::ostream& out, const std::vector<VariantSummary>& rows);

/// Streams every robot's samples through recursive_add and compares against the
/// batch posterior at a few checkpoints.
struct OracleReport {
  std::size_t checkpoints = 0;
  double max_mean_diff = 0.0;
  double max_variance_diff = 0.0;
  double max_q_identity = 0.0;
  double max_c_identity = 0.0;
  bool pass(double tol = 1e-8) const {
    return max_mean_diff < tol && max_variance_diff < tol;
  }
};
OracleReport oracle_sweep(const ScenarioConfig& cfg, std::ostream* log = nullptr);

/// Single-robot streaming timing: median prediction time over the 10 steps
/// ending at each checkpoint sample count.
struct TimingPoint {
  std::size_t samples = 0;
  std::size_t dataset_size = 0;
  double median_pred_time = 0.0;
  double median_compress_time = 0.0;
};
std::vector<TimingPoint> timing_profile(const ScenarioConfig& cfg,
                                        const std::vector<std::size_t>& checkpoints,
                                        bool compress);

double median(std::vector<double> v);

}  // namespace dsgp
