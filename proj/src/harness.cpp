#include "dsgp/harness.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <exception>
#include <fstream>
#include <iomanip>
#include <optional>
#include <ostream>
#include <sstream>
#include <thread>

#include "dsgp/errors.hpp"
#include "dsgp/sparsify.hpp"

namespace dsgp {

namespace {

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point start) {
  return std::chrono::duration<double>(Clock::now() - start).count();
}

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

double window_median(const std::vector<double>& samples, std::size_t window = 10) {
  if (samples.empty()) return 0.0;
  const std::size_t from = samples.size() > window ? samples.size() - window : 0;
  return median(std::vector<double>(samples.begin() + static_cast<long>(from), samples.end()));
}

/// Runs fn(r) for every robot, spreading robots over up to `threads` workers.
/// Each robot only touches its own slot, so the outcome is independent of scheduling.
template <typename Fn>
void for_each_robot(std::size_t robots, int threads, Fn&& fn) {
  const std::size_t workers = std::min<std::size_t>(static_cast<std::size_t>(std::max(threads, 1)), robots);
  if (workers <= 1) {
    for (std::size_t r = 0; r < robots; ++r) fn(r);
    return;
  }
  std::vector<std::exception_ptr> errors(robots);
  std::vector<std::thread> pool;
  for (std::size_t w = 0; w < workers; ++w) {
    pool.emplace_back([&, w] {
      for (std::size_t r = w; r < robots; r += workers) {
        try {
          fn(r);
        } catch (...) {
          errors[r] = std::current_exception();
        }
      }
    });
  }
  for (auto& t : pool) t.join();
  for (auto& e : errors) {
    if (e) std::rethrow_exception(e);
  }
}

/// Rethrows module errors with a location prefix, keeping the error category.
template <typename Fn>
void with_context(const std::string& where, Fn&& fn) {
  try {
    fn();
  } catch (const RemovalSingularityError& e) {
    throw NumericalError(where + ": " + e.what());
  } catch (const NumericalError& e) {
    throw NumericalError(where + ": " + e.what());
  } catch (const ArgumentError& e) {
    throw ArgumentError(where + ": " + e.what());
  }
}

struct Robot {
  Dataset data;
  RecursiveState state;
  std::vector<int> multiplicity;  ///< samples averaged into each retained observation
  std::optional<Rng> rng;
  std::size_t next_step = 0;
  Eigen::VectorXd position;
  GaussianMap local_map;
  std::vector<double> pred_times;
  std::vector<double> compress_times;
  std::size_t fallbacks = 0;
  std::size_t duplicates = 0;
};

/// Adds one sample; a numerically duplicated input is averaged into its twin.
void ingest(Robot& robot, const Observation& obs, const KernelSpec& kernel, double novelty) {
  const AddResult res = recursive_add_in_place(robot.state, robot.data, obs, kernel, novelty);
  if (res.accepted()) {
    robot.multiplicity.push_back(1);
    return;
  }
  const std::size_t k = *res.duplicate_of;
  const int m = robot.multiplicity[k];
  const double merged = (robot.data.observations[k].value * m + obs.value) / (m + 1);
  update_value_in_place(robot.state, robot.data, k, merged);
  robot.multiplicity[k] = m + 1;
  ++robot.duplicates;
}

SparsityConfig sparsity_config(const ScenarioConfig& cfg, const Points& grid) {
  SparsityConfig s;
  s.budget = cfg.budget;
  s.k_phi = cfg.k_phi;
  s.br_sign = cfg.br_sign;
  s.removal_rule = cfg.removal_rule;
  if (cfg.eval_grid_stride > 1) {
    for (Eigen::Index i = 0; i < grid.rows(); i += cfg.eval_grid_stride) s.eval_indices.push_back(i);
  }
  return s;
}

/// The map a robot acts on: the recovered consensus map, except at transient
/// points where the recovered mean is undefined and the local posterior stands in.
GaussianMap served_map(const DistributedMap& dist, const GaussianMap& local) {
  GaussianMap out = dist.map;
  for (std::size_t i = 0; i < dist.transient.size(); ++i) {
    if (!dist.transient[i]) continue;
    const auto j = static_cast<Eigen::Index>(i);
    out.mean[j] = local.mean[j];
    out.variance[j] = local.variance[j];
  }
  return out;
}

GaussianMap predict(const Robot& robot, const KernelSpec& kernel, const Points& grid, bool batch) {
  if (robot.data.empty()) return prior_map(grid, kernel);
  if (batch) return batch_predict(robot.data, kernel, grid);
  return recursive_predict(robot.state, robot.data, kernel, grid);
}

}  // namespace

double median(std::vector<double> v) {
  if (v.empty()) return 0.0;
  const std::size_t mid = v.size() / 2;
  std::nth_element(v.begin(), v.begin() + static_cast<long>(mid), v.end());
  const double upper = v[mid];
  if (v.size() % 2 == 1) return upper;
  const double lower = *std::max_element(v.begin(), v.begin() + static_cast<long>(mid));
  return 0.5 * (lower + upper);
}

double rmse(const Eigen::VectorXd& mean, const Eigen::VectorXd& truth) {
  if (mean.size() != truth.size()) throw ArgumentError("rmse: size mismatch");
  if (mean.size() == 0) return 0.0;
  return std::sqrt((mean - truth).squaredNorm() / static_cast<double>(mean.size()));
}

double rmse(const GaussianMap& map, const ScalarField& truth) {
  return rmse(map.mean, evaluate_on(truth, map.grid));
}

// ---- CSV ----

void write_records_csv(std::ostream& out, const std::vector<RoundRecord>& records) {
  out << kRecordHeader << '\n';
  for (const auto& r : records) {
    out << r.round << ',' << r.robot_id << ',' << format_double(r.rmse_local) << ','
        << format_double(r.rmse_distributed) << ',' << format_double(r.consensus_err_vs_poe) << ','
        << r.dataset_size << ',' << format_double(r.pred_time) << ','
        << format_double(r.compress_time) << '\n';
  }
}

void export_csv(const std::filesystem::path& path, const std::vector<RoundRecord>& records) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write records to '" + path.string() + "'");
  write_records_csv(out, records);
  if (!out) throw ArgumentError("write failed for '" + path.string() + "'");
}

std::vector<RoundRecord> parse_records_csv(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kRecordHeader) {
    throw ArgumentError("records csv: unexpected header");
  }
  std::vector<RoundRecord> out;
  std::size_t line_no = 1;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::vector<std::string_view> cols;
    std::string_view rest(line);
    while (true) {
      const auto comma = rest.find(',');
      cols.push_back(rest.substr(0, comma));
      if (comma == std::string_view::npos) break;
      rest.remove_prefix(comma + 1);
    }
    if (cols.size() != 8) {
      throw ArgumentError("records csv line " + std::to_string(line_no) + ": expected 8 columns");
    }
    auto parse = [&](std::string_view s, auto& value) {
      auto res = std::from_chars(s.data(), s.data() + s.size(), value);
      if (res.ec != std::errc() || res.ptr != s.data() + s.size()) {
        throw ArgumentError("records csv line " + std::to_string(line_no) + ": bad value '" +
                            std::string(s) + "'");
      }
    };
    RoundRecord r;
    parse(cols[0], r.round);
    parse(cols[1], r.robot_id);
    parse(cols[2], r.rmse_local);
    parse(cols[3], r.rmse_distributed);
    parse(cols[4], r.consensus_err_vs_poe);
    parse(cols[5], r.dataset_size);
    parse(cols[6], r.pred_time);
    parse(cols[7], r.compress_time);
    out.push_back(r);
  }
  return out;
}

std::vector<RoundRecord> read_records_csv(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw ArgumentError("cannot open records '" + path.string() + "'");
  return parse_records_csv(in);
}

std::string plot_script(const std::vector<RoundRecord>& records, int local_steps_per_round,
                        const std::string& image_name) {
  int robots = 0;
  for (const auto& r : records) robots = std::max(robots, r.robot_id + 1);
  std::ostringstream s;
  s << "# gnuplot script; data inlined below\n"
    << "set terminal svg size 1100,450 dynamic\n"
    << "set output '" << image_name << "'\n"
    << "set datafile separator ','\n"
    << "$records << EOD\n";
  for (const auto& r : records) {
    s << r.round << ',' << r.robot_id << ',' << format_double(r.rmse_local) << ','
      << format_double(r.rmse_distributed) << ',' << format_double(r.consensus_err_vs_poe) << ','
      << r.dataset_size << ',' << format_double(r.pred_time) << ','
      << format_double(r.compress_time) << '\n';
  }
  s << "EOD\n"
    << "robots = " << robots << "\n"
    << "steps = " << local_steps_per_round << "\n"
    << "set multiplot layout 1,2\n"
    << "set grid\n"
    << "set key top right\n"
    << "set title 'RMSE of distributed map'\n"
    << "set xlabel 'round'\n"
    << "set ylabel 'RMSE'\n"
    << "plot for [r=0:robots-1] $records using 1:($2==r ? $4 : 1/0) with lines title sprintf('robot %d', r)\n"
    << "set title 'prediction time'\n"
    << "set xlabel 'local steps (N per robot)'\n"
    << "set ylabel 'time [s]'\n"
    << "set logscale y\n"
    << "plot for [r=0:robots-1] $records using (($1+1)*steps):($2==r ? $7 : 1/0) with lines title sprintf('robot %d', r)\n"
    << "unset multiplot\n";
  return s.str();
}

void emit_plot_script(const std::filesystem::path& path, const std::vector<RoundRecord>& records,
                      int local_steps_per_round) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw ArgumentError("cannot write plot script '" + path.string() + "'");
  out << plot_script(records, local_steps_per_round, path.stem().string() + ".svg");
}

// ---- simulation ----

std::size_t sampling_rounds(const ScenarioConfig& cfg) {
  const auto n = static_cast<std::size_t>(cfg.samples_per_robot);
  const auto l = static_cast<std::size_t>(cfg.local_steps_per_round);
  return (n + l - 1) / l;
}

std::vector<CommGraph> planned_graphs(const ScenarioConfig& cfg,
                                      const std::vector<Trajectory>& trajectories) {
  const std::size_t rounds = sampling_rounds(cfg);
  const auto p = static_cast<Eigen::Index>(cfg.robots);
  std::vector<CommGraph> graphs;
  Points pos(p, cfg.dimension);
  for (std::size_t t = 0; t < rounds + static_cast<std::size_t>(cfg.settle_rounds); ++t) {
    const std::size_t step =
        std::min((std::min(t, rounds - 1) + 1) * static_cast<std::size_t>(cfg.local_steps_per_round),
                 static_cast<std::size_t>(cfg.samples_per_robot)) - 1;
    for (Eigen::Index r = 0; r < p; ++r) {
      pos.row(r) = trajectories[static_cast<std::size_t>(r)].positions.row(static_cast<Eigen::Index>(step));
    }
    graphs.push_back(graph_from_positions(pos, cfg.comm_range, static_cast<std::int64_t>(t)));
  }
  return graphs;
}

RunResult run_scenario(const ScenarioConfig& cfg, const RunOptions& options,
                       const RoundObserver& observer) {
  cfg.validate();
  const ScalarField field = build_field(cfg);
  RunResult result;
  result.trajectories = build_trajectories(cfg);
  result.grid = build_grid(cfg);
  result.truth = evaluate_on(field, result.grid);
  const Points& grid = result.grid;

  const std::size_t p = static_cast<std::size_t>(cfg.robots);
  const auto n = static_cast<std::size_t>(cfg.samples_per_robot);
  const double noise_sd = std::sqrt(cfg.kernel.noise_variance);
  const SparsityConfig scfg = sparsity_config(cfg, grid);

  std::vector<Robot> robots(p);
  for (std::size_t r = 0; r < p; ++r) {
    robots[r].rng.emplace(robot_seed(cfg.seed, static_cast<int>(r)));
    robots[r].position = result.trajectories[r].positions.row(0).transpose();
    robots[r].local_map = prior_map(grid, cfg.kernel);
  }
  std::vector<ConsensusState> states;
  std::vector<DistributedMap> distributed(p);
  std::vector<GaussianMap> served(p);
  bool have_distributed = false;

  const std::size_t rounds = sampling_rounds(cfg) + static_cast<std::size_t>(cfg.settle_rounds);
  for (std::size_t t = 0; t < rounds; ++t) {
    const bool sampling = t < sampling_rounds(cfg);
    const std::string round_tag = "round " + std::to_string(t);

    if (sampling) {
      for_each_robot(p, cfg.threads, [&](std::size_t r) {
        Robot& robot = robots[r];
        with_context("robot " + std::to_string(r) + ", " + round_tag, [&] {
          double compress_time = 0.0;
          for (int s = 0; s < cfg.local_steps_per_round && robot.next_step < n; ++s) {
            const auto step = robot.next_step++;
            robot.position = result.trajectories[r].positions.row(static_cast<Eigen::Index>(step)).transpose();
            const Observation obs = sample(field, robot.position, noise_sd, *robot.rng,
                                           static_cast<int>(r), static_cast<std::int64_t>(step));
            ingest(robot, obs, cfg.kernel, cfg.novelty_threshold);
            if (cfg.compression == CompressionMode::none || robot.data.size() <= cfg.budget) continue;
            const auto start = Clock::now();
            CompressResult cr;
            if (cfg.compression == CompressionMode::distributed && have_distributed) {
              cr = compress_in_place(robot.data, robot.state, served[r], scfg, cfg.kernel);
            } else {
              cr = compress_local_in_place(robot.data, robot.state, scfg);
            }
            compress_time += seconds_since(start);
            robot.multiplicity.erase(robot.multiplicity.begin() + static_cast<long>(cr.removed_index));
            robot.fallbacks += cr.fallbacks;
          }
          robot.compress_times.push_back(compress_time);
          const auto start = Clock::now();
          robot.local_map = predict(robot, cfg.kernel, grid, options.batch_prediction);
          robot.pred_times.push_back(seconds_since(start));
        });
      });
    }

    CommGraph graph;
    graph.robot_count = p;
    graph.timestamp = static_cast<std::int64_t>(t);
    if (options.communicate) {
      Points pos(static_cast<Eigen::Index>(p), cfg.dimension);
      for (std::size_t r = 0; r < p; ++r) pos.row(static_cast<Eigen::Index>(r)) = robots[r].position.transpose();
      graph = graph_from_positions(pos, cfg.comm_range, static_cast<std::int64_t>(t));
    }
    AdjacencyMatrix a;
    with_context(round_tag, [&] {
      a = weights_from_graph(graph, cfg.edge_weight, cfg.weight_floor);
      const auto report = check_doubly_stochastic(a, cfg.weight_floor);
      if (!report.ok) throw ArgumentError("weight matrix violates the stochasticity assumption: " + report.detail);
    });

    std::vector<ReferenceInput> refs(p);
    for (std::size_t r = 0; r < p; ++r) refs[r] = reference_input(robots[r].local_map, cfg.correction_variance);
    if (states.empty()) {
      for (std::size_t r = 0; r < p; ++r) states.push_back(ConsensusState::initialize(refs[r]));
    }
    const std::vector<ConsensusState> snapshot = states;
    for_each_robot(p, cfg.threads, [&](std::size_t r) {
      with_context("robot " + std::to_string(r) + ", " + round_tag, [&] {
        std::vector<const ConsensusState*> neighbors;
        std::vector<double> weights;
        for (std::size_t j : graph.neighbors(r)) {
          neighbors.push_back(&snapshot[j]);
          weights.push_back(a.weights(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(j)));
        }
        states[r] = consensus_step(snapshot[r], neighbors, weights, refs[r]);
        distributed[r] = recover_map(states[r], grid);
        served[r] = served_map(distributed[r], robots[r].local_map);
      });
    });
    have_distributed = true;
    for (const auto& d : distributed) result.transient_points += d.transient_count;

    std::vector<GaussianMap> local_maps;
    local_maps.reserve(p);
    for (const auto& robot : robots) local_maps.push_back(robot.local_map);
    result.poe = centralized_poe(local_maps, cfg.correction_variance);

    for (std::size_t r = 0; r < p; ++r) {
      RoundRecord rec;
      rec.round = static_cast<std::int64_t>(t);
      rec.robot_id = static_cast<int>(r);
      rec.rmse_local = rmse(robots[r].local_map.mean, result.truth);
      rec.rmse_distributed = rmse(served[r].mean, result.truth);
      rec.consensus_err_vs_poe = (distributed[r].map.mean - result.poe.mean).cwiseAbs().maxCoeff();
      rec.dataset_size = robots[r].data.size();
      rec.pred_time = window_median(robots[r].pred_times);
      rec.compress_time = window_median(robots[r].compress_times);
      result.records.push_back(rec);
    }
    result.graphs.push_back(graph);
    if (observer) {
      observer(RoundView{static_cast<std::int64_t>(t), sampling, local_maps, distributed, served,
                         result.poe, graph});
    }
  }

  result.rounds = rounds;
  for (auto& robot : robots) {
    result.datasets.push_back(robot.data);
    result.local_maps.push_back(robot.local_map);
    result.compress_fallbacks += robot.fallbacks;
    result.duplicates_merged += robot.duplicates;
  }
  result.distributed_maps = std::move(distributed);
  result.served_maps = std::move(served);
  return result;
}

void write_run_outputs(const std::filesystem::path& dir, const ScenarioConfig& cfg,
                       const RunResult& result) {
  std::error_code ec;
  std::filesystem::create_directories(dir, ec);
  if (ec) throw ArgumentError("cannot create output directory '" + dir.string() + "': " + ec.message());
  export_csv(dir / "records.csv", result.records);
  emit_plot_script(dir / "plot.gp", result.records, cfg.local_steps_per_round);
  {
    std::ofstream out(dir / "graph_trace.txt", std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + (dir / "graph_trace.txt").string() + "'");
    write_graph_trace(out, result.graphs);
  }
  write_field_grid_csv(dir / "truth_grid.csv", result.grid, result.truth);
  {
    std::ofstream out(dir / "maps.csv", std::ios::binary);
    if (!out) throw ArgumentError("cannot write '" + (dir / "maps.csv").string() + "'");
    out << "robot_id,x,y,mean_local,variance_local,mean_distributed,variance_distributed,transient\n";
    for (std::size_t r = 0; r < result.local_maps.size(); ++r) {
      const auto& local = result.local_maps[r];
      const auto& dist = result.distributed_maps[r];
      for (Eigen::Index i = 0; i < result.grid.rows(); ++i) {
        out << r << ',' << format_double(result.grid(i, 0)) << ','
            << format_double(result.grid.cols() > 1 ? result.grid(i, 1) : 0.0) << ','
            << format_double(local.mean[i]) << ',' << format_double(local.variance[i]) << ','
            << format_double(result.served_maps[r].mean[i]) << ','
            << format_double(result.served_maps[r].variance[i]) << ','
            << static_cast<int>(dist.transient[static_cast<std::size_t>(i)]) << '\n';
      }
    }
  }
  for (std::size_t r = 0; r < result.trajectories.size(); ++r) {
    write_trajectory_csv(dir / ("trajectory_" + std::to_string(r) + ".csv"), result.trajectories[r]);
  }
  std::ofstream out(dir / "config.json", std::ios::binary);
  if (!out) throw ArgumentError("cannot write '" + (dir / "config.json").string() + "'");
  out << config_to_json(cfg);
}

// ---- validation ----

ValidationReport validate_scenario(const ScenarioConfig& cfg) {
  cfg.validate();
  ValidationReport report;
  report.params.correction_variance = cfg.correction_variance;
  report.params.connectivity_period = cfg.connectivity_period;
  report.params.weight_floor = cfg.weight_floor;
  report.params.robot_count = cfg.robots;

  const auto trajectories = build_trajectories(cfg);
  const ScalarField field = build_field(cfg);

  const auto graphs = planned_graphs(cfg, trajectories);
  for (const auto& g : graphs) {
    try {
      const auto a = weights_from_graph(g, cfg.edge_weight, cfg.weight_floor);
      const auto check = check_doubly_stochastic(a, cfg.weight_floor);
      if (!check.ok) {
        report.weights_ok = false;
        report.errors.push_back("round " + std::to_string(g.timestamp) + ": " + check.detail);
        break;
      }
    } catch (const ArgumentError& e) {
      report.weights_ok = false;
      report.errors.push_back("round " + std::to_string(g.timestamp) + ": " + e.what());
      break;
    }
  }
  if (static_cast<int>(graphs.size()) < cfg.connectivity_period) {
    report.connectivity_ok = false;
    report.warnings.push_back("run has fewer rounds than the connectivity period");
  } else if (cfg.robots > 1 && !check_periodic_connectivity(graphs, cfg.connectivity_period)) {
    report.connectivity_ok = false;
    report.warnings.push_back("planned graphs are not strongly connected over every window of " +
                              std::to_string(cfg.connectivity_period) + " rounds");
  }

  if (cfg.y_bar) {
    report.y_bar = *cfg.y_bar;
  } else {
    std::vector<double> values;
    for (const auto& traj : trajectories) {
      for (Eigen::Index i = 0; i < traj.positions.rows(); ++i) values.push_back(field(traj.positions.row(i).transpose()));
    }
    report.y_bar = estimate_observation_bound(values);
    if (!(report.y_bar > 0.0)) report.y_bar = 1.0;
  }
  report.mu_bar = cfg.mu_bar.value_or(report.y_bar);
  report.bounds = error_bound_constants(cfg.kernel, report.params, report.y_bar, report.mu_bar);
  report.correction_rule_met = report.bounds.correction_rule_met(report.params);
  if (!report.correction_rule_met) {
    report.warnings.push_back("correction variance is below sigma_n_min; the asymptotic error bound is not guaranteed");
  }
  return report;
}

void print_validation(std::ostream& out, const ValidationReport& r) {
  auto num = [](double v) { return format_double(v); };
  out << "robots = " << r.params.robot_count << '\n'
      << "connectivity_period = " << r.params.connectivity_period << '\n'
      << "weight_floor = " << num(r.params.weight_floor) << '\n'
      << "y_bar = " << num(r.y_bar) << '\n'
      << "mu_bar = " << num(r.mu_bar) << '\n'
      << "eta = " << num(r.bounds.eta) << '\n'
      << "delta1_hat = " << num(r.bounds.delta1_hat) << '\n'
      << "delta2_hat = " << num(r.bounds.delta2_hat) << '\n'
      << "alpha = " << num(r.bounds.alpha) << '\n'
      << "beta = " << num(r.bounds.beta) << '\n'
      << "sigma_n_min = " << num(r.bounds.sigma_n_min) << '\n'
      << "correction_variance = " << num(r.params.correction_variance) << '\n'
      << "correction_rule_met = " << (r.correction_rule_met ? "true" : "false") << '\n'
      << "weights_ok = " << (r.weights_ok ? "true" : "false") << '\n'
      << "connectivity_ok = " << (r.connectivity_ok ? "true" : "false") << '\n';
  for (const auto& w : r.warnings) out << "warning: " << w << '\n';
  for (const auto& e : r.errors) out << "error: " << e << '\n';
}

// ---- variants ----

std::string to_string(Variant v) {
  switch (v) {
    case Variant::full_gpr: return "full_gpr";
    case Variant::recursive: return "recursive";
    case Variant::distributed_no_compress: return "distributed_no_compress";
    case Variant::local_compress: return "local_compress";
    case Variant::distributed_compress: return "distributed_compress";
  }
  return "unknown";
}

std::vector<Variant> all_variants() {
  return {Variant::full_gpr, Variant::recursive, Variant::distributed_no_compress,
          Variant::local_compress, Variant::distributed_compress};
}

ScenarioConfig variant_config(const ScenarioConfig& cfg, Variant v, RunOptions& options) {
  ScenarioConfig out = cfg;
  options = RunOptions{};
  switch (v) {
    case Variant::full_gpr:
      out.compression = CompressionMode::none;
      options.batch_prediction = true;
      break;
    case Variant::recursive:
      out.compression = CompressionMode::none;
      options.communicate = false;
      break;
    case Variant::distributed_no_compress:
      out.compression = CompressionMode::none;
      break;
    case Variant::local_compress:
      out.compression = CompressionMode::local;
      break;
    case Variant::distributed_compress:
      out.compression = CompressionMode::distributed;
      break;
  }
  return out;
}

VariantSummary summarize_variant(Variant v, const RunResult& result, double wall_time) {
  VariantSummary s;
  s.variant = v;
  s.wall_time = wall_time;
  if (result.records.empty()) return s;
  const bool local_only = v == Variant::recursive;
  const std::int64_t last = result.records.back().round;
  double final_sum = 0.0;
  double size_sum = 0.0;
  double all_sum = 0.0;
  std::size_t final_count = 0;
  std::vector<double> times;
  for (const auto& r : result.records) {
    const double e = local_only ? r.rmse_local : r.rmse_distributed;
    all_sum += e;
    times.push_back(r.pred_time);
    if (r.round == last) {
      final_sum += e;
      size_sum += static_cast<double>(r.dataset_size);
      ++final_count;
    }
  }
  s.final_rmse = final_sum / static_cast<double>(final_count);
  s.final_dataset_size = size_sum / static_cast<double>(final_count);
  s.mean_rmse = all_sum / static_cast<double>(result.records.size());
  s.median_pred_time = median(times);
  return s;
}

std::vector<VariantSummary> compare_variants(const ScenarioConfig& cfg) {
  std::vector<VariantSummary> rows;
  for (Variant v : all_variants()) {
    RunOptions options;
    const ScenarioConfig vc = variant_config(cfg, v, options);
    const auto start = Clock::now();
    const RunResult result = run_scenario(vc, options);
    rows.push_back(summarize_variant(v, result, seconds_since(start)));
  }
  return rows;
}

void print_comparison(std::ostream& out, const std::vector<VariantSummary>& rows) {
  out << std::left << std::setw(26) << "variant" << std::right << std::setw(14) << "final_rmse"
      << std::setw(14) << "mean_rmse" << std::setw(12) << "data_size" << std::setw(16)
      << "pred_time[s]" << std::setw(12) << "wall[s]" << '\n';
  for (const auto& r : rows) {
    out << std::left << std::setw(26) << to_string(r.variant) << std::right << std::fixed
        << std::setprecision(6) << std::setw(14) << r.final_rmse << std::setw(14) << r.mean_rmse
        << std::setprecision(1) << std::setw(12) << r.final_dataset_size << std::scientific
        << std::setprecision(3) << std::setw(16) << r.median_pred_time << std::fixed
        << std::setprecision(3) << std::setw(12) << r.wall_time << '\n';
    out.unsetf(std::ios::floatfield);
  }
}

// ---- oracle sweep ----

OracleReport oracle_sweep(const ScenarioConfig& cfg, std::ostream* log) {
  cfg.validate();
  const ScalarField field = build_field(cfg);
  const auto trajectories = build_trajectories(cfg);
  const Points grid = build_grid(cfg);
  const auto n = static_cast<std::size_t>(cfg.samples_per_robot);
  const std::size_t every = std::max<std::size_t>(1, n / 5);
  OracleReport report;
  for (std::size_t r = 0; r < trajectories.size(); ++r) {
    Robot robot;
    Rng rng(robot_seed(cfg.seed, static_cast<int>(r)));
    for (std::size_t step = 0; step < n; ++step) {
      const Observation obs = sample(field, trajectories[r].positions.row(static_cast<Eigen::Index>(step)).transpose(),
                                     std::sqrt(cfg.kernel.noise_variance), rng, static_cast<int>(r),
                                     static_cast<std::int64_t>(step));
      ingest(robot, obs, cfg.kernel, cfg.novelty_threshold);
      if ((step + 1) % every != 0 && step + 1 != n) continue;
      const GaussianMap rec = recursive_predict(robot.state, robot.data, cfg.kernel, grid);
      const GaussianMap batch = batch_predict(robot.data, cfg.kernel, grid);
      const StateResiduals res = state_residuals(robot.state, robot.data, cfg.kernel);
      const double dm = (rec.mean - batch.mean).cwiseAbs().maxCoeff();
      const double dv = (rec.variance - batch.variance).cwiseAbs().maxCoeff();
      report.max_mean_diff = std::max(report.max_mean_diff, dm);
      report.max_variance_diff = std::max(report.max_variance_diff, dv);
      report.max_q_identity = std::max(report.max_q_identity, res.q_identity);
      report.max_c_identity = std::max(report.max_c_identity, res.c_identity);
      ++report.checkpoints;
      if (log) {
        *log << "robot " << r << " samples " << step + 1 << " size " << robot.data.size()
             << ": mean_diff " << dm << " variance_diff " << dv << " q_identity "
             << res.q_identity << " c_identity " << res.c_identity << '\n';
      }
    }
  }
  return report;
}

// ---- timing ----

std::vector<TimingPoint> timing_profile(const ScenarioConfig& cfg,
                                        const std::vector<std::size_t>& checkpoints,
                                        bool compress) {
  cfg.validate();
  if (checkpoints.empty()) return {};
  const ScalarField field = build_field(cfg);
  const Points grid = build_grid(cfg);
  const SparsityConfig scfg = sparsity_config(cfg, grid);
  const std::size_t last = *std::max_element(checkpoints.begin(), checkpoints.end());
  constexpr std::size_t kWindow = 10;

  Robot robot;
  Rng rng(robot_seed(cfg.seed, 0));
  const auto dim = cfg.workspace.lower.size();
  GaussianMap dist_map = prior_map(grid, cfg.kernel);
  std::vector<TimingPoint> out;
  std::vector<double> pred;
  std::vector<double> comp;
  for (std::size_t step = 1; step <= last; ++step) {
    Eigen::VectorXd x(dim);
    for (Eigen::Index d = 0; d < dim; ++d) {
      x[d] = cfg.workspace.lower[d] + rng.uniform() * (cfg.workspace.upper[d] - cfg.workspace.lower[d]);
    }
    ingest(robot, sample(field, x, std::sqrt(cfg.kernel.noise_variance), rng, 0,
                         static_cast<std::int64_t>(step)),
           cfg.kernel, cfg.novelty_threshold);
    double compress_time = 0.0;
    if (compress && robot.data.size() > cfg.budget) {
      const auto start = Clock::now();
      const auto cr = cfg.compression == CompressionMode::distributed
                          ? compress_in_place(robot.data, robot.state, dist_map, scfg, cfg.kernel)
                          : compress_local_in_place(robot.data, robot.state, scfg);
      compress_time = seconds_since(start);
      robot.multiplicity.erase(robot.multiplicity.begin() + static_cast<long>(cr.removed_index));
    }
    const bool in_window = std::any_of(checkpoints.begin(), checkpoints.end(), [&](std::size_t c) {
      return step <= c && step + kWindow > c;
    });
    if (!in_window && !compress) continue;
    const auto start = Clock::now();
    const GaussianMap local = recursive_predict(robot.state, robot.data, cfg.kernel, grid);
    const double pred_time = seconds_since(start);
    if (compress) {
      // A lone robot's consensus fixed point is its own map shifted by the correction variance.
      dist_map = local;
      dist_map.variance.array() += cfg.correction_variance;
    }
    if (!in_window) continue;
    pred.push_back(pred_time);
    comp.push_back(compress_time);
    if (std::find(checkpoints.begin(), checkpoints.end(), step) != checkpoints.end()) {
      TimingPoint tp;
      tp.samples = step;
      tp.dataset_size = robot.data.size();
      tp.median_pred_time = window_median(pred, kWindow);
      tp.median_compress_time = window_median(comp, kWindow);
      out.push_back(tp);
    }
  }
  std::sort(out.begin(), out.end(), [](const TimingPoint& a, const TimingPoint& b) { return a.samples < b.samples; });
  return out;
}

}  // namespace dsgp
