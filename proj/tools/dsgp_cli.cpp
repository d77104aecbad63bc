// Command-line front end: run, validate, compare and oracle over a scenario config.

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>

#include <CLI11.hpp>

#include "dsgp/config.hpp"
#include "dsgp/errors.hpp"
#include "dsgp/harness.hpp"

namespace {

constexpr int kExitOk = 0;
constexpr int kExitValidation = 1;
constexpr int kExitNumerical = 2;
constexpr int kExitUsage = 64;

struct Overrides {
  std::optional<std::uint64_t> seed;
  std::optional<std::string> out_dir;
  std::optional<std::string> br_sign;
  std::optional<int> threads;
};

dsgp::ScenarioConfig load(const std::string& path, const Overrides& o) {
  auto cfg = dsgp::load_config(path);
  if (o.seed) cfg.seed = *o.seed;
  if (o.out_dir) cfg.out_dir = *o.out_dir;
  if (o.br_sign) cfg.br_sign = dsgp::parse_br_sign(*o.br_sign);
  if (o.threads) cfg.threads = *o.threads;
  cfg.validate();
  return cfg;
}

/// Prints warnings; returns false (after printing) when the scenario cannot run.
bool preflight(const dsgp::ScenarioConfig& cfg) {
  const auto report = dsgp::validate_scenario(cfg);
  for (const auto& w : report.warnings) std::cerr << "warning: " << w << '\n';
  for (const auto& e : report.errors) std::cerr << "error: " << e << '\n';
  return report.ok();
}

int cmd_run(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  if (!preflight(cfg)) return kExitValidation;
  const auto result = dsgp::run_scenario(cfg);
  dsgp::write_run_outputs(cfg.out_dir, cfg, result);
  double local = 0.0;
  double dist = 0.0;
  std::size_t count = 0;
  for (const auto& r : result.records) {
    if (r.round + 1 != static_cast<std::int64_t>(result.rounds)) continue;
    local += r.rmse_local;
    dist += r.rmse_distributed;
    ++count;
  }
  std::printf("%s: %zu rounds, final mean rmse local %.6g distributed %.6g, outputs in %s\n",
              cfg.name.c_str(), result.rounds, local / static_cast<double>(count),
              dist / static_cast<double>(count), cfg.out_dir.c_str());
  if (result.transient_points > 0) {
    std::printf("consensus transients: %zu grid points served from local maps\n", result.transient_points);
  }
  if (result.compress_fallbacks > 0) {
    std::printf("compression skipped %zu singular candidates\n", result.compress_fallbacks);
  }
  return kExitOk;
}

int cmd_validate(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto report = dsgp::validate_scenario(cfg);
  dsgp::print_validation(std::cout, report);
  return report.ok() ? kExitOk : kExitValidation;
}

int cmd_compare(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  if (!preflight(cfg)) return kExitValidation;
  const auto rows = dsgp::compare_variants(cfg);
  dsgp::print_comparison(std::cout, rows);
  if (o.out_dir) {
    std::filesystem::create_directories(*o.out_dir);
    const auto file = std::filesystem::path(*o.out_dir) / "compare.csv";
    std::ofstream out(file);
    if (!out) throw dsgp::ArgumentError("cannot write '" + file.string() + "'");
    out << "variant,final_rmse,mean_rmse,final_dataset_size,median_pred_time,wall_time\n";
    out.precision(17);
    for (const auto& r : rows) {
      out << dsgp::to_string(r.variant) << ',' << r.final_rmse << ',' << r.mean_rmse << ','
          << r.final_dataset_size << ',' << r.median_pred_time << ',' << r.wall_time << '\n';
    }
  }
  return kExitOk;
}

int cmd_oracle(const std::string& path, const Overrides& o) {
  const auto cfg = load(path, o);
  const auto report = dsgp::oracle_sweep(cfg, &std::cout);
  std::printf("checkpoints %zu max mean diff %.3e max variance diff %.3e: %s\n", report.checkpoints,
              report.max_mean_diff, report.max_variance_diff, report.pass() ? "PASS" : "FAIL");
  return report.pass() ? kExitOk : kExitNumerical;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Distributed sparse online GP field mapping simulator"};
  app.fallthrough();
  Overrides o;
  std::uint64_t seed = 0;
  std::string out_dir;
  std::string br_sign;
  int threads = 1;
  auto* seed_opt = app.add_option("--seed", seed, "Override the scenario seed");
  auto* out_opt = app.add_option("--out-dir", out_dir, "Override the output directory");
  auto* sign_opt = app.add_option("--br-sign", br_sign, "Distance term sign: paper or inverted")
                       ->check(CLI::IsMember({"paper", "inverted"}));
  auto* threads_opt = app.add_option("--threads", threads, "Worker threads per round")
                          ->check(CLI::PositiveNumber);

  std::string config;
  auto* run = app.add_subcommand("run", "Run the full scenario and write outputs");
  auto* validate = app.add_subcommand("validate", "Check assumptions and print bound constants");
  auto* compare = app.add_subcommand("compare", "Run the five method variants and tabulate them");
  auto* oracle = app.add_subcommand("oracle", "Recursive versus batch equivalence sweep");
  for (auto* sub : {run, validate, compare, oracle}) {
    sub->add_option("config", config, "Scenario config (.json or .toml)")->required();
  }

  app.require_subcommand(1);

  if (argc > 1 && argv[1][0] != '-') {
    const std::string first = argv[1];
    if (first != "run" && first != "validate" && first != "compare" && first != "oracle") {
      std::cerr << "unknown subcommand '" << first << "'\n\n" << app.help();
      return kExitUsage;
    }
  }

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    // Unknown subcommands and malformed arguments both land here.
    std::cerr << e.what() << "\n\n" << app.help();
    return kExitUsage;
  }
  if (*seed_opt) o.seed = seed;
  if (*out_opt) o.out_dir = out_dir;
  if (*sign_opt) o.br_sign = br_sign;
  if (*threads_opt) o.threads = threads;

  try {
    if (*run) return cmd_run(config, o);
    if (*validate) return cmd_validate(config, o);
    if (*compare) return cmd_compare(config, o);
    if (*oracle) return cmd_oracle(config, o);
  } catch (const dsgp::NumericalError& e) {
    std::cerr << "numerical error: " << e.what() << '\n';
    return kExitNumerical;
  } catch (const dsgp::ArgumentError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return kExitValidation;
  }
  std::cerr << app.help();
  return kExitUsage;
}
