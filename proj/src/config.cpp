#include "dsgp/config.hpp"

#include <cmath>
#include <fstream>
#include <set>
#include <sstream>

#include <nlohmann/json.hpp>

#include "dsgp/errors.hpp"

namespace dsgp {

using nlohmann::json;

namespace {

const std::set<std::string>& known_keys() {
  static const std::set<std::string> keys{
      "name", "dimension", "workspace_min", "workspace_max", "field", "field_bumps",
      "field_csv", "robots", "trajectory", "trajectory_starts", "trajectory_ends",
      "lawnmower_rows", "trajectory_csv", "samples_per_robot", "signal_variance",
      "length_scales", "noise_variance", "correction_variance", "k_phi", "budget",
      "compression", "removal_rule", "br_sign", "eval_grid_stride", "novelty_threshold", "comm_range",
      "edge_weight", "connectivity_period", "weight_floor", "local_steps_per_round",
      "settle_rounds", "grid_resolution", "seed", "y_bar", "mu_bar", "threads", "out_dir"};
  return keys;
}

std::vector<double> number_list(const json& v, const std::string& key) {
  if (!v.is_array()) throw ArgumentError("config key '" + key + "' must be an array of numbers");
  std::vector<double> out;
  for (const auto& e : v) {
    if (!e.is_number()) throw ArgumentError("config key '" + key + "' must hold numbers only");
    out.push_back(e.get<double>());
  }
  return out;
}

double number(const json& v, const std::string& key) {
  if (!v.is_number()) throw ArgumentError("config key '" + key + "' must be a number");
  return v.get<double>();
}

long long integer(const json& v, const std::string& key) {
  const double d = number(v, key);
  if (d != std::floor(d)) throw ArgumentError("config key '" + key + "' must be an integer");
  return static_cast<long long>(d);
}

std::string text(const json& v, const std::string& key) {
  if (!v.is_string()) throw ArgumentError("config key '" + key + "' must be a string");
  return v.get<std::string>();
}

Eigen::VectorXd to_vector(const std::vector<double>& v) {
  return Eigen::Map<const Eigen::VectorXd>(v.data(), static_cast<Eigen::Index>(v.size()));
}

/// Splits a flat list into consecutive chunks of `stride` values.
std::vector<Eigen::VectorXd> chunk(const std::vector<double>& flat, int stride,
                                   const std::string& key) {
  if (stride <= 0 || flat.size() % static_cast<std::size_t>(stride) != 0) {
    throw ArgumentError("config key '" + key + "' length must be a multiple of " +
                        std::to_string(stride));
  }
  std::vector<Eigen::VectorXd> out;
  for (std::size_t i = 0; i < flat.size(); i += static_cast<std::size_t>(stride)) {
    out.push_back(to_vector(std::vector<double>(flat.begin() + static_cast<long>(i),
                                                flat.begin() + static_cast<long>(i) + stride)));
  }
  return out;
}

ScenarioConfig from_flat(const json& doc) {
  if (!doc.is_object()) throw ArgumentError("config must be a flat key/value object");
  for (const auto& [key, _] : doc.items()) {
    if (!known_keys().count(key)) throw ArgumentError("unknown config key '" + key + "'");
  }
  ScenarioConfig cfg;
  auto has = [&](const char* k) { return doc.contains(k); };
  if (has("name")) cfg.name = text(doc["name"], "name");
  if (has("dimension")) cfg.dimension = static_cast<int>(integer(doc["dimension"], "dimension"));
  if (cfg.dimension < 1 || cfg.dimension > 2) throw ArgumentError("dimension must be 1 or 2");

  if (has("workspace_min")) cfg.workspace.lower = to_vector(number_list(doc["workspace_min"], "workspace_min"));
  if (has("workspace_max")) cfg.workspace.upper = to_vector(number_list(doc["workspace_max"], "workspace_max"));

  if (has("field")) {
    const auto f = text(doc["field"], "field");
    if (f == "toy_1d") cfg.field_kind = FieldKind::toy_1d;
    else if (f == "gaussian_mixture_2d") cfg.field_kind = FieldKind::gaussian_mixture_2d;
    else if (f == "tabulated_grid") cfg.field_kind = FieldKind::tabulated_grid;
    else throw ArgumentError("unknown field kind '" + f + "'");
  }
  if (has("field_bumps")) {
    // Each bump is center (dimension values), amplitude, width.
    const auto flat = number_list(doc["field_bumps"], "field_bumps");
    for (const auto& b : chunk(flat, cfg.dimension + 2, "field_bumps")) {
      cfg.field_bumps.push_back({b.head(cfg.dimension), b[cfg.dimension], b[cfg.dimension + 1]});
    }
  }
  if (has("field_csv")) cfg.field_csv = text(doc["field_csv"], "field_csv");

  if (has("robots")) cfg.robots = static_cast<int>(integer(doc["robots"], "robots"));
  if (has("trajectory")) {
    const auto t = text(doc["trajectory"], "trajectory");
    if (t == "linear") cfg.trajectory = TrajectoryKind::linear;
    else if (t == "lawnmower") cfg.trajectory = TrajectoryKind::lawnmower;
    else if (t == "csv") cfg.trajectory = TrajectoryKind::csv;
    else throw ArgumentError("unknown trajectory kind '" + t + "'");
  }
  if (has("trajectory_starts")) {
    cfg.trajectory_starts = chunk(number_list(doc["trajectory_starts"], "trajectory_starts"),
                                  cfg.dimension, "trajectory_starts");
  }
  if (has("trajectory_ends")) {
    cfg.trajectory_ends = chunk(number_list(doc["trajectory_ends"], "trajectory_ends"),
                                cfg.dimension, "trajectory_ends");
  }
  if (has("lawnmower_rows")) cfg.lawnmower_rows = static_cast<int>(integer(doc["lawnmower_rows"], "lawnmower_rows"));
  if (has("trajectory_csv")) {
    const auto& v = doc["trajectory_csv"];
    if (!v.is_array()) throw ArgumentError("config key 'trajectory_csv' must be an array of paths");
    for (const auto& e : v) cfg.trajectory_csv.push_back(text(e, "trajectory_csv"));
  }
  if (has("samples_per_robot")) cfg.samples_per_robot = static_cast<int>(integer(doc["samples_per_robot"], "samples_per_robot"));

  if (has("signal_variance")) cfg.kernel.signal_variance = number(doc["signal_variance"], "signal_variance");
  if (has("length_scales")) cfg.kernel.length_scales = to_vector(number_list(doc["length_scales"], "length_scales"));
  if (has("noise_variance")) cfg.kernel.noise_variance = number(doc["noise_variance"], "noise_variance");
  if (has("correction_variance")) cfg.correction_variance = number(doc["correction_variance"], "correction_variance");
  if (has("k_phi")) cfg.k_phi = number(doc["k_phi"], "k_phi");
  if (has("budget")) {
    const auto b = integer(doc["budget"], "budget");
    if (b < 1) throw ArgumentError("budget must be >= 1");
    cfg.budget = static_cast<std::size_t>(b);
  }
  if (has("compression")) {
    const auto c = text(doc["compression"], "compression");
    if (c == "distributed") cfg.compression = CompressionMode::distributed;
    else if (c == "local") cfg.compression = CompressionMode::local;
    else if (c == "none") cfg.compression = CompressionMode::none;
    else throw ArgumentError("unknown compression mode '" + c + "'");
  }
  if (has("removal_rule")) {
    const auto r = text(doc["removal_rule"], "removal_rule");
    if (r == "exact") cfg.removal_rule = RemovalRule::exact;
    else if (r == "projected") cfg.removal_rule = RemovalRule::projected;
    else throw ArgumentError("unknown removal rule '" + r + "'");
  }
  if (has("br_sign")) cfg.br_sign = parse_br_sign(text(doc["br_sign"], "br_sign"));
  if (has("eval_grid_stride")) cfg.eval_grid_stride = static_cast<int>(integer(doc["eval_grid_stride"], "eval_grid_stride"));

  if (has("novelty_threshold")) cfg.novelty_threshold = number(doc["novelty_threshold"], "novelty_threshold");
  if (has("comm_range")) cfg.comm_range = number(doc["comm_range"], "comm_range");
  if (has("edge_weight")) cfg.edge_weight = number(doc["edge_weight"], "edge_weight");
  if (has("connectivity_period")) cfg.connectivity_period = static_cast<int>(integer(doc["connectivity_period"], "connectivity_period"));
  if (has("weight_floor")) cfg.weight_floor = number(doc["weight_floor"], "weight_floor");
  if (has("local_steps_per_round")) cfg.local_steps_per_round = static_cast<int>(integer(doc["local_steps_per_round"], "local_steps_per_round"));
  if (has("settle_rounds")) cfg.settle_rounds = static_cast<int>(integer(doc["settle_rounds"], "settle_rounds"));

  if (has("grid_resolution")) {
    cfg.grid_resolution.clear();
    for (double r : number_list(doc["grid_resolution"], "grid_resolution")) {
      if (r != std::floor(r)) throw ArgumentError("grid_resolution entries must be integers");
      cfg.grid_resolution.push_back(static_cast<int>(r));
    }
  }
  if (has("seed")) {
    const auto& s = doc["seed"];
    if (!s.is_number_integer()) throw ArgumentError("config key 'seed' must be a non-negative integer");
    if (s.is_number_unsigned()) cfg.seed = s.get<std::uint64_t>();
    else if (s.get<long long>() >= 0) cfg.seed = static_cast<std::uint64_t>(s.get<long long>());
    else throw ArgumentError("config key 'seed' must be a non-negative integer");
  }
  if (has("y_bar")) cfg.y_bar = number(doc["y_bar"], "y_bar");
  if (has("mu_bar")) cfg.mu_bar = number(doc["mu_bar"], "mu_bar");
  if (has("threads")) cfg.threads = static_cast<int>(integer(doc["threads"], "threads"));
  if (has("out_dir")) cfg.out_dir = text(doc["out_dir"], "out_dir");

  if (cfg.workspace.lower.size() == 0) {
    cfg.workspace.lower = Eigen::VectorXd::Zero(cfg.dimension);
  }
  if (cfg.workspace.upper.size() == 0) {
    cfg.workspace.upper = Eigen::VectorXd::Ones(cfg.dimension);
  }
  if (!has("length_scales")) cfg.kernel.length_scales = Eigen::VectorXd::Ones(cfg.dimension);
  if (!has("grid_resolution")) cfg.grid_resolution.assign(static_cast<std::size_t>(cfg.dimension), 50);
  cfg.validate();
  return cfg;
}

// ---- flat TOML subset ----

std::string strip_comment(const std::string& line) {
  bool in_string = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    if (line[i] == '"' && (i == 0 || line[i - 1] != '\\')) in_string = !in_string;
    if (line[i] == '#' && !in_string) return line.substr(0, i);
  }
  return line;
}

std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

json toml_scalar(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty()) throw ArgumentError("toml line " + std::to_string(line_no) + ": missing value");
  if (v == "true") return true;
  if (v == "false") return false;
  if (v.front() == '"') {
    if (v.size() < 2 || v.back() != '"') {
      throw ArgumentError("toml line " + std::to_string(line_no) + ": unterminated string");
    }
    // TOML basic strings share JSON's escape rules for everything this schema uses.
    return json::parse(v);
  }
  std::string digits;
  for (char c : v) {
    if (c != '_') digits.push_back(c);
  }
  try {
    std::size_t used = 0;
    if (digits.find_first_of(".eEinfa") == std::string::npos) {
      const long long i = std::stoll(digits, &used);
      if (used == digits.size()) return i;
    } else {
      const double d = std::stod(digits, &used);
      if (used == digits.size()) return d;
    }
  } catch (const std::exception&) {
  }
  throw ArgumentError("toml line " + std::to_string(line_no) + ": cannot parse value '" + v + "'");
}

json toml_value(const std::string& raw, int line_no) {
  const std::string v = trim(raw);
  if (v.empty() || v.front() != '[') return toml_scalar(v, line_no);
  if (v.back() != ']') {
    throw ArgumentError("toml line " + std::to_string(line_no) + ": arrays must close on the same line");
  }
  json arr = json::array();
  std::string item;
  bool in_string = false;
  for (std::size_t i = 1; i + 1 < v.size(); ++i) {
    const char c = v[i];
    if (c == '"' && v[i - 1] != '\\') in_string = !in_string;
    if (c == '[' && !in_string) {
      throw ArgumentError("toml line " + std::to_string(line_no) + ": nested arrays are not supported");
    }
    if (c == ',' && !in_string) {
      if (!trim(item).empty()) arr.push_back(toml_scalar(item, line_no));
      item.clear();
    } else {
      item.push_back(c);
    }
  }
  if (!trim(item).empty()) arr.push_back(toml_scalar(item, line_no));
  return arr;
}

}  // namespace

void ScenarioConfig::validate() const {
  const auto d = static_cast<Eigen::Index>(dimension);
  if (workspace.lower.size() != d || workspace.upper.size() != d) {
    throw ArgumentError("workspace bounds must have " + std::to_string(dimension) + " entries");
  }
  for (Eigen::Index i = 0; i < d; ++i) {
    if (!(workspace.lower[i] < workspace.upper[i])) {
      throw ArgumentError("workspace_min must be below workspace_max on every axis");
    }
  }
  kernel.validate();
  if (kernel.dimension() != d) throw ArgumentError("length_scales must have one entry per axis");
  if (field_kind == FieldKind::toy_1d && dimension != 1) throw ArgumentError("toy_1d field needs dimension 1");
  if (field_kind != FieldKind::toy_1d && dimension != 2) throw ArgumentError("2-D field kinds need dimension 2");
  if (field_kind == FieldKind::tabulated_grid && field_csv.empty()) {
    throw ArgumentError("tabulated_grid field needs field_csv");
  }
  for (const auto& b : field_bumps) {
    if (!(b.width > 0.0)) throw ArgumentError("field bump widths must be positive");
  }
  if (robots < 1) throw ArgumentError("robots must be >= 1");
  if (samples_per_robot < 2) throw ArgumentError("samples_per_robot must be >= 2");
  const auto p = static_cast<std::size_t>(robots);
  switch (trajectory) {
    case TrajectoryKind::linear:
      if (trajectory_starts.size() != p || trajectory_ends.size() != p) {
        throw ArgumentError("linear trajectories need one start and one end per robot");
      }
      break;
    case TrajectoryKind::lawnmower:
      if (dimension != 2) throw ArgumentError("lawnmower trajectories need dimension 2");
      if (lawnmower_rows < 1 || samples_per_robot < lawnmower_rows) {
        throw ArgumentError("lawnmower needs rows >= 1 and samples_per_robot >= rows");
      }
      break;
    case TrajectoryKind::csv:
      if (trajectory_csv.size() != p) throw ArgumentError("csv trajectories need one file per robot");
      break;
  }
  if (!(correction_variance > 0.0) || !std::isfinite(correction_variance)) {
    throw ArgumentError("correction_variance must be positive");
  }
  if (!(k_phi > 0.0 && k_phi < 1.0)) throw ArgumentError("k_phi must lie in (0, 1)");
  if (budget < 1) throw ArgumentError("budget must be >= 1");
  if (eval_grid_stride < 1) throw ArgumentError("eval_grid_stride must be >= 1");
  if (!(novelty_threshold >= 0.0 && novelty_threshold < 1.0)) {
    throw ArgumentError("novelty_threshold must lie in [0, 1)");
  }
  if (!(comm_range > 0.0)) throw ArgumentError("comm_range must be positive");
  if (!(edge_weight >= 0.0 && edge_weight <= 1.0)) throw ArgumentError("edge_weight must lie in [0, 1]");
  if (connectivity_period < 1) throw ArgumentError("connectivity_period must be >= 1");
  if (!(weight_floor > 0.0 && weight_floor <= 1.0)) throw ArgumentError("weight_floor must lie in (0, 1]");
  if (local_steps_per_round < 1) throw ArgumentError("local_steps_per_round must be >= 1");
  if (settle_rounds < 0) throw ArgumentError("settle_rounds must be >= 0");
  if (grid_resolution.size() != static_cast<std::size_t>(dimension)) {
    throw ArgumentError("grid_resolution must have one entry per axis");
  }
  for (int r : grid_resolution) {
    if (r < 1) throw ArgumentError("grid_resolution entries must be >= 1");
  }
  if (y_bar && !(*y_bar > 0.0)) throw ArgumentError("y_bar must be positive");
  if (mu_bar && !(*mu_bar > 0.0)) throw ArgumentError("mu_bar must be positive");
  if (threads < 1) throw ArgumentError("threads must be >= 1");
}

ScenarioConfig parse_config_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& e) {
    throw ArgumentError(std::string("config is not valid JSON: ") + e.what());
  }
  return from_flat(doc);
}

ScenarioConfig parse_config_toml(const std::string& text) {
  json doc = json::object();
  std::istringstream in(text);
  std::string line;
  int line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    const std::string body = trim(strip_comment(line));
    if (body.empty()) continue;
    if (body.front() == '[') {
      throw ArgumentError("toml line " + std::to_string(line_no) +
                          ": tables are not supported, keys are flat");
    }
    const auto eq = body.find('=');
    if (eq == std::string::npos) {
      throw ArgumentError("toml line " + std::to_string(line_no) + ": expected key = value");
    }
    std::string key = trim(body.substr(0, eq));
    if (key.size() >= 2 && key.front() == '"' && key.back() == '"') key = key.substr(1, key.size() - 2);
    if (doc.contains(key)) {
      throw ArgumentError("toml line " + std::to_string(line_no) + ": duplicate key '" + key + "'");
    }
    doc[key] = toml_value(body.substr(eq + 1), line_no);
  }
  return from_flat(doc);
}

ScenarioConfig load_config(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open config '" + path.string() + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  const auto ext = path.extension().string();
  ScenarioConfig cfg;
  try {
    if (ext == ".toml") cfg = parse_config_toml(ss.str());
    else if (ext == ".json") cfg = parse_config_json(ss.str());
    else throw ArgumentError("config extension must be .json or .toml");
  } catch (const ArgumentError& e) {
    throw ArgumentError(path.string() + ": " + e.what());
  }
  cfg.base_dir = path.parent_path();
  return cfg;
}

std::string config_to_json(const ScenarioConfig& cfg) {
  auto vec = [](const Eigen::VectorXd& v) {
    return std::vector<double>(v.data(), v.data() + v.size());
  };
  auto flatten = [&](const std::vector<Eigen::VectorXd>& vs) {
    std::vector<double> out;
    for (const auto& v : vs) {
      const auto part = vec(v);
      out.insert(out.end(), part.begin(), part.end());
    }
    return out;
  };
  json doc;
  doc["name"] = cfg.name;
  doc["dimension"] = cfg.dimension;
  doc["workspace_min"] = vec(cfg.workspace.lower);
  doc["workspace_max"] = vec(cfg.workspace.upper);
  switch (cfg.field_kind) {
    case FieldKind::toy_1d: doc["field"] = "toy_1d"; break;
    case FieldKind::gaussian_mixture_2d: doc["field"] = "gaussian_mixture_2d"; break;
    case FieldKind::tabulated_grid: doc["field"] = "tabulated_grid"; break;
  }
  std::vector<double> bumps;
  for (const auto& b : cfg.field_bumps) {
    const auto c = vec(b.center);
    bumps.insert(bumps.end(), c.begin(), c.end());
    bumps.push_back(b.amplitude);
    bumps.push_back(b.width);
  }
  if (!bumps.empty()) doc["field_bumps"] = bumps;
  if (!cfg.field_csv.empty()) doc["field_csv"] = cfg.field_csv;
  doc["robots"] = cfg.robots;
  switch (cfg.trajectory) {
    case TrajectoryKind::linear: doc["trajectory"] = "linear"; break;
    case TrajectoryKind::lawnmower: doc["trajectory"] = "lawnmower"; break;
    case TrajectoryKind::csv: doc["trajectory"] = "csv"; break;
  }
  if (!cfg.trajectory_starts.empty()) doc["trajectory_starts"] = flatten(cfg.trajectory_starts);
  if (!cfg.trajectory_ends.empty()) doc["trajectory_ends"] = flatten(cfg.trajectory_ends);
  doc["lawnmower_rows"] = cfg.lawnmower_rows;
  if (!cfg.trajectory_csv.empty()) doc["trajectory_csv"] = cfg.trajectory_csv;
  doc["samples_per_robot"] = cfg.samples_per_robot;
  doc["signal_variance"] = cfg.kernel.signal_variance;
  doc["length_scales"] = vec(cfg.kernel.length_scales);
  doc["noise_variance"] = cfg.kernel.noise_variance;
  doc["correction_variance"] = cfg.correction_variance;
  doc["k_phi"] = cfg.k_phi;
  doc["budget"] = cfg.budget;
  doc["compression"] = to_string(cfg.compression);
  doc["removal_rule"] = to_string(cfg.removal_rule);
  doc["br_sign"] = to_string(cfg.br_sign);
  doc["eval_grid_stride"] = cfg.eval_grid_stride;
  doc["novelty_threshold"] = cfg.novelty_threshold;
  doc["comm_range"] = cfg.comm_range;
  doc["edge_weight"] = cfg.edge_weight;
  doc["connectivity_period"] = cfg.connectivity_period;
  doc["weight_floor"] = cfg.weight_floor;
  doc["local_steps_per_round"] = cfg.local_steps_per_round;
  doc["settle_rounds"] = cfg.settle_rounds;
  doc["grid_resolution"] = cfg.grid_resolution;
  doc["seed"] = cfg.seed;
  if (cfg.y_bar) doc["y_bar"] = *cfg.y_bar;
  if (cfg.mu_bar) doc["mu_bar"] = *cfg.mu_bar;
  doc["threads"] = cfg.threads;
  doc["out_dir"] = cfg.out_dir;
  return doc.dump(2) + "\n";
}

BrSign parse_br_sign(const std::string& s) {
  if (s == "paper") return BrSign::paper;
  if (s == "inverted") return BrSign::inverted;
  throw ArgumentError("br_sign must be 'paper' or 'inverted', got '" + s + "'");
}

std::string to_string(BrSign s) { return s == BrSign::paper ? "paper" : "inverted"; }

std::string to_string(CompressionMode m) {
  switch (m) {
    case CompressionMode::distributed: return "distributed";
    case CompressionMode::local: return "local";
    case CompressionMode::none: return "none";
  }
  return "none";
}

std::string to_string(RemovalRule r) { return r == RemovalRule::exact ? "exact" : "projected"; }

ScalarField build_field(const ScenarioConfig& cfg) {
  switch (cfg.field_kind) {
    case FieldKind::toy_1d:
      return ScalarField(ToyField{});
    case FieldKind::gaussian_mixture_2d:
      if (cfg.field_bumps.empty()) return two_lamp_field();
      return ScalarField(GaussianMixtureField{cfg.field_bumps});
    case FieldKind::tabulated_grid: {
      std::filesystem::path p(cfg.field_csv);
      if (p.is_relative()) p = cfg.base_dir / p;
      return ScalarField(TabulatedField::from_csv(p));
    }
  }
  throw ArgumentError("unknown field kind");
}

std::vector<Trajectory> build_trajectories(const ScenarioConfig& cfg) {
  std::vector<Trajectory> out;
  const auto n = static_cast<std::size_t>(cfg.samples_per_robot);
  switch (cfg.trajectory) {
    case TrajectoryKind::linear:
      for (int r = 0; r < cfg.robots; ++r) {
        out.push_back(linear_sweep(cfg.trajectory_starts[static_cast<std::size_t>(r)],
                                   cfg.trajectory_ends[static_cast<std::size_t>(r)], n));
      }
      break;
    case TrajectoryKind::lawnmower: {
      // Robot r sweeps horizontal band r of the workspace.
      const double y0 = cfg.workspace.lower[1];
      const double band = (cfg.workspace.upper[1] - y0) / cfg.robots;
      for (int r = 0; r < cfg.robots; ++r) {
        Workspace ws{cfg.workspace.lower, cfg.workspace.upper};
        ws.lower[1] = y0 + band * r;
        ws.upper[1] = y0 + band * (r + 1);
        out.push_back(lawnmower(ws, static_cast<std::size_t>(cfg.lawnmower_rows), n));
      }
      break;
    }
    case TrajectoryKind::csv:
      for (const auto& file : cfg.trajectory_csv) {
        std::filesystem::path p(file);
        if (p.is_relative()) p = cfg.base_dir / p;
        auto traj = read_trajectory_csv(p, cfg.dimension);
        if (traj.size() != n) {
          throw ArgumentError(p.string() + ": expected " + std::to_string(n) + " positions, found " +
                              std::to_string(traj.size()));
        }
        out.push_back(std::move(traj));
      }
      break;
  }
  for (std::size_t r = 0; r < out.size(); ++r) {
    for (Eigen::Index i = 0; i < out[r].positions.rows(); ++i) {
      if (!cfg.workspace.contains(out[r].positions.row(i).transpose())) {
        throw ArgumentError("trajectory of robot " + std::to_string(r) + " leaves the workspace at step " +
                            std::to_string(i));
      }
    }
  }
  return out;
}

Points build_grid(const ScenarioConfig& cfg) { return make_grid(cfg.workspace, cfg.grid_resolution); }

}  // namespace dsgp
