#include "dsgp/field.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <map>
#include <numbers>
#include <sstream>

#include "dsgp/errors.hpp"

namespace dsgp {

double toy_field(double x) { return std::sin(2.0 * x) + std::cos(6.0 * x) + 0.5; }

double gaussian_mixture_field(const Eigen::Ref<const Eigen::VectorXd>& x,
                              std::span<const Bump> bumps) {
  double total = 0.0;
  for (const auto& b : bumps) {
    if (!(b.width > 0.0)) throw ArgumentError("gaussian mixture: bump width must be positive");
    if (b.center.size() != x.size()) {
      throw ArgumentError("gaussian mixture: bump center dimension mismatch");
    }
    total += b.amplitude * std::exp(-(x - b.center).squaredNorm() / (b.width * b.width));
  }
  return total;
}

namespace {

std::vector<std::string> split_csv(const std::string& line) {
  std::vector<std::string> out;
  std::stringstream ss(line);
  std::string cell;
  while (std::getline(ss, cell, ',')) {
    while (!cell.empty() && (cell.back() == '\r' || cell.back() == ' ')) cell.pop_back();
    out.push_back(cell);
  }
  return out;
}

double parse_double(const std::string& s, const std::filesystem::path& path) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw ArgumentError(path.string() + ": cannot parse number '" + s + "'");
  }
}

std::size_t locate(const std::vector<double>& axis, double v) {
  // Index of the lower cell corner, clamped so [i, i+1] is valid.
  if (axis.size() < 2) return 0;
  auto it = std::upper_bound(axis.begin(), axis.end(), v);
  std::size_t i = it == axis.begin() ? 0 : static_cast<std::size_t>(it - axis.begin()) - 1;
  return std::min(i, axis.size() - 2);
}

}  // namespace

TabulatedField::TabulatedField(std::vector<double> xs, std::vector<double> ys,
                               Eigen::MatrixXd values)
    : xs_(std::move(xs)), ys_(std::move(ys)), values_(std::move(values)) {
  if (xs_.empty() || ys_.empty()) throw ArgumentError("tabulated field: empty axis");
  if (values_.rows() != static_cast<Eigen::Index>(xs_.size()) ||
      values_.cols() != static_cast<Eigen::Index>(ys_.size())) {
    throw ArgumentError("tabulated field: value grid does not match axes");
  }
  if (!std::is_sorted(xs_.begin(), xs_.end()) || !std::is_sorted(ys_.begin(), ys_.end())) {
    throw ArgumentError("tabulated field: axes must be increasing");
  }
}

TabulatedField TabulatedField::from_csv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open field grid '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"x", "y", "value"}) {
    throw ArgumentError(path.string() + ": expected header 'x,y,value'");
  }
  std::map<std::pair<double, double>, double> cells;
  std::vector<double> xs;
  std::vector<double> ys;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cols = split_csv(line);
    if (cols.size() != 3) throw ArgumentError(path.string() + ": expected 3 columns: " + line);
    const double x = parse_double(cols[0], path);
    const double y = parse_double(cols[1], path);
    cells[{x, y}] = parse_double(cols[2], path);
    xs.push_back(x);
    ys.push_back(y);
  }
  std::sort(xs.begin(), xs.end());
  xs.erase(std::unique(xs.begin(), xs.end()), xs.end());
  std::sort(ys.begin(), ys.end());
  ys.erase(std::unique(ys.begin(), ys.end()), ys.end());
  Eigen::MatrixXd values(static_cast<Eigen::Index>(xs.size()),
                         static_cast<Eigen::Index>(ys.size()));
  for (std::size_t i = 0; i < xs.size(); ++i) {
    for (std::size_t j = 0; j < ys.size(); ++j) {
      auto it = cells.find({xs[i], ys[j]});
      if (it == cells.end()) {
        throw ArgumentError(path.string() + ": grid is missing the cell (" +
                            std::to_string(xs[i]) + ", " + std::to_string(ys[j]) + ")");
      }
      values(static_cast<Eigen::Index>(i), static_cast<Eigen::Index>(j)) = it->second;
    }
  }
  return TabulatedField(std::move(xs), std::move(ys), std::move(values));
}

double TabulatedField::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  if (x.size() != 2) throw ArgumentError("tabulated field: expects 2-D positions");
  const double px = std::clamp(x[0], xs_.front(), xs_.back());
  const double py = std::clamp(x[1], ys_.front(), ys_.back());
  const std::size_t i = locate(xs_, px);
  const std::size_t j = locate(ys_, py);
  const auto ii = static_cast<Eigen::Index>(i);
  const auto jj = static_cast<Eigen::Index>(j);
  if (xs_.size() == 1 && ys_.size() == 1) return values_(0, 0);
  const double tx = xs_.size() > 1 ? (px - xs_[i]) / (xs_[i + 1] - xs_[i]) : 0.0;
  const double ty = ys_.size() > 1 ? (py - ys_[j]) / (ys_[j + 1] - ys_[j]) : 0.0;
  const auto ix1 = xs_.size() > 1 ? ii + 1 : ii;
  const auto jy1 = ys_.size() > 1 ? jj + 1 : jj;
  return (1 - tx) * (1 - ty) * values_(ii, jj) + tx * (1 - ty) * values_(ix1, jj) +
         (1 - tx) * ty * values_(ii, jy1) + tx * ty * values_(ix1, jy1);
}

double ScalarField::operator()(const Eigen::Ref<const Eigen::VectorXd>& x) const {
  struct Visitor {
    const Eigen::Ref<const Eigen::VectorXd>& x;
    double operator()(const ToyField&) const { return toy_field(x[0]); }
    double operator()(const GaussianMixtureField& f) const {
      return gaussian_mixture_field(x, f.bumps);
    }
    double operator()(const TabulatedField& f) const { return f(x); }
  };
  return std::visit(Visitor{x}, kind_);
}

std::string ScalarField::name() const {
  struct Visitor {
    std::string operator()(const ToyField&) const { return "toy_1d"; }
    std::string operator()(const GaussianMixtureField&) const { return "gaussian_mixture"; }
    std::string operator()(const TabulatedField&) const { return "tabulated"; }
  };
  return std::visit(Visitor{}, kind_);
}

ScalarField two_lamp_field() {
  GaussianMixtureField f;
  f.bumps.push_back({Eigen::Vector2d(2.0, 3.5), 2.0, 1.2});
  f.bumps.push_back({Eigen::Vector2d(5.5, 1.5), 1.5, 1.0});
  return ScalarField(std::move(f));
}

double Rng::uniform() {
  return static_cast<double>(engine_() >> 11) * 0x1.0p-53;
}

double Rng::normal() {
  if (has_spare_) {
    has_spare_ = false;
    return spare_;
  }
  // 1 - u keeps the log argument in (0, 1].
  const double u1 = 1.0 - uniform();
  const double u2 = uniform();
  const double radius = std::sqrt(-2.0 * std::log(u1));
  const double angle = 2.0 * std::numbers::pi * u2;
  spare_ = radius * std::sin(angle);
  has_spare_ = true;
  return radius * std::cos(angle);
}

Observation sample(const ScalarField& field, const Eigen::Ref<const Eigen::VectorXd>& x,
                   double noise_sd, Rng& rng, int robot_id, std::int64_t step_index) {
  Observation obs;
  obs.position = x;
  obs.value = field(x);
  if (noise_sd > 0.0) obs.value += noise_sd * rng.normal();
  obs.robot_id = robot_id;
  obs.step_index = step_index;
  return obs;
}

bool Workspace::contains(const Eigen::Ref<const Eigen::VectorXd>& x, double tol) const {
  if (x.size() != lower.size()) return false;
  for (Eigen::Index d = 0; d < x.size(); ++d) {
    if (x[d] < lower[d] - tol || x[d] > upper[d] + tol) return false;
  }
  return true;
}

Trajectory linear_sweep(const Eigen::VectorXd& start, const Eigen::VectorXd& end, std::size_t n) {
  if (n < 2) throw ArgumentError("linear_sweep: need at least two samples");
  if (start.size() != end.size()) throw ArgumentError("linear_sweep: endpoint dimensions differ");
  Trajectory traj;
  traj.positions.resize(static_cast<Eigen::Index>(n), start.size());
  for (std::size_t i = 0; i < n; ++i) {
    const double s = static_cast<double>(i) / static_cast<double>(n - 1);
    traj.positions.row(static_cast<Eigen::Index>(i)) = ((1.0 - s) * start + s * end).transpose();
  }
  // Pin the endpoints exactly.
  traj.positions.row(0) = start.transpose();
  traj.positions.row(static_cast<Eigen::Index>(n - 1)) = end.transpose();
  return traj;
}

Trajectory polyline(const std::vector<Eigen::VectorXd>& waypoints, std::size_t n) {
  if (waypoints.size() < 2) throw ArgumentError("polyline: need at least two waypoints");
  if (waypoints.size() == 2) return linear_sweep(waypoints[0], waypoints[1], n);
  if (n < 2) throw ArgumentError("polyline: need at least two samples");
  std::vector<double> cumulative{0.0};
  for (std::size_t i = 1; i < waypoints.size(); ++i) {
    cumulative.push_back(cumulative.back() + (waypoints[i] - waypoints[i - 1]).norm());
  }
  const double total = cumulative.back();
  Trajectory traj;
  traj.positions.resize(static_cast<Eigen::Index>(n), waypoints.front().size());
  std::size_t seg = 0;
  for (std::size_t i = 0; i < n; ++i) {
    const double s = total * static_cast<double>(i) / static_cast<double>(n - 1);
    while (seg + 2 < cumulative.size() && cumulative[seg + 1] < s) ++seg;
    const double len = cumulative[seg + 1] - cumulative[seg];
    const double u = len > 0.0 ? std::clamp((s - cumulative[seg]) / len, 0.0, 1.0) : 0.0;
    traj.positions.row(static_cast<Eigen::Index>(i)) =
        ((1.0 - u) * waypoints[seg] + u * waypoints[seg + 1]).transpose();
  }
  traj.positions.row(static_cast<Eigen::Index>(n - 1)) = waypoints.back().transpose();
  return traj;
}

Trajectory lawnmower(const Workspace& workspace, std::size_t rows, std::size_t n) {
  if (workspace.lower.size() != 2) throw ArgumentError("lawnmower: workspace must be 2-D");
  if (rows < 1 || n < rows || n < 2) throw ArgumentError("lawnmower: need rows >= 1, n >= rows");
  const double x0 = workspace.lower[0];
  const double x1 = workspace.upper[0];
  const double h = (workspace.upper[1] - workspace.lower[1]) / static_cast<double>(rows);
  std::vector<Eigen::VectorXd> waypoints;
  for (std::size_t r = 0; r < rows; ++r) {
    const double y = workspace.lower[1] + (static_cast<double>(r) + 0.5) * h;
    const bool forward = r % 2 == 0;
    waypoints.push_back(Eigen::Vector2d(forward ? x0 : x1, y));
    waypoints.push_back(Eigen::Vector2d(forward ? x1 : x0, y));
  }
  return polyline(waypoints, n);
}

void write_trajectory_csv(const std::filesystem::path& path, const Trajectory& traj) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write trajectory '" + path.string() + "'");
  out << "step,x,y\n";
  char buf[64];
  for (Eigen::Index i = 0; i < traj.positions.rows(); ++i) {
    out << i;
    for (Eigen::Index d = 0; d < 2; ++d) {
      const double v = d < traj.positions.cols() ? traj.positions(i, d) : 0.0;
      auto res = std::to_chars(buf, buf + sizeof(buf), v);
      out << ',' << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
    }
    out << '\n';
  }
}

Trajectory read_trajectory_csv(const std::filesystem::path& path, int dimension) {
  if (dimension < 1 || dimension > 2) throw ArgumentError("trajectory csv: dimension must be 1 or 2");
  std::ifstream in(path);
  if (!in) throw ArgumentError("cannot open trajectory '" + path.string() + "'");
  std::string line;
  if (!std::getline(in, line) || split_csv(line) != std::vector<std::string>{"step", "x", "y"}) {
    throw ArgumentError(path.string() + ": expected header 'step,x,y'");
  }
  std::vector<Eigen::VectorXd> rows;
  while (std::getline(in, line)) {
    if (line.empty() || line == "\r") continue;
    const auto cols = split_csv(line);
    if (cols.size() != 3) throw ArgumentError(path.string() + ": expected 3 columns: " + line);
    Eigen::VectorXd p(dimension);
    p[0] = parse_double(cols[1], path);
    if (dimension == 2) p[1] = parse_double(cols[2], path);
    rows.push_back(p);
  }
  Trajectory traj;
  traj.positions.resize(static_cast<Eigen::Index>(rows.size()), dimension);
  for (std::size_t i = 0; i < rows.size(); ++i) {
    traj.positions.row(static_cast<Eigen::Index>(i)) = rows[i].transpose();
  }
  return traj;
}

void write_field_grid_csv(const std::filesystem::path& path, const Points& grid,
                          const Eigen::VectorXd& values) {
  std::ofstream out(path);
  if (!out) throw ArgumentError("cannot write field grid '" + path.string() + "'");
  out << "x,y,value\n";
  char buf[64];
  auto put = [&](double v) {
    auto res = std::to_chars(buf, buf + sizeof(buf), v);
    out << std::string_view(buf, static_cast<std::size_t>(res.ptr - buf));
  };
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    put(grid(i, 0));
    out << ',';
    put(grid.cols() > 1 ? grid(i, 1) : 0.0);
    out << ',';
    put(values[i]);
    out << '\n';
  }
}

Points make_grid(const Workspace& workspace, const std::vector<int>& resolution) {
  const auto dim = workspace.lower.size();
  if (static_cast<Eigen::Index>(resolution.size()) != dim || dim < 1 || dim > 2) {
    throw ArgumentError("make_grid: resolution must have one entry per axis (1-D or 2-D)");
  }
  for (int r : resolution) {
    if (r < 1) throw ArgumentError("make_grid: resolution entries must be >= 1");
  }
  auto axis = [&](Eigen::Index d) {
    std::vector<double> v(static_cast<std::size_t>(resolution[static_cast<std::size_t>(d)]));
    const double lo = workspace.lower[d];
    const double hi = workspace.upper[d];
    for (std::size_t i = 0; i < v.size(); ++i) {
      v[i] = v.size() == 1 ? 0.5 * (lo + hi)
                           : lo + (hi - lo) * static_cast<double>(i) /
                                      static_cast<double>(v.size() - 1);
    }
    return v;
  };
  const auto ax = axis(0);
  if (dim == 1) {
    Points grid(static_cast<Eigen::Index>(ax.size()), 1);
    for (std::size_t i = 0; i < ax.size(); ++i) grid(static_cast<Eigen::Index>(i), 0) = ax[i];
    return grid;
  }
  const auto ay = axis(1);
  Points grid(static_cast<Eigen::Index>(ax.size() * ay.size()), 2);
  Eigen::Index row = 0;
  for (double y : ay) {
    for (double x : ax) {
      grid(row, 0) = x;
      grid(row, 1) = y;
      ++row;
    }
  }
  return grid;
}

Eigen::VectorXd evaluate_on(const ScalarField& field, const Points& grid) {
  Eigen::VectorXd out(grid.rows());
  for (Eigen::Index i = 0; i < grid.rows(); ++i) out[i] = field(grid.row(i).transpose());
  return out;
}

}  // namespace dsgp
