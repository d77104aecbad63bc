#include <cmath>
#include <filesystem>
#include <fstream>
#include <numbers>

#include <gtest/gtest.h>

#include "dsgp/errors.hpp"
#include "dsgp/field.hpp"

namespace dsgp {
namespace {

namespace fs = std::filesystem;

fs::path scratch(const std::string& name) {
  const auto dir = fs::temp_directory_path() / "dsgp_test_field";
  fs::create_directories(dir);
  return dir / name;
}

Workspace box(double w, double h) { return Workspace{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(w, h)}; }

TEST(ToyField, KnownValues) {
  EXPECT_DOUBLE_EQ(toy_field(0.0), 1.5);
  EXPECT_NEAR(toy_field(std::numbers::pi / 2.0), -0.5, 1e-14);
}

TEST(Mixture, Values) {
  const Eigen::Vector2d c(1.0, 2.0);
  const std::vector<Bump> one{Bump{c, 3.0, 0.5}};
  EXPECT_EQ(gaussian_mixture_field(c, std::vector<Bump>{}), 0.0);
  EXPECT_DOUBLE_EQ(gaussian_mixture_field(c, one), 3.0);
  EXPECT_NEAR(gaussian_mixture_field(Eigen::Vector2d(1.5, 2.0), one),
              3.0 * std::exp(-1.0), 1e-14);
}

TEST(Mixture, TwoLampPeaksNearCenters) {
  const auto f = two_lamp_field();
  EXPECT_EQ(f.name(), "gaussian_mixture");
  const Points grid = make_grid(box(7.5, 5.0), {76, 51});
  const Eigen::VectorXd v = evaluate_on(f, grid);
  Eigen::Index best = 0;
  v.maxCoeff(&best);
  EXPECT_NEAR(grid(best, 0), 2.0, 0.11);
  EXPECT_NEAR(grid(best, 1), 3.5, 0.11);
  EXPECT_GT(f(Eigen::Vector2d(5.5, 1.5)), 1.5);
}

TEST(Sampling, NoiselessIsExact) {
  const ScalarField f{ToyField{}};
  Rng rng(1);
  const auto o = sample(f, Eigen::VectorXd::Constant(1, 0.7), 0.0, rng, 3, 11);
  EXPECT_EQ(o.value, toy_field(0.7));
  EXPECT_EQ(o.robot_id, 3);
  EXPECT_EQ(o.step_index, 11);
}

TEST(Sampling, SeedIsDeterministic) {
  const ScalarField f{ToyField{}};
  Rng a(robot_seed(42, 1));
  Rng b(robot_seed(42, 1));
  Rng c(robot_seed(42, 2));
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 1.0);
  bool differs = false;
  for (int i = 0; i < 20; ++i) {
    const double va = sample(f, x, 0.3, a).value;
    EXPECT_EQ(va, sample(f, x, 0.3, b).value);
    differs = differs || va != sample(f, x, 0.3, c).value;
  }
  EXPECT_TRUE(differs);
}

TEST(Sampling, NoiseMoments) {
  const ScalarField f{ToyField{}};
  Rng rng(9);
  const Eigen::VectorXd x = Eigen::VectorXd::Constant(1, 0.0);
  const int n = 10000;
  const double sd = 0.3;
  double sum = 0.0;
  double sq = 0.0;
  for (int i = 0; i < n; ++i) {
    const double e = sample(f, x, sd, rng).value - 1.5;
    sum += e;
    sq += e * e;
  }
  EXPECT_LT(std::abs(sum / n), 4.0 * sd / std::sqrt(n));
  EXPECT_NEAR(std::sqrt(sq / n), sd, 0.02);
  for (int i = 0; i < 1000; ++i) {
    const double u = rng.uniform();
    EXPECT_GE(u, 0.0);
    EXPECT_LT(u, 1.0);
  }
}

TEST(Trajectory, LinearSweep) {
  const auto t = linear_sweep(Eigen::VectorXd::Constant(1, 3.0), Eigen::VectorXd::Constant(1, 0.0), 300);
  ASSERT_EQ(t.size(), 300u);
  EXPECT_EQ(t.positions(0, 0), 3.0);
  EXPECT_EQ(t.positions(299, 0), 0.0);
  EXPECT_NEAR(t.positions(1, 0) - t.positions(0, 0), -3.0 / 299.0, 1e-15);
  const auto two = linear_sweep(Eigen::VectorXd::Constant(1, 1.0), Eigen::VectorXd::Constant(1, 4.0), 2);
  EXPECT_EQ(two.positions(0, 0), 1.0);
  EXPECT_EQ(two.positions(1, 0), 4.0);
}

TEST(Trajectory, PolylineEvenSpacing) {
  const auto t = polyline({Eigen::Vector2d(0, 0), Eigen::Vector2d(2, 0), Eigen::Vector2d(2, 2)}, 5);
  ASSERT_EQ(t.size(), 5u);
  for (Eigen::Index i = 1; i < 5; ++i) {
    const double step = std::abs(t.positions(i, 0) - t.positions(i - 1, 0)) +
                        std::abs(t.positions(i, 1) - t.positions(i - 1, 1));
    EXPECT_NEAR(step, 1.0, 1e-12);
  }
}

TEST(Trajectory, LawnmowerSingleRowIsLine) {
  const auto ws = box(4.0, 2.0);
  const auto t = lawnmower(ws, 1, 9);
  for (Eigen::Index i = 0; i < 9; ++i) {
    EXPECT_NEAR(t.positions(i, 0), 0.5 * i, 1e-12);
    EXPECT_NEAR(t.positions(i, 1), 1.0, 1e-12);
  }
}

TEST(Trajectory, LawnmowerStaysInside) {
  const auto ws = box(7.5, 5.0);
  const auto t = lawnmower(ws, 4, 400);
  ASSERT_EQ(t.size(), 400u);
  for (Eigen::Index i = 0; i < 400; ++i) EXPECT_TRUE(ws.contains(t.positions.row(i).transpose()));
  // Row centers at height/8, 3height/8, ...: the first and last samples sit on the outer rows.
  EXPECT_NEAR(t.positions(0, 1), 5.0 / 8.0, 1e-12);
  EXPECT_NEAR(t.positions(399, 1), 35.0 / 8.0, 1e-12);
}

TEST(Trajectory, LawnmowerBandsAreDisjoint) {
  const Workspace lower{Eigen::Vector2d(0.0, 0.0), Eigen::Vector2d(7.5, 2.5)};
  const Workspace upper{Eigen::Vector2d(0.0, 2.5), Eigen::Vector2d(7.5, 5.0)};
  const auto a = lawnmower(lower, 2, 100);
  const auto b = lawnmower(upper, 2, 100);
  EXPECT_LE(a.positions.col(1).maxCoeff(), 2.5);
  EXPECT_GE(b.positions.col(1).minCoeff(), 2.5);
}

TEST(Trajectory, CsvRoundTrip) {
  const auto path = scratch("traj.csv");
  const auto t = lawnmower(box(3.0, 2.0), 2, 17);
  write_trajectory_csv(path, t);
  const auto back = read_trajectory_csv(path, 2);
  EXPECT_EQ(back.positions, t.positions);
}

TEST(Tabulated, BilinearAndClamped) {
  Eigen::MatrixXd v(2, 2);
  v << 0.0, 1.0,   // x = 0: y = 0, 1
       2.0, 3.0;   // x = 1
  const TabulatedField f({0.0, 1.0}, {0.0, 1.0}, v);
  EXPECT_DOUBLE_EQ(f(Eigen::Vector2d(0.5, 0.5)), 1.5);
  EXPECT_DOUBLE_EQ(f(Eigen::Vector2d(1.0, 0.0)), 2.0);
  EXPECT_DOUBLE_EQ(f(Eigen::Vector2d(0.25, 1.0)), 1.5);
  EXPECT_DOUBLE_EQ(f(Eigen::Vector2d(-3.0, 9.0)), 1.0);
}

TEST(Tabulated, CsvMatchesSource) {
  const auto path = scratch("grid.csv");
  const auto mix = two_lamp_field();
  const Points grid = make_grid(box(7.5, 5.0), {16, 11});
  write_field_grid_csv(path, grid, evaluate_on(mix, grid));
  const ScalarField tab{TabulatedField::from_csv(path)};
  EXPECT_EQ(tab.name(), "tabulated");
  for (Eigen::Index i = 0; i < grid.rows(); ++i) {
    EXPECT_NEAR(tab(grid.row(i).transpose()), mix(grid.row(i).transpose()), 1e-12);
  }
  std::ofstream(scratch("bad.csv")) << "a,b\n1,2\n";
  EXPECT_ANY_THROW(TabulatedField::from_csv(scratch("bad.csv")));
}

TEST(Grid, XVariesFastest) {
  const Points g = make_grid(box(2.0, 1.0), {3, 2});
  ASSERT_EQ(g.rows(), 6);
  EXPECT_EQ(g(1, 0), 1.0);
  EXPECT_EQ(g(1, 1), 0.0);
  EXPECT_EQ(g(3, 0), 0.0);
  EXPECT_EQ(g(3, 1), 1.0);
}

}  // namespace
}  // namespace dsgp
