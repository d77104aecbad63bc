#pragma once

#include <cstdint>
#include <random>

#include <Eigen/Core>

#include "dsgp/gp_core.hpp"
#include "dsgp/kernel.hpp"

namespace dsgp::testing {

/// Light-field kernel of the 5-robot scenario.
inline KernelSpec light_field_kernel() {
  KernelSpec k;
  k.signal_variance = 1.0;
  k.length_scales.resize(2);
  k.length_scales << 1.0 / std::sqrt(26.0), 1.0 / std::sqrt(40.0);
  k.noise_variance = 0.1;
  return k;
}

inline KernelSpec smooth_kernel_2d(double length = 0.6) {
  KernelSpec k;
  k.signal_variance = 1.3;
  k.length_scales = Eigen::Vector2d(length, 0.8 * length);
  k.noise_variance = 0.05;
  return k;
}

/// n observations uniform in [0, width] x [0, height] with values sin(x) + 0.5 cos(2y) + noise.
inline Dataset random_dataset(std::size_t n, std::uint64_t seed, double width = 3.0,
                              double height = 2.0) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> ux(0.0, width);
  std::uniform_real_distribution<double> uy(0.0, height);
  std::normal_distribution<double> noise(0.0, 0.1);
  Dataset d;
  for (std::size_t i = 0; i < n; ++i) {
    Observation o;
    o.position = Eigen::Vector2d(ux(gen), uy(gen));
    o.value = std::sin(o.position[0]) + 0.5 * std::cos(2.0 * o.position[1]) + noise(gen);
    o.step_index = static_cast<std::int64_t>(i);
    d.observations.push_back(o);
  }
  return d;
}

inline Points grid_2d(int nx, int ny, double width, double height) {
  Points g(nx * ny, 2);
  int row = 0;
  for (int j = 0; j < ny; ++j) {
    for (int i = 0; i < nx; ++i) {
      g(row, 0) = width * i / (nx - 1);
      g(row, 1) = height * j / (ny - 1);
      ++row;
    }
  }
  return g;
}

/// Streams a dataset through recursive_add; every point must be accepted.
inline RecursiveState stream(const Dataset& data, const KernelSpec& spec, Dataset& out) {
  RecursiveState state;
  out = Dataset{};
  for (const auto& o : data.observations) recursive_add_in_place(state, out, o, spec);
  return state;
}

}  // namespace dsgp::testing
