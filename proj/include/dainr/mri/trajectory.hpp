#pragma once

#include <array>
#include <cmath>
#include <cstdint>
#include <numbers>
#include <vector>

#include "dainr/core/error.hpp"

namespace dainr {

inline constexpr double kGoldenAngleDegrees = 111.25;

// Radial k-space sampling pattern of one frame. Coordinates are angular
// frequencies in radians per pixel.
struct Trajectory {
  int spokes = 0;
  int samples_per_spoke = 0;
  std::vector<double> angles;               // per spoke, radians in [0, pi)
  std::vector<std::array<double, 2>> k;     // per sample (kx, ky), spoke-major
  std::vector<double> density;              // per sample

  std::size_t size() const { return k.size(); }
};

// Golden-angle spoke angle in degrees for a global spoke counter.
// 111.25 degrees = 11125 hundredths, so the modulus is exact in integers.
inline double golden_angle_degrees(std::int64_t spoke_index) {
  require(spoke_index >= 0, "spoke index must be non-negative");
  const std::int64_t hundredths = (spoke_index % 18000) * 11125 % 18000;
  return hundredths / 100.0;
}

// Acceleration factor N / M (fully sampled lines over acquired spokes).
inline double acceleration_factor(int image_size, int spokes_per_frame) {
  require(image_size >= 1 && spokes_per_frame >= 1, "acceleration factor needs positive sizes");
  return static_cast<double>(image_size) / spokes_per_frame;
}

// Spoke j of frame f is the (start + f * M + j)-th golden-angle spoke. Each
// spoke carries `samples` equispaced radii over [-pi, pi). Density weights are
// the polar-grid area per sample divided by (2 pi)^2: |k| dk dtheta / (4 pi^2),
// with the centre sample taking its share of the dk/2 disc.
inline Trajectory golden_angle_trajectory(int frame, int spokes_per_frame, int image_size,
                                          int samples_per_spoke = 0, std::int64_t start_index = 0) {
  require(frame >= 0, "frame index must be non-negative");
  require(spokes_per_frame >= 1, "spokes per frame must be at least 1");
  require(image_size >= 1, "image size must be positive");
  const int samples = samples_per_spoke > 0 ? samples_per_spoke : image_size;
  Trajectory traj;
  traj.spokes = spokes_per_frame;
  traj.samples_per_spoke = samples;
  traj.angles.resize(spokes_per_frame);
  traj.k.resize(static_cast<std::size_t>(spokes_per_frame) * samples);
  traj.density.resize(traj.k.size());
  const double dk = 2.0 * std::numbers::pi / samples;
  const double dtheta = std::numbers::pi / spokes_per_frame;
  const double norm = 1.0 / (4.0 * std::numbers::pi * std::numbers::pi);
  const double centre_weight = std::numbers::pi * (dk / 2) * (dk / 2) / spokes_per_frame * norm;
  for (int j = 0; j < spokes_per_frame; ++j) {
    const std::int64_t index = start_index + static_cast<std::int64_t>(frame) * spokes_per_frame + j;
    const double theta = golden_angle_degrees(index) * std::numbers::pi / 180.0;
    traj.angles[j] = theta;
    const double c = std::cos(theta);
    const double s = std::sin(theta);
    for (int i = 0; i < samples; ++i) {
      // Same as -pi + dk * i, but exactly zero at the centre sample.
      const double radius = dk * (i - 0.5 * samples);
      const std::size_t n = static_cast<std::size_t>(j) * samples + i;
      traj.k[n] = {radius * c, radius * s};
      traj.density[n] = radius == 0.0 ? centre_weight : std::abs(radius) * dk * dtheta * norm;
    }
  }
  return traj;
}

}  // namespace dainr
