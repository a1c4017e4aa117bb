#pragma once

#include <cstdint>
#include <numbers>
#include <string>
#include <vector>

#include "dainr/mri/forward_model.hpp"
#include "dainr/mri/ndft.hpp"
#include "dainr/mri/trajectory.hpp"

namespace dainr {

inline constexpr const char* kRadialTrajectory = "golden-angle-radial";
inline constexpr const char* kCartesianTrajectory = "cartesian";

// Fully sampled Cartesian grid k = 2 pi (i - N/2) / N on both axes, row-major
// over (ky, kx). Density 1/N^2 turns the adjoint into the inverse DFT.
inline Trajectory cartesian_trajectory(int size) {
  require(size >= 1, "cartesian trajectory size must be positive");
  Trajectory traj;
  traj.spokes = size;
  traj.samples_per_spoke = size;
  traj.angles.assign(size, 0.0);
  const double dk = 2.0 * std::numbers::pi / size;
  const double w = 1.0 / (static_cast<double>(size) * size);
  for (int r = 0; r < size; ++r)
    for (int c = 0; c < size; ++c) {
      traj.k.push_back({dk * centred_index(c, size), dk * centred_index(r, size)});
      traj.density.push_back(w);
    }
  return traj;
}

// Multi-coil dynamic acquisition: samples[frame][coil][sample].
template <class T>
struct KSpaceAcquisition {
  int image_size = 0;
  int spokes_per_frame = 0;
  int samples_per_spoke = 0;
  std::int64_t start_index = 0;
  std::string trajectory_kind = kRadialTrajectory;
  std::vector<Trajectory> trajectories;
  std::vector<CoilSamples<T>> samples;

  int frames() const { return static_cast<int>(samples.size()); }
  int coils() const { return samples.empty() ? 0 : static_cast<int>(samples.front().size()); }
  double acceleration() const { return acceleration_factor(image_size, spokes_per_frame); }

  template <class U>
  KSpaceAcquisition<U> cast() const {
    KSpaceAcquisition<U> out;
    out.image_size = image_size;
    out.spokes_per_frame = spokes_per_frame;
    out.samples_per_spoke = samples_per_spoke;
    out.start_index = start_index;
    out.trajectory_kind = trajectory_kind;
    out.trajectories = trajectories;
    out.samples.resize(samples.size());
    for (std::size_t f = 0; f < samples.size(); ++f) {
      out.samples[f].resize(samples[f].size());
      for (std::size_t c = 0; c < samples[f].size(); ++c)
        out.samples[f][c].assign(samples[f][c].begin(), samples[f][c].end());
    }
    return out;
  }
};

// Regenerates the per-frame trajectories described by the acquisition header.
inline std::vector<Trajectory> build_trajectories(const std::string& kind, int frames,
                                                  int image_size, int spokes_per_frame,
                                                  int samples_per_spoke, std::int64_t start_index) {
  std::vector<Trajectory> out;
  out.reserve(frames);
  for (int f = 0; f < frames; ++f) {
    if (kind == kRadialTrajectory)
      out.push_back(golden_angle_trajectory(f, spokes_per_frame, image_size, samples_per_spoke,
                                            start_index));
    else if (kind == kCartesianTrajectory)
      out.push_back(cartesian_trajectory(image_size));
    else
      throw InvalidArgument("unknown trajectory kind '" + kind + "'");
  }
  return out;
}

}  // namespace dainr
