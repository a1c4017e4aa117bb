#pragma once

#include <string>

#include "dainr/core/rng.hpp"
#include "dainr/mri/acquisition.hpp"
#include "dainr/mri/ndft.hpp"
#include "dainr/mri/nufft.hpp"

namespace dainr {

enum class OperatorKind { exact, gridded };

inline OperatorKind parse_operator(const std::string& name) {
  if (name == "exact") return OperatorKind::exact;
  if (name == "gridded") return OperatorKind::gridded;
  throw InvalidArgument("unknown operator '" + name + "' (expected exact or gridded)");
}

inline std::string to_string(OperatorKind kind) {
  return kind == OperatorKind::exact ? "exact" : "gridded";
}

struct SimulationOptions {
  int spokes_per_frame = 13;
  int samples_per_spoke = 0;  // 0 -> image size
  std::int64_t start_index = 0;
  OperatorKind op = OperatorKind::exact;
  double noise_std = 0.0;  // per real component, absolute
  std::uint64_t noise_seed = 0;
};

// Per frame k: golden-angle trajectory k, then m_c = F_u S_c gt_k for every
// coil, plus optional seeded complex Gaussian noise.
inline KSpaceAcquisition<double> retrospective_undersample(const ImageSequence<double>& gt,
                                                           const CoilSensitivities<double>& coils,
                                                           const SimulationOptions& opts) {
  require(gt.size() >= 1, "ground truth has no frames");
  require(gt.rows() == gt.cols(), "ground truth frames must be square");
  require(coils.rows() == gt.rows() && coils.cols() == gt.cols(),
          "coil maps and ground truth differ in size");
  require(opts.noise_std >= 0.0, "noise level must be non-negative");
  const int n = gt.rows();
  KSpaceAcquisition<double> acq;
  acq.image_size = n;
  acq.spokes_per_frame = opts.spokes_per_frame;
  acq.samples_per_spoke = opts.samples_per_spoke > 0 ? opts.samples_per_spoke : n;
  acq.start_index = opts.start_index;
  acq.trajectories = build_trajectories(kRadialTrajectory, gt.size(), n, opts.spokes_per_frame,
                                        acq.samples_per_spoke, opts.start_index);
  Rng noise(opts.noise_seed);
  for (int k = 0; k < gt.size(); ++k) {
    const auto& traj = acq.trajectories[k];
    if (opts.op == OperatorKind::exact)
      acq.samples.push_back(forward_model(gt[k], coils, Ndft<double>(traj, n)));
    else
      acq.samples.push_back(forward_model(gt[k], coils, GriddedNufft<double>(traj, n)));
    if (opts.noise_std > 0.0)
      for (auto& coil : acq.samples.back())
        for (auto& s : coil) {
          const double re = noise.normal();
          const double im = noise.normal();
          s += std::complex<double>(re, im) * opts.noise_std;
        }
  }
  return acq;
}

}  // namespace dainr
