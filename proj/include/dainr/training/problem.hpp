#pragma once

#include <memory>
#include <vector>

#include "dainr/mri/acquisition.hpp"
#include "dainr/mri/nufft.hpp"

namespace dainr {

// Per-frame operators and targets of a reconstruction. Frames without data
// (held out for temporal interpolation) have no operator.
template <class T>
struct ReconstructionProblem {
  int image_size = 0;
  int frames = 0;
  CoilSensitivities<T> coils;
  std::vector<std::shared_ptr<const GriddedNufft<T>>> ops;
  std::vector<std::vector<T>> targets;  // [C, K, 2] interleaved
  std::vector<int> train_frames;

  bool has_data(int frame) const { return ops.at(frame) != nullptr; }
};

// Uses every frame listed in `train_frames` (all frames when empty). Samples
// are multiplied by `scale`.
template <class T>
ReconstructionProblem<T> make_problem(const KSpaceAcquisition<T>& acq,
                                      const CoilSensitivities<T>& coils,
                                      std::vector<int> train_frames = {}, double scale = 1.0,
                                      GriddingOptions gridding = {}) {
  require(acq.frames() >= 1, "acquisition has no frames");
  require(coils.count() == acq.coils(), "coil map count does not match the acquisition");
  require(coils.rows() == acq.image_size, "coil maps do not match the image size");
  ReconstructionProblem<T> p;
  p.image_size = acq.image_size;
  p.frames = acq.frames();
  p.coils = coils;
  if (train_frames.empty()) {
    train_frames.resize(acq.frames());
    for (int k = 0; k < acq.frames(); ++k) train_frames[k] = k;
  }
  p.ops.resize(acq.frames());
  p.targets.resize(acq.frames());
  for (int k : train_frames) {
    require(k >= 0 && k < acq.frames(), "training frame index out of range");
    p.ops[k] = std::make_shared<GriddedNufft<T>>(acq.trajectories[k], acq.image_size, gridding);
    auto& tgt = p.targets[k];
    for (const auto& coil : acq.samples[k])
      for (auto v : coil) {
        tgt.push_back(static_cast<T>(v.real() * scale));
        tgt.push_back(static_cast<T>(v.imag() * scale));
      }
  }
  p.train_frames = std::move(train_frames);
  return p;
}

}  // namespace dainr
