#pragma once

#include <algorithm>
#include <cmath>
#include <vector>

#include "dainr/networks/model.hpp"
#include "dainr/training/loss.hpp"
#include "dainr/training/problem.hpp"
#include "dainr/training/trainer.hpp"

namespace dainr {

// The two frames of `kept` closest to `frame`, excluding `frame` itself;
// ties go to the earlier frame.
inline std::vector<int> nearest_kept_neighbours(int frame, const std::vector<int>& kept, int count) {
  std::vector<int> candidates;
  for (int k : kept)
    if (k != frame) candidates.push_back(k);
  require(static_cast<int>(candidates.size()) >= count, "not enough kept frames for features");
  std::stable_sort(candidates.begin(), candidates.end(),
                   [frame](int a, int b) { return std::abs(a - frame) < std::abs(b - frame); });
  candidates.resize(count);
  std::sort(candidates.begin(), candidates.end());
  return candidates;
}

// Frozen features for every frame. One-frame extractors see the frame's own
// zero-filled image (or, for frames without data, the nearest kept frame);
// two-frame extractors see the two nearest kept neighbours.
template <class T>
std::vector<FeatureMap<T>> compute_features(const DaInrModel<T>& model,
                                            const ImageSequence<T>& zero_filled,
                                            const std::vector<int>& kept) {
  std::vector<FeatureMap<T>> out;
  if (!model.uses_features()) return out;
  const int inputs = model.feature_extractor().input_frames();
  for (int k = 0; k < zero_filled.size(); ++k) {
    std::vector<ComplexImage<T>> frames;
    if (inputs == 1) {
      const bool has = std::find(kept.begin(), kept.end(), k) != kept.end();
      const int src = has ? k : nearest_kept_neighbours(k, kept, 1).front();
      frames.push_back(zero_filled[src]);
    } else {
      for (int j : nearest_kept_neighbours(k, kept, inputs)) frames.push_back(zero_filled[j]);
    }
    out.push_back(model.extract_features(frames));
  }
  return out;
}

template <class T>
TrainResult train_dainr(DaInrModel<T>& model, const ReconstructionProblem<T>& problem,
                        const TrainConfig& cfg, int canonical_frame = 0,
                        const std::vector<FeatureMap<T>>& features = {}) {
  require(problem.frames >= 2, "training needs at least two frames");
  require(model.config().rows == problem.image_size && model.config().cols == problem.image_size,
          "model size does not match the data");
  require(!model.uses_features() || static_cast<int>(features.size()) == problem.frames,
          "feature maps missing for some frames");
  const TimeAxis axis{problem.frames, canonical_frame};
  StepLoss<T> step = [&](ad::Tape<T>& tape, int frame) {
    const FeatureMap<T>* f = model.uses_features() ? &features[frame] : nullptr;
    auto pixels = model.render(tape, axis(frame), 1.0, f);
    return dainr_loss(tape, pixels, problem.coils, *problem.ops[frame],
                      std::span<const T>(problem.targets[frame]));
  };
  return optimize(model.parameters(), problem.train_frames, step, cfg);
}

template <class T>
ImageSequence<T> render_sequence(const DaInrModel<T>& model, int frames, int canonical_frame,
                                 double ratio = 1.0, const std::vector<FeatureMap<T>>& features = {}) {
  const TimeAxis axis{frames, canonical_frame};
  ImageSequence<T> out;
  for (int k = 0; k < frames; ++k)
    out.frames.push_back(
        model.render_frame(axis(k), ratio, model.uses_features() ? &features.at(k) : nullptr));
  return out;
}

}  // namespace dainr
