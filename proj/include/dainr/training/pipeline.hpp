#pragma once

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "dainr/baselines/hashinr.hpp"
#include "dainr/baselines/zero_filled.hpp"
#include "dainr/training/dainr_training.hpp"
#include "dainr/training/interpolation.hpp"

namespace dainr {

enum class Method { dainr, hashinr, zerofill };

inline Method parse_method(const std::string& name) {
  if (name == "dainr") return Method::dainr;
  if (name == "hashinr") return Method::hashinr;
  if (name == "zerofill") return Method::zerofill;
  throw InvalidArgument("unknown method '" + name + "' (expected dainr, hashinr or zerofill)");
}

inline std::string to_string(Method m) {
  switch (m) {
    case Method::hashinr: return "hashinr";
    case Method::zerofill: return "zerofill";
    default: return "dainr";
  }
}

// Hash grid sized for 64 x 64 desk phantoms: 8 levels from 8 to 64 cells,
// 2^14 entries per level.
inline HashGridConfig desk_hash_config() {
  HashGridConfig c;
  c.levels = 8;
  c.table_size = std::uint64_t{1} << 14;
  c.features = 2;
  c.min_resolution = 8;
  c.max_resolution = 64;
  return c;
}

struct ReconstructionOptions {
  Method method = Method::dainr;
  int iterations = 500;
  double lr = 1e-3;
  double weight_decay = 0.0;
  FrameSchedule schedule = FrameSchedule::cyclic;
  bool early_stop = true;
  std::uint64_t seed = 0;
  int canonical_frame = 0;
  HashGridConfig hash = desk_hash_config();
  int hidden_width = 64;
  int hidden_layers = 5;
  int spatial_bands = 10;
  int temporal_bands = 6;
  bool use_features = false;
  int feature_channels = 16;
  RegularizerWeights weights;  // HashINR only
  InterpolationMode interpolation;

  TrainConfig train_config() const {
    TrainConfig tc;
    tc.iterations = iterations;
    tc.optimizer.lr = lr;
    tc.optimizer.weight_decay = weight_decay;
    tc.schedule = schedule;
    tc.seed = seed;
    tc.early_stop = early_stop;
    return tc;
  }

  void validate() const {
    train_config().validate();
    hash.validate();
    weights.validate();
    interpolation.validate();
    require(hidden_width >= 1 && hidden_layers >= 1, "network width and depth must be positive");
    require(method == Method::dainr || interpolation.kind != InterpolationKind::spatial,
            "spatial interpolation is only available for the dainr method");
    require(method != Method::zerofill || interpolation.kind == InterpolationKind::none,
            "zerofill has no interpolation mode");
  }
};

struct ReconstructionResult {
  ImageSequence<double> frames;  // dataset resolution and intensity units
  TrainResult train;
  std::optional<DaInrModel<float>> dainr;
  std::optional<HashInrModel<float>> hashinr;
  double intensity_scale = 1.0;  // training targets were multiplied by this
  int train_size = 0;
  double render_ratio = 1.0;
  std::vector<int> train_frames;
};

// Largest zero-filled magnitude over the given frames.
template <class T>
double peak_magnitude(const ImageSequence<T>& seq, const std::vector<int>& frames) {
  double peak = 0.0;
  for (int k : frames)
    for (const auto& v : seq[k].data) peak = std::max(peak, static_cast<double>(std::abs(v)));
  return peak;
}

inline ReconstructionResult reconstruct(const DatasetBundle& d, const ReconstructionOptions& opts) {
  opts.validate();
  const int frames = d.frames();
  ReconstructionResult res;
  if (opts.method == Method::zerofill) {
    res.frames = zero_filled_recon(d.acquisition, d.coils).cast<double>();
    res.train_size = d.image_size();
    return res;
  }
  require(frames >= 2, "model-based reconstruction needs at least two frames");
  require(d.has_coils(), "model-based reconstruction needs coil maps");
  require(opts.canonical_frame >= 0 && opts.canonical_frame < frames, "canonical frame out of range");

  const DatasetBundle* src = &d;
  DatasetBundle low;
  if (opts.interpolation.kind == InterpolationKind::spatial) {
    low = low_resolution_dataset(d, opts.interpolation.factor);
    src = &low;
    res.render_ratio = static_cast<double>(d.image_size()) / low.image_size();
  }
  if (opts.interpolation.kind == InterpolationKind::temporal) {
    res.train_frames = kept_frames(frames, opts.interpolation.keep_every);
    require(std::find(res.train_frames.begin(), res.train_frames.end(), opts.canonical_frame) !=
                res.train_frames.end(),
            "canonical frame must be one of the kept frames");
  } else {
    for (int k = 0; k < frames; ++k) res.train_frames.push_back(k);
  }
  res.train_size = src->image_size();

  const auto zf = zero_filled_recon(src->acquisition, src->coils);
  const double peak = peak_magnitude(zf, res.train_frames);
  require(peak > 0.0, "acquisition is empty (zero-filled image is zero)");
  res.intensity_scale = 1.0 / peak;
  const auto problem = make_problem(src->acquisition, src->coils, res.train_frames, res.intensity_scale);
  const auto tc = opts.train_config();

  if (opts.method == Method::dainr) {
    DaInrConfig mc;
    mc.rows = mc.cols = res.train_size;
    mc.hash = opts.hash;
    mc.spatial_encoding.bands = opts.spatial_bands;
    mc.temporal_encoding.bands = opts.temporal_bands;
    mc.hidden_width = opts.hidden_width;
    mc.hidden_layers = opts.hidden_layers;
    mc.use_features = opts.use_features;
    mc.feature_channels = opts.feature_channels;
    mc.feature_input_frames = opts.interpolation.kind == InterpolationKind::temporal ? 2 : 1;
    mc.seed = opts.seed;
    DaInrModel<float> model(mc);
    std::vector<FeatureMap<float>> features;
    if (model.uses_features()) {
      auto scaled = zf;
      for (auto& f : scaled.frames)
        for (auto& v : f.data) v *= static_cast<float>(res.intensity_scale);
      features = compute_features(model, scaled, res.train_frames);
    }
    res.train = train_dainr(model, problem, tc, opts.canonical_frame, features);
    res.frames = render_sequence(model, frames, opts.canonical_frame, res.render_ratio, features).cast<double>();
    res.dainr = std::move(model);
  } else {
    HashInrConfig mc;
    mc.rows = mc.cols = res.train_size;
    mc.frames = frames;
    mc.hash = opts.hash;
    mc.hidden_width = opts.hidden_width;
    mc.hidden_layers = opts.hidden_layers;
    mc.seed = opts.seed;
    HashInrModel<float> model(mc);
    res.train = hashinr_optimize(model, problem, opts.weights, tc);
    res.frames = model.render_sequence().cast<double>();
    res.hashinr = std::move(model);
  }
  for (auto& f : res.frames.frames)
    for (auto& v : f.data) v /= res.intensity_scale;
  return res;
}

}  // namespace dainr
