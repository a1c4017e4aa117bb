#pragma once

#include <cmath>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "dainr/autodiff/ops.hpp"
#include "dainr/core/image.hpp"
#include "dainr/core/rng.hpp"
#include "dainr/encodings/frequency.hpp"
#include "dainr/encodings/hash_grid.hpp"
#include "dainr/networks/feature_extractor.hpp"
#include "dainr/networks/mlp.hpp"

namespace dainr {

// Pixel-centre lattice over [-1, 1]^2 as a [rows * cols, 2] tensor of (x, y),
// x along columns.
template <class T>
ad::Tensor<T> coordinate_lattice(int rows, int cols) {
  require(rows >= 1 && cols >= 1, "lattice must be non-empty");
  std::vector<T> v(static_cast<std::size_t>(rows) * cols * 2);
  for (int r = 0; r < rows; ++r)
    for (int c = 0; c < cols; ++c) {
      const std::size_t i = static_cast<std::size_t>(r) * cols + c;
      v[2 * i] = static_cast<T>(lattice_coordinate(c, cols));
      v[2 * i + 1] = static_cast<T>(lattice_coordinate(r, rows));
    }
  return ad::Tensor<T>::from({static_cast<std::size_t>(rows) * cols, 2}, std::move(v));
}

// Maps frame indices to the deformation network's time coordinate. Frames are
// spread evenly over an interval of length 2 and shifted so that the canonical
// frame sits exactly at t = 0.
struct TimeAxis {
  int frames = 2;
  int canonical_frame = 0;

  double operator()(double frame) const {
    require(frames >= 2, "time axis needs at least two frames");
    return 2.0 * (frame - canonical_frame) / (frames - 1);
  }
};

// Output size for a scale ratio r >= 1 applied to a base size.
inline int scaled_size(int base, double ratio) {
  require(ratio >= 1.0, "scale ratio must be >= 1");
  return static_cast<int>(std::lround(base * ratio));
}

// Nearest-neighbour source index of fine pixel i when resampling n_in -> n_out.
inline int nearest_source(int i, int n_out, int n_in) {
  const int s = static_cast<int>(std::floor((i + 0.5) * n_in / n_out));
  return std::clamp(s, 0, n_in - 1);
}

struct DaInrConfig {
  int rows = 64;
  int cols = 64;
  HashGridConfig hash;
  FrequencyEncodingConfig spatial_encoding{10};
  FrequencyEncodingConfig temporal_encoding{6};
  int hidden_width = 64;
  int hidden_layers = 5;
  double deformation_init_scale = 1e-4;
  bool use_features = false;
  int feature_channels = 16;
  int feature_input_frames = 1;
  std::uint64_t seed = 0;

  int deformation_input_dim() const {
    return 2 * spatial_encoding.output_dim_per_input() + temporal_encoding.output_dim_per_input();
  }
  int canonical_input_dim() const {
    return hash.output_dim() + (use_features ? feature_channels : 0);
  }

  void validate() const {
    require(rows >= 1 && cols >= 1, "model image size must be positive");
    hash.validate();
    spatial_encoding.validate();
    temporal_encoding.validate();
    require(feature_input_frames == 1 || feature_input_frames == 2,
            "feature extractor takes one or two frames");
  }
};

// Deformation network over frequency-encoded (x, y, t) plus a canonical network
// over the hash-encoded deformed coordinate (optionally concatenated with frozen
// image features).
template <class T>
class DaInrModel {
 public:
  DaInrModel() = default;

  explicit DaInrModel(const DaInrConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(cfg_.seed);
    deformation_ = Mlp<T>({cfg_.deformation_input_dim(), 2, cfg_.hidden_width, cfg_.hidden_layers},
                          rng, cfg_.deformation_init_scale);
    grid_ = HashGrid<T, 2>(cfg_.hash, rng);
    canonical_ = Mlp<T>({cfg_.canonical_input_dim(), 2, cfg_.hidden_width, cfg_.hidden_layers}, rng);
    if (cfg_.use_features)
      extractor_ = FeatureExtractor<T>(cfg_.feature_input_frames, cfg_.feature_channels,
                                       cfg_.seed ^ 0x5eedf00dULL);
  }

  const DaInrConfig& config() const { return cfg_; }
  Mlp<T>& deformation_net() { return deformation_; }
  Mlp<T>& canonical_net() { return canonical_; }
  HashGrid<T, 2>& hash_grid() { return grid_; }
  const Mlp<T>& deformation_net() const { return deformation_; }
  const Mlp<T>& canonical_net() const { return canonical_; }
  const HashGrid<T, 2>& hash_grid() const { return grid_; }
  const FeatureExtractor<T>& feature_extractor() const { return extractor_; }
  bool uses_features() const { return cfg_.use_features; }

  // Displacement of each coordinate into canonical space. The canonical time
  // t = 0 returns exact zeros without evaluating the network.
  ad::Tensor<T> deform(ad::Tape<T>& tape, const ad::Tensor<T>& coords, double t) const {
    require(coords.rank() == 2 && coords.dim(1) == 2, "deform expects [B, 2] coordinates");
    const std::size_t batch = coords.dim(0);
    if (t == 0.0) return ad::Tensor<T>::zeros({batch, 2});
    auto spatial = frequency_encode(tape, coords, cfg_.spatial_encoding.bands);
    auto times = ad::Tensor<T>::from({batch, 1}, std::vector<T>(batch, static_cast<T>(t)));
    auto temporal = frequency_encode(tape, times, cfg_.temporal_encoding.bands);
    return deformation_.forward(tape, ad::concat_columns(tape, {spatial, temporal}));
  }

  // (Re, Im) at canonical coordinates; features [B, c'] iff the extractor is on.
  ad::Tensor<T> canonical_query(ad::Tape<T>& tape, const ad::Tensor<T>& coords,
                                const ad::Tensor<T>* features = nullptr) const {
    auto encoded = grid_.encode(tape, coords);
    if (cfg_.use_features) {
      require(features != nullptr, "canonical query needs image features");
      require(features->rank() == 2 && features->dim(0) == coords.dim(0) &&
                  features->dim(1) == static_cast<std::size_t>(cfg_.feature_channels),
              "feature dimension mismatch: expected [" + std::to_string(coords.dim(0)) + ", " +
                  std::to_string(cfg_.feature_channels) + "], got " +
                  ad::to_string(features->shape()));
      encoded = ad::concat_columns(tape, {encoded, *features});
    } else {
      require(features == nullptr, "feature dimension mismatch: features supplied but disabled");
    }
    return canonical_.forward(tape, encoded);
  }

  // Renders frame time t on a lattice scaled by r as a [rows' * cols', 2]
  // tensor. The deformation is evaluated on the base lattice and resampled to
  // the output lattice by nearest neighbour; features are resized bilinearly.
  ad::Tensor<T> render(ad::Tape<T>& tape, double t, double ratio = 1.0,
                       const FeatureMap<T>* features = nullptr) const {
    const int out_rows = scaled_size(cfg_.rows, ratio);
    const int out_cols = scaled_size(cfg_.cols, ratio);
    auto base = coordinate_lattice<T>(cfg_.rows, cfg_.cols);
    auto offset = deform(tape, base, t);
    ad::Tensor<T> deformed;
    if (out_rows == cfg_.rows && out_cols == cfg_.cols) {
      deformed = ad::add(tape, base, offset);
    } else {
      std::vector<std::size_t> source(static_cast<std::size_t>(out_rows) * out_cols);
      for (int r = 0; r < out_rows; ++r)
        for (int c = 0; c < out_cols; ++c)
          source[static_cast<std::size_t>(r) * out_cols + c] =
              static_cast<std::size_t>(nearest_source(r, out_rows, cfg_.rows)) * cfg_.cols +
              nearest_source(c, out_cols, cfg_.cols);
      auto fine = coordinate_lattice<T>(out_rows, out_cols);
      deformed = ad::add(tape, fine, ad::gather_rows(tape, offset, std::move(source)));
    }
    if (!cfg_.use_features) {
      require(features == nullptr, "features supplied to a model without an extractor");
      return canonical_query(tape, deformed);
    }
    require(features != nullptr, "model expects image features");
    require(features->channels == cfg_.feature_channels, "feature channel count mismatch");
    auto resized = upscale_bilinear(*features, out_rows, out_cols);
    auto per_pixel = ad::Tensor<T>::zeros(
        {static_cast<std::size_t>(out_rows) * out_cols,
         static_cast<std::size_t>(cfg_.feature_channels)});
    auto fv = per_pixel.values();
    const std::size_t pixels = static_cast<std::size_t>(out_rows) * out_cols;
    for (int ch = 0; ch < cfg_.feature_channels; ++ch)
      for (std::size_t p = 0; p < pixels; ++p)
        fv[p * cfg_.feature_channels + ch] = resized.data[ch * pixels + p];
    return canonical_query(tape, deformed, &per_pixel);
  }

  ComplexImage<T> render_frame(double t, double ratio = 1.0,
                               const FeatureMap<T>* features = nullptr) const {
    ad::Tape<T> tape;
    auto out = render(tape, t, ratio, features);
    return to_image(out, scaled_size(cfg_.rows, ratio), scaled_size(cfg_.cols, ratio));
  }

  // Frozen features of the zero-filled frame(s) at base resolution.
  FeatureMap<T> extract_features(const std::vector<ComplexImage<T>>& frames) const {
    require(cfg_.use_features, "feature extractor is disabled");
    return extractor_.extract(frames);
  }

  std::vector<ad::Tensor<T>> parameters() const {
    auto out = deformation_.parameters();
    out.push_back(grid_.table());
    for (auto& p : canonical_.parameters()) out.push_back(p);
    return out;
  }

  // Trainable parameters first, frozen extractor weights last.
  std::vector<std::pair<std::string, ad::Tensor<T>>> named_parameters() const {
    auto out = deformation_.named_parameters("deformation");
    out.emplace_back("hash.table", grid_.table());
    for (auto& p : canonical_.named_parameters("canonical")) out.push_back(p);
    const auto& layers = extractor_.layers();
    for (std::size_t l = 0; l < layers.size(); ++l) {
      out.emplace_back("extractor.layer" + std::to_string(l) + ".kernel", layers[l].kernel);
      out.emplace_back("extractor.layer" + std::to_string(l) + ".bias", layers[l].bias);
    }
    return out;
  }

  static ComplexImage<T> to_image(const ad::Tensor<T>& pixels, int rows, int cols) {
    require(pixels.numel() == static_cast<std::size_t>(rows) * cols * 2,
            "pixel tensor does not match image size");
    ComplexImage<T> img(rows, cols);
    auto v = pixels.values();
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = {v[2 * i], v[2 * i + 1]};
    return img;
  }

 private:
  DaInrConfig cfg_;
  Mlp<T> deformation_;
  HashGrid<T, 2> grid_;
  Mlp<T> canonical_;
  FeatureExtractor<T> extractor_;
};

}  // namespace dainr
