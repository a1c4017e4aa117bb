#pragma once

#include <algorithm>
#include <cmath>
#include <string>
#include <vector>

#include "dainr/autodiff/tensor.hpp"
#include "dainr/core/image.hpp"
#include "dainr/core/rng.hpp"

namespace dainr {

// Channel-major feature map [channels][rows][cols].
template <class T>
struct FeatureMap {
  int channels = 0;
  int rows = 0;
  int cols = 0;
  std::vector<T> data;

  FeatureMap() = default;
  FeatureMap(int c, int r, int w)
      : channels(c), rows(r), cols(w), data(static_cast<std::size_t>(c) * r * w, T{0}) {}

  T& operator()(int c, int r, int w) {
    return data[(static_cast<std::size_t>(c) * rows + r) * cols + w];
  }
  T operator()(int c, int r, int w) const {
    return data[(static_cast<std::size_t>(c) * rows + r) * cols + w];
  }
};

// Bilinear resize with pixel-centre alignment and edge clamping.
template <class T>
FeatureMap<T> upscale_bilinear(const FeatureMap<T>& in, int rows, int cols) {
  require(rows >= 1 && cols >= 1, "upscale target must be non-empty");
  FeatureMap<T> out(in.channels, rows, cols);
  auto axis = [](int i, int n_out, int n_in, int& i0, int& i1, double& w) {
    const double src = std::clamp((i + 0.5) * n_in / n_out - 0.5, 0.0, n_in - 1.0);
    i0 = static_cast<int>(std::floor(src));
    i1 = std::min(i0 + 1, n_in - 1);
    w = src - i0;
  };
  for (int r = 0; r < rows; ++r) {
    int r0, r1;
    double wr;
    axis(r, rows, in.rows, r0, r1, wr);
    for (int c = 0; c < cols; ++c) {
      int c0, c1;
      double wc;
      axis(c, cols, in.cols, c0, c1, wc);
      for (int ch = 0; ch < in.channels; ++ch) {
        const double top = (1 - wc) * in(ch, r0, c0) + wc * in(ch, r0, c1);
        const double bottom = (1 - wc) * in(ch, r1, c0) + wc * in(ch, r1, c1);
        out(ch, r, c) = static_cast<T>((1 - wr) * top + wr * bottom);
      }
    }
  }
  return out;
}

// Frozen convolutional stack: 3x3 kernels, zero padding, ReLU between layers.
// Input channels are (Re, Im) of each supplied frame.
template <class T>
class FeatureExtractor {
 public:
  struct Layer {
    int in_channels = 0;
    int out_channels = 0;
    ad::Tensor<T> kernel;  // [out, in, 3, 3]
    ad::Tensor<T> bias;    // [out]
  };

  FeatureExtractor() = default;

  // Seeded He-normal random weights, zero biases.
  FeatureExtractor(int input_frames, int channels, std::uint64_t seed, int depth = 3) {
    require(input_frames >= 1 && channels >= 1 && depth >= 1, "invalid feature extractor shape");
    Rng rng(seed);
    int in = 2 * input_frames;
    for (int d = 0; d < depth; ++d) {
      const double stddev = std::sqrt(2.0 / (9.0 * in));
      std::vector<T> k(static_cast<std::size_t>(channels) * in * 9);
      for (auto& v : k) v = static_cast<T>(stddev * rng.normal());
      layers_.push_back(make_layer(in, channels, std::move(k),
                                   std::vector<T>(static_cast<std::size_t>(channels), T{0})));
      in = channels;
    }
  }

  explicit FeatureExtractor(std::vector<Layer> layers) : layers_(std::move(layers)) {
    require(!layers_.empty(), "feature extractor needs at least one layer");
    for (auto& l : layers_) {
      l.kernel.set_requires_grad(false);
      l.bias.set_requires_grad(false);
    }
  }

  static Layer make_layer(int in, int out, std::vector<T> kernel, std::vector<T> bias) {
    Layer l;
    l.in_channels = in;
    l.out_channels = out;
    l.kernel = ad::Tensor<T>::from(
        {static_cast<std::size_t>(out), static_cast<std::size_t>(in), 3, 3}, std::move(kernel));
    l.bias = ad::Tensor<T>::from({static_cast<std::size_t>(out)}, std::move(bias));
    return l;
  }

  bool empty() const { return layers_.empty(); }
  int input_channels() const { return layers_.front().in_channels; }
  int input_frames() const { return input_channels() / 2; }
  int output_channels() const { return layers_.back().out_channels; }
  const std::vector<Layer>& layers() const { return layers_; }

  std::vector<ad::Tensor<T>> parameters() const {
    std::vector<ad::Tensor<T>> out;
    for (const auto& l : layers_) {
      out.push_back(l.kernel);
      out.push_back(l.bias);
    }
    return out;
  }

  FeatureMap<T> extract(const std::vector<ComplexImage<T>>& frames) const {
    require(!layers_.empty(), "feature extractor is disabled");
    require(static_cast<int>(frames.size()) * 2 == input_channels(),
            "feature extractor expects " + std::to_string(input_frames()) + " frame(s), got " +
                std::to_string(frames.size()));
    const int rows = frames.front().rows;
    const int cols = frames.front().cols;
    FeatureMap<T> x(input_channels(), rows, cols);
    for (std::size_t f = 0; f < frames.size(); ++f) {
      require(frames[f].rows == rows && frames[f].cols == cols, "feature frames differ in size");
      for (int r = 0; r < rows; ++r)
        for (int c = 0; c < cols; ++c) {
          x(2 * f, r, c) = frames[f](r, c).real();
          x(2 * f + 1, r, c) = frames[f](r, c).imag();
        }
    }
    for (std::size_t l = 0; l < layers_.size(); ++l)
      x = convolve(layers_[l], x, /*relu=*/l + 1 < layers_.size());
    return x;
  }

 private:
  static FeatureMap<T> convolve(const Layer& layer, const FeatureMap<T>& in, bool relu) {
    FeatureMap<T> out(layer.out_channels, in.rows, in.cols);
    auto k = layer.kernel.values();
    auto b = layer.bias.values();
    for (int o = 0; o < layer.out_channels; ++o) {
      for (int r = 0; r < in.rows; ++r) {
        for (int c = 0; c < in.cols; ++c) {
          T acc = b[o];
          for (int i = 0; i < layer.in_channels; ++i) {
            const T* kern = k.data() + (static_cast<std::size_t>(o) * layer.in_channels + i) * 9;
            for (int dr = -1; dr <= 1; ++dr) {
              const int rr = r + dr;
              if (rr < 0 || rr >= in.rows) continue;
              for (int dc = -1; dc <= 1; ++dc) {
                const int cc = c + dc;
                if (cc < 0 || cc >= in.cols) continue;
                acc += kern[(dr + 1) * 3 + (dc + 1)] * in(i, rr, cc);
              }
            }
          }
          out(o, r, c) = relu ? std::max(acc, T{0}) : acc;
        }
      }
    }
    return out;
  }

  std::vector<Layer> layers_;
};

}  // namespace dainr
