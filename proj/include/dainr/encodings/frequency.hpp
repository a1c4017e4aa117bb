#pragma once

#include <cmath>
#include <numbers>
#include <vector>

#include "dainr/autodiff/tape.hpp"
#include "dainr/core/error.hpp"

namespace dainr {

struct FrequencyEncodingConfig {
  int bands = 10;

  int output_dim_per_input() const { return 2 * bands; }
  void validate() const { require(bands >= 1, "frequency encoding needs at least one band"); }
};

// gamma(p) = [sin(2^0 pi p), cos(2^0 pi p), ..., sin(2^{I-1} pi p), cos(2^{I-1} pi p)]
inline std::vector<double> frequency_encode(double p, int bands) {
  require(bands >= 1, "frequency encoding needs at least one band");
  std::vector<double> out(2 * static_cast<std::size_t>(bands));
  double freq = std::numbers::pi;
  for (int i = 0; i < bands; ++i, freq *= 2.0) {
    out[2 * i] = std::sin(freq * p);
    out[2 * i + 1] = std::cos(freq * p);
  }
  return out;
}

// Batched, differentiable variant: p [B, D] -> [B, D * 2I]; each input column
// expands in place to its 2I features.
template <class T>
ad::Tensor<T> frequency_encode(ad::Tape<T>& tape, const ad::Tensor<T>& p, int bands) {
  require(bands >= 1, "frequency encoding needs at least one band");
  require(p.rank() == 2, "frequency_encode expects a [B, D] tensor");
  const std::size_t batch = p.dim(0);
  const std::size_t dims = p.dim(1);
  const std::size_t width = dims * 2 * bands;
  const bool rg = p.requires_grad();
  auto y = ad::Tensor<T>::zeros({batch, width}, rg);
  auto pv = p.values();
  auto yv = y.values();
  for (std::size_t b = 0; b < batch; ++b) {
    for (std::size_t d = 0; d < dims; ++d) {
      const T x = pv[b * dims + d];
      T freq = std::numbers::pi_v<T>;
      T* row = yv.data() + b * width + d * 2 * bands;
      for (int i = 0; i < bands; ++i, freq *= T{2}) {
        row[2 * i] = std::sin(freq * x);
        row[2 * i + 1] = std::cos(freq * x);
      }
    }
  }
  if (rg) {
    tape.record(y, [p, y, batch, dims, width, bands] {
      auto gp = p.grad();
      auto gy = y.grad();
      auto yv = y.values();
      for (std::size_t b = 0; b < batch; ++b) {
        for (std::size_t d = 0; d < dims; ++d) {
          const std::size_t base = b * width + d * 2 * bands;
          T freq = std::numbers::pi_v<T>;
          T acc{0};
          for (int i = 0; i < bands; ++i, freq *= T{2}) {
            // d sin(a p) = a cos(a p), d cos(a p) = -a sin(a p)
            acc += freq * (gy[base + 2 * i] * yv[base + 2 * i + 1] -
                           gy[base + 2 * i + 1] * yv[base + 2 * i]);
          }
          gp[b * dims + d] += acc;
        }
      }
    });
  }
  return y;
}

}  // namespace dainr
