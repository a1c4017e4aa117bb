#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dainr/autodiff/tape.hpp"
#include "dainr/core/image.hpp"
#include "dainr/mri/coils.hpp"

namespace dainr {

template <class T>
using CoilSamples = std::vector<std::vector<std::complex<T>>>;

// m_c = F_u (S_c .* d) for every coil. Op is Ndft<T> or GriddedNufft<T>.
template <class T, class Op>
CoilSamples<T> forward_model(const ComplexImage<T>& image, const CoilSensitivities<T>& coils,
                             const Op& op) {
  require(coils.count() >= 1, "forward model needs at least one coil");
  require(coils.rows() == image.rows && coils.cols() == image.cols,
          "coil maps and image differ in size");
  CoilSamples<T> out;
  out.reserve(coils.count());
  ComplexImage<T> weighted(image.rows, image.cols);
  for (const auto& map : coils.maps) {
    for (std::size_t p = 0; p < image.size(); ++p) weighted.data[p] = map.data[p] * image.data[p];
    out.push_back(op.forward(weighted));
  }
  return out;
}

// sum_c conj(S_c) .* F_u^H m_c, optionally density weighted.
template <class T, class Op>
ComplexImage<T> forward_model_adjoint(const CoilSamples<T>& samples,
                                      const CoilSensitivities<T>& coils, const Op& op,
                                      bool apply_density) {
  require(static_cast<int>(samples.size()) == coils.count(), "coil count mismatch");
  ComplexImage<T> out(coils.rows(), coils.cols());
  for (int c = 0; c < coils.count(); ++c) {
    auto img = op.adjoint(samples[c], apply_density);
    const auto& map = coils.maps[c];
    for (std::size_t p = 0; p < out.size(); ++p) out.data[p] += std::conj(map.data[p]) * img.data[p];
  }
  return out;
}

// Differentiable forward model: pixels [P, 2] (Re, Im; P = rows * cols) to
// samples [C, K, 2]. The backward pass applies the adjoint to the incoming
// gradient. `coils` and `op` must outlive the tape's backward sweep.
template <class T, class Op>
ad::Tensor<T> forward_model(ad::Tape<T>& tape, const ad::Tensor<T>& pixels,
                            const CoilSensitivities<T>& coils, const Op& op) {
  const int rows = op.rows();
  const int cols = op.cols();
  require(pixels.numel() == static_cast<std::size_t>(rows) * cols * 2,
          "forward model: pixel tensor does not match operator size");
  ComplexImage<T> image(rows, cols);
  auto pv = pixels.values();
  for (std::size_t i = 0; i < image.size(); ++i) image.data[i] = {pv[2 * i], pv[2 * i + 1]};
  auto samples = forward_model(image, coils, op);
  const std::size_t k = op.sample_count();
  const bool rg = pixels.requires_grad();
  auto y = ad::Tensor<T>::zeros({static_cast<std::size_t>(coils.count()), k, 2}, rg);
  auto yv = y.values();
  for (int c = 0; c < coils.count(); ++c)
    for (std::size_t s = 0; s < k; ++s) {
      yv[(c * k + s) * 2] = samples[c][s].real();
      yv[(c * k + s) * 2 + 1] = samples[c][s].imag();
    }
  if (rg) {
    tape.record(y, [pixels, y, coils_ptr = &coils, op_ptr = &op, k] {
      auto gy = y.grad();
      CoilSamples<T> g(coils_ptr->count(), std::vector<std::complex<T>>(k));
      for (int c = 0; c < coils_ptr->count(); ++c)
        for (std::size_t s = 0; s < k; ++s)
          g[c][s] = {gy[(c * k + s) * 2], gy[(c * k + s) * 2 + 1]};
      auto back = forward_model_adjoint(g, *coils_ptr, *op_ptr, false);
      auto gp = pixels.grad();
      for (std::size_t i = 0; i < back.size(); ++i) {
        gp[2 * i] += back.data[i].real();
        gp[2 * i + 1] += back.data[i].imag();
      }
    });
  }
  return y;
}

// Flattens per-coil samples into the [C, K, 2] interleaved layout.
template <class T>
std::vector<T> interleave(const CoilSamples<T>& samples) {
  std::vector<T> out;
  for (const auto& coil : samples)
    for (const auto& s : coil) {
      out.push_back(s.real());
      out.push_back(s.imag());
    }
  return out;
}

}  // namespace dainr
