#pragma once

#include <complex>
#include <span>
#include <vector>

#include "dainr/autodiff/ops.hpp"
#include "dainr/mri/forward_model.hpp"

namespace dainr {

// sum_c || F_u S_c d - m_c ||_1 over real and imaginary parts. `target` is the
// frame's samples in [C, K, 2] interleaved layout.
template <class T, class Op>
ad::Tensor<T> dainr_loss(ad::Tape<T>& tape, const ad::Tensor<T>& pixels,
                         const CoilSensitivities<T>& coils, const Op& op,
                         std::span<const T> target) {
  return ad::l1_distance(tape, forward_model(tape, pixels, coils, op), target);
}

// sum_c || F_u S_c d - m_c ||_2^2, the data term of the direct-mapping baseline.
template <class T, class Op>
ad::Tensor<T> squared_data_term(ad::Tape<T>& tape, const ad::Tensor<T>& pixels,
                                const CoilSensitivities<T>& coils, const Op& op,
                                std::span<const T> target) {
  return ad::squared_l2_distance(tape, forward_model(tape, pixels, coils, op), target);
}

// Value-only evaluation of the l1 loss for a complex frame.
template <class T, class Op>
double dainr_loss_value(const ComplexImage<T>& frame, const CoilSensitivities<T>& coils,
                        const Op& op, const CoilSamples<T>& measured) {
  auto predicted = forward_model(frame, coils, op);
  require(predicted.size() == measured.size(), "coil count mismatch");
  double total = 0.0;
  for (std::size_t c = 0; c < predicted.size(); ++c) {
    require(predicted[c].size() == measured[c].size(), "sample count mismatch");
    for (std::size_t s = 0; s < predicted[c].size(); ++s) {
      const auto r = std::complex<double>(predicted[c][s]) - std::complex<double>(measured[c][s]);
      total += std::abs(r.real()) + std::abs(r.imag());
    }
  }
  return total;
}

}  // namespace dainr
