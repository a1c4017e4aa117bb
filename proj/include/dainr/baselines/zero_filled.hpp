#pragma once

#include <cmath>

#include "dainr/mri/acquisition.hpp"
#include "dainr/mri/ndft.hpp"
#include "dainr/mri/nufft.hpp"
#include "dainr/phantom/simulate.hpp"

namespace dainr {

// Density-compensated adjoint of one frame, coil-combined with conj(S_c)
// when maps are given, otherwise the root sum of squares of the coil images.
template <class T, class Op>
ComplexImage<T> zero_filled_frame(const CoilSamples<T>& samples, const CoilSensitivities<T>& coils,
                                  const Op& op) {
  if (coils.count() > 0) return forward_model_adjoint(samples, coils, op, true);
  ComplexImage<T> out(op.rows(), op.cols());
  std::vector<double> sos(out.size(), 0.0);
  for (const auto& coil : samples) {
    auto img = op.adjoint(coil, true);
    for (std::size_t p = 0; p < out.size(); ++p) sos[p] += std::norm(std::complex<double>(img.data[p]));
  }
  for (std::size_t p = 0; p < out.size(); ++p) out.data[p] = static_cast<T>(std::sqrt(sos[p]));
  return out;
}

template <class T>
ImageSequence<T> zero_filled_recon(const KSpaceAcquisition<T>& acq, const CoilSensitivities<T>& coils,
                                   OperatorKind kind = OperatorKind::gridded) {
  require(acq.frames() >= 1, "acquisition has no frames");
  require(coils.count() == 0 || coils.count() == acq.coils(), "coil map count does not match data");
  ImageSequence<T> out;
  const int n = acq.image_size;
  for (int f = 0; f < acq.frames(); ++f) {
    if (kind == OperatorKind::exact)
      out.frames.push_back(zero_filled_frame(acq.samples[f], coils, Ndft<T>(acq.trajectories[f], n)));
    else
      out.frames.push_back(
          zero_filled_frame(acq.samples[f], coils, GriddedNufft<T>(acq.trajectories[f], n)));
  }
  return out;
}

}  // namespace dainr
