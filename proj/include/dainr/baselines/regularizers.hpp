#pragma once

#include <cmath>
#include <complex>
#include <string>
#include <vector>

#include <Eigen/Dense>
#include <Eigen/SVD>

#include "dainr/autodiff/tape.hpp"
#include "dainr/core/image.hpp"

namespace dainr {

struct RegularizerWeights {
  double temporal_tv = 0.0;  // lambda_S
  double low_rank = 0.0;     // lambda_L

  void validate() const {
    require(temporal_tv >= 0.0 && low_rank >= 0.0, "regularizer weights must be non-negative");
  }
};

namespace detail {

// Frames stored as [frames * pixels, 2] (re, im), frame-major.
template <class T>
std::complex<double> pixel(std::span<const T> v, std::size_t index) {
  return {static_cast<double>(v[2 * index]), static_cast<double>(v[2 * index + 1])};
}

template <class T>
Eigen::MatrixXcd casorati(std::span<const T> v, int frames) {
  const std::size_t pixels = v.size() / 2 / frames;
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(pixels), frames);
  for (int t = 0; t < frames; ++t)
    for (std::size_t p = 0; p < pixels; ++p) m(p, t) = pixel(v, t * pixels + p);
  return m;
}

struct NuclearNormResult {
  double value = 0.0;
  Eigen::MatrixXcd subgradient;  // U V^H
};

inline NuclearNormResult nuclear_norm_svd(const Eigen::MatrixXcd& m, bool with_subgradient) {
  NuclearNormResult out;
  if (m.size() == 0) return out;
  const unsigned options = with_subgradient ? (Eigen::ComputeThinU | Eigen::ComputeThinV) : 0u;
  Eigen::BDCSVD<Eigen::MatrixXcd> svd(m, options);
  if (svd.info() != Eigen::Success)
    throw NumericalError("nuclear norm: SVD of the " + std::to_string(m.rows()) + "x" +
                         std::to_string(m.cols()) + " Casorati matrix did not converge (info " +
                         std::to_string(static_cast<int>(svd.info())) + ")");
  out.value = svd.singularValues().sum();
  if (with_subgradient) out.subgradient = svd.matrixU() * svd.matrixV().adjoint();
  return out;
}

inline void require_frames(std::size_t values, int frames, const char* what) {
  require(frames >= 1 && values % (2 * static_cast<std::size_t>(frames)) == 0,
          std::string(what) + ": tensor does not split into the given frame count");
}

}  // namespace detail

// sum_t sum_x |d_{t+1}(x) - d_t(x)|
template <class T>
double temporal_tv(const ImageSequence<T>& d) {
  require(d.size() >= 2, "temporal TV needs at least two frames");
  double total = 0.0;
  for (int t = 0; t + 1 < d.size(); ++t)
    for (std::size_t p = 0; p < d[t].size(); ++p)
      total += std::abs(std::complex<double>(d[t + 1].data[p]) - std::complex<double>(d[t].data[p]));
  return total;
}

// Sum of singular values of the pixels x frames Casorati matrix.
template <class T>
double nuclear_norm(const ImageSequence<T>& d) {
  if (d.size() == 0) return 0.0;
  Eigen::MatrixXcd m(static_cast<Eigen::Index>(d[0].size()), d.size());
  for (int t = 0; t < d.size(); ++t)
    for (std::size_t p = 0; p < d[t].size(); ++p) m(p, t) = std::complex<double>(d[t].data[p]);
  return detail::nuclear_norm_svd(m, false).value;
}

namespace ad {

// Differentiable temporal TV of frames stacked as [frames * pixels, 2]. The
// gradient of |z| is z / |z|, taken as 0 at z = 0.
template <class T>
Tensor<T> temporal_tv(Tape<T>& tape, const Tensor<T>& stacked, int frames) {
  require(frames >= 2, "temporal TV needs at least two frames");
  dainr::detail::require_frames(stacked.numel(), frames, "temporal_tv");
  const std::size_t pixels = stacked.numel() / 2 / frames;
  auto v = stacked.values();
  double total = 0.0;
  for (int t = 0; t + 1 < frames; ++t)
    for (std::size_t p = 0; p < pixels; ++p)
      total += std::abs(dainr::detail::pixel(v, (t + 1) * pixels + p) -
                        dainr::detail::pixel(v, t * pixels + p));
  const bool rg = stacked.requires_grad();
  auto y = Tensor<T>::zeros({}, rg);
  y.values()[0] = static_cast<T>(total);
  if (rg) {
    tape.record(y, [stacked, y, frames, pixels] {
      const double g = y.grad()[0];
      auto v = stacked.values();
      auto gx = stacked.grad();
      for (int t = 0; t + 1 < frames; ++t)
        for (std::size_t p = 0; p < pixels; ++p) {
          const std::size_t a = t * pixels + p;
          const std::size_t b = (t + 1) * pixels + p;
          const auto diff = dainr::detail::pixel(v, b) - dainr::detail::pixel(v, a);
          const double mag = std::abs(diff);
          if (mag == 0.0) continue;
          const auto unit = diff / mag * g;
          gx[2 * b] += static_cast<T>(unit.real());
          gx[2 * b + 1] += static_cast<T>(unit.imag());
          gx[2 * a] -= static_cast<T>(unit.real());
          gx[2 * a + 1] -= static_cast<T>(unit.imag());
        }
    });
  }
  return y;
}

// Differentiable nuclear norm; subgradient U V^H of the thin SVD.
template <class T>
Tensor<T> nuclear_norm(Tape<T>& tape, const Tensor<T>& stacked, int frames) {
  dainr::detail::require_frames(stacked.numel(), frames, "nuclear_norm");
  const bool rg = stacked.requires_grad();
  auto result = dainr::detail::nuclear_norm_svd(dainr::detail::casorati(stacked.values(), frames), rg);
  auto y = Tensor<T>::zeros({}, rg);
  y.values()[0] = static_cast<T>(result.value);
  if (rg) {
    tape.record(y, [stacked, y, frames, sub = std::move(result.subgradient)] {
      const double g = y.grad()[0];
      auto gx = stacked.grad();
      const std::size_t pixels = stacked.numel() / 2 / frames;
      for (int t = 0; t < frames; ++t)
        for (std::size_t p = 0; p < pixels; ++p) {
          const std::size_t i = t * pixels + p;
          gx[2 * i] += static_cast<T>(g * sub(p, t).real());
          gx[2 * i + 1] += static_cast<T>(g * sub(p, t).imag());
        }
    });
  }
  return y;
}

}  // namespace ad
}  // namespace dainr
