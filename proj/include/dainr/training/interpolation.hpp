#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <string>
#include <vector>

#include "dainr/mri/fft.hpp"
#include "dainr/phantom/dataset.hpp"

namespace dainr {

enum class InterpolationKind { none, spatial, temporal };

struct InterpolationMode {
  InterpolationKind kind = InterpolationKind::none;
  double factor = 2.0;  // spatial subsample factor
  int keep_every = 2;   // temporal: frames k with k % keep_every == 0 are kept

  void validate() const {
    if (kind == InterpolationKind::spatial)
      require(factor == 1.2 || factor == 1.5 || factor == 2.0,
              "spatial subsample factor must be 1.2, 1.5 or 2");
    if (kind == InterpolationKind::temporal)
      require(keep_every == 2 || keep_every == 3, "temporal keep-every-k must be 2 or 3");
  }
};

inline InterpolationKind parse_interpolation(const std::string& name) {
  if (name == "none") return InterpolationKind::none;
  if (name == "spatial") return InterpolationKind::spatial;
  if (name == "temporal") return InterpolationKind::temporal;
  throw InvalidArgument("unknown interpolation mode '" + name + "' (expected none, spatial or temporal)");
}

inline std::string to_string(InterpolationKind k) {
  switch (k) {
    case InterpolationKind::spatial: return "spatial";
    case InterpolationKind::temporal: return "temporal";
    default: return "none";
  }
}

inline int low_resolution_size(int size, double factor) {
  return static_cast<int>(std::lround(size / factor));
}

inline std::vector<int> kept_frames(int frames, int keep_every) {
  require(frames >= 4, "temporal interpolation needs at least 4 frames");
  std::vector<int> out;
  for (int k = 0; k < frames; k += keep_every) out.push_back(k);
  return out;
}

inline std::vector<int> held_out_frames(int frames, int keep_every) {
  std::vector<int> out;
  for (int k = 0; k < frames; ++k)
    if (k % keep_every != 0) out.push_back(k);
  return out;
}

// Keeps the central n_out x n_out block of the image's k-space and evaluates
// the band-limited interpolant at the pixel centres of an n_out lattice over
// the same field of view. Intensities are preserved (a constant stays constant).
template <class T>
ComplexImage<T> crop_kspace(const ComplexImage<T>& img, int n_out) {
  require(img.rows == img.cols, "k-space cropping expects square images");
  const int n = img.rows;
  require(n_out >= 1 && n_out <= n, "cropped size must be between 1 and the image size");
  std::vector<std::complex<double>> k(img.data.begin(), img.data.end());
  Fft2<double>(n, n).forward(k);
  std::vector<int> freqs;
  for (int m = -(n_out / 2); m < n_out - n_out / 2; ++m) freqs.push_back(m);
  const int nf = static_cast<int>(freqs.size());
  // basis[j][f] = exp(2 pi i m_f u_j / n), u_j the input-pixel position of output centre j.
  std::vector<std::complex<double>> basis(static_cast<std::size_t>(n_out) * nf);
  for (int j = 0; j < n_out; ++j) {
    const double u = (2.0 * j + 1.0) * n / (2.0 * n_out) - 0.5;
    for (int f = 0; f < nf; ++f)
      basis[static_cast<std::size_t>(j) * nf + f] =
          std::polar(1.0, 2.0 * std::numbers::pi * freqs[f] * u / n);
  }
  auto wrap = [n](int m) { return ((m % n) + n) % n; };
  // Columns first (x), restricted to the kept row frequencies.
  std::vector<std::complex<double>> partial(static_cast<std::size_t>(nf) * n_out);
  for (int fr = 0; fr < nf; ++fr) {
    const auto* row = &k[static_cast<std::size_t>(wrap(freqs[fr])) * n];
    for (int j = 0; j < n_out; ++j) {
      std::complex<double> acc = 0.0;
      for (int fc = 0; fc < nf; ++fc) acc += row[wrap(freqs[fc])] * basis[static_cast<std::size_t>(j) * nf + fc];
      partial[static_cast<std::size_t>(fr) * n_out + j] = acc;
    }
  }
  ComplexImage<T> out(n_out, n_out);
  const double norm = 1.0 / (static_cast<double>(n) * n);
  for (int i = 0; i < n_out; ++i)
    for (int j = 0; j < n_out; ++j) {
      std::complex<double> acc = 0.0;
      for (int fr = 0; fr < nf; ++fr)
        acc += partial[static_cast<std::size_t>(fr) * n_out + j] * basis[static_cast<std::size_t>(i) * nf + fr];
      out(i, j) = std::complex<T>(acc * norm);
    }
  return out;
}

// Mean over non-overlapping factor x factor blocks.
inline RealImage box_downsample(const RealImage& img, int factor) {
  require(factor >= 1 && img.rows % factor == 0 && img.cols % factor == 0,
          "image size must be a multiple of the downsampling factor");
  RealImage out(img.rows / factor, img.cols / factor);
  for (int r = 0; r < img.rows; ++r)
    for (int c = 0; c < img.cols; ++c) out(r / factor, c / factor) += img(r, c);
  for (auto& v : out.data) v /= factor * factor;
  return out;
}

template <class T>
ComplexImage<T> box_downsample(const ComplexImage<T>& img, int factor) {
  require(factor >= 1 && img.rows % factor == 0 && img.cols % factor == 0,
          "image size must be a multiple of the downsampling factor");
  ComplexImage<T> out(img.rows / factor, img.cols / factor);
  for (int r = 0; r < img.rows; ++r)
    for (int c = 0; c < img.cols; ++c) out(r / factor, c / factor) += img(r, c);
  for (auto& v : out.data) v /= static_cast<T>(factor * factor);
  return out;
}

// Low-resolution training data for spatial interpolation: ground truth and
// coil maps cropped in k-space to round(N / factor), maps re-normalised, and
// the acquisition re-simulated with the original trajectory settings.
inline DatasetBundle low_resolution_dataset(const DatasetBundle& d, double factor) {
  require(d.ground_truth.has_value(), "spatial interpolation needs ground truth to re-simulate");
  require(d.has_coils(), "spatial interpolation needs coil maps");
  require(d.acquisition.trajectory_kind == kRadialTrajectory,
          "spatial interpolation needs a radial acquisition");
  const int n = d.image_size();
  const int n_low = low_resolution_size(n, factor);
  ImageSequence<double> gt;
  for (const auto& f : d.ground_truth->frames) gt.frames.push_back(crop_kspace(f.cast<double>(), n_low));
  CoilSensitivities<double> maps;
  for (const auto& m : d.coils.maps) maps.maps.push_back(crop_kspace(m.cast<double>(), n_low));
  normalize_sum_of_squares(maps);
  const auto gt32 = gt.cast<float>();
  const auto maps32 = maps.cast<float>();
  const auto& acq = d.acquisition;
  SimulationOptions sim;
  sim.spokes_per_frame = acq.spokes_per_frame;
  sim.samples_per_spoke =
      acq.samples_per_spoke == n ? n_low : static_cast<int>(std::lround(acq.samples_per_spoke / factor));
  sim.start_index = acq.start_index;
  sim.op = d.op;
  sim.noise_std = d.noise_std;
  sim.noise_seed = d.noise_seed;
  DatasetBundle low;
  low.ground_truth = gt32;
  low.coils = maps32;
  low.acquisition = retrospective_undersample(gt32.cast<double>(), maps32.cast<double>(), sim).cast<float>();
  low.op = d.op;
  low.noise_std = d.noise_std;
  low.noise_seed = d.noise_seed;
  low.seed = d.seed;
  low.phantom = d.phantom;
  return low;
}

}  // namespace dainr
