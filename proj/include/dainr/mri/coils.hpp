#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <vector>

#include "dainr/core/image.hpp"
#include "dainr/core/rng.hpp"

namespace dainr {

template <class T>
struct CoilSensitivities {
  std::vector<ComplexImage<T>> maps;

  int count() const { return static_cast<int>(maps.size()); }
  int rows() const { return maps.empty() ? 0 : maps.front().rows; }
  int cols() const { return maps.empty() ? 0 : maps.front().cols; }

  template <class U>
  CoilSensitivities<U> cast() const {
    CoilSensitivities<U> out;
    for (const auto& m : maps) out.maps.push_back(m.template cast<U>());
    return out;
  }
};

// Scales the maps so that sum_c |S_c|^2 = 1 wherever any coil has support.
template <class T>
void normalize_sum_of_squares(CoilSensitivities<T>& coils) {
  require(coils.count() >= 1, "no coil maps to normalise");
  const std::size_t pixels = coils.maps.front().size();
  for (std::size_t p = 0; p < pixels; ++p) {
    double sos = 0.0;
    for (const auto& m : coils.maps) sos += std::norm(std::complex<double>(m.data[p]));
    if (sos <= 0.0) continue;
    const double inv = 1.0 / std::sqrt(sos);
    for (auto& m : coils.maps) m.data[p] = std::complex<T>(std::complex<double>(m.data[p]) * inv);
  }
}

// Smooth Gaussian-lobed receive profiles centred just outside the field of view
// at evenly spaced angles, with seeded phase offsets and gentle linear phase.
// Maps are sum-of-squares normalised and phase-referenced to coil 0, which is
// therefore real and non-negative.
template <class T>
CoilSensitivities<T> generate_coil_maps(int rows, int cols, int coil_count, std::uint64_t seed) {
  require(rows >= 1 && cols >= 1, "coil map size must be positive");
  require(coil_count >= 1, "need at least one coil");
  Rng rng(seed);
  CoilSensitivities<double> work;
  constexpr double kRadius = 1.3;
  constexpr double kSigma = 0.9;
  for (int c = 0; c < coil_count; ++c) {
    const double angle = 2.0 * std::numbers::pi * c / coil_count + rng.uniform(-0.1, 0.1);
    const double cx = kRadius * std::cos(angle);
    const double cy = kRadius * std::sin(angle);
    const double phase0 = rng.uniform(0.0, 2.0 * std::numbers::pi);
    const double gx = rng.uniform(-0.5, 0.5);
    const double gy = rng.uniform(-0.5, 0.5);
    ComplexImage<double> map(rows, cols);
    for (int r = 0; r < rows; ++r) {
      const double y = lattice_coordinate(r, rows);
      for (int k = 0; k < cols; ++k) {
        const double x = lattice_coordinate(k, cols);
        const double d2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
        const double mag = std::exp(-d2 / (2.0 * kSigma * kSigma));
        map(r, k) = std::polar(mag, phase0 + gx * x + gy * y);
      }
    }
    work.maps.push_back(std::move(map));
  }
  normalize_sum_of_squares(work);
  const std::size_t pixels = static_cast<std::size_t>(rows) * cols;
  for (std::size_t p = 0; p < pixels; ++p) {
    const std::complex<double> ref = work.maps[0].data[p];
    const double mag = std::abs(ref);
    if (mag == 0.0) continue;
    const std::complex<double> unit = std::conj(ref) / mag;
    work.maps[0].data[p] = mag;
    for (int c = 1; c < coil_count; ++c) work.maps[c].data[p] *= unit;
  }
  return work.template cast<T>();
}

template <class T>
CoilSensitivities<T> generate_coil_maps(int size, int coil_count, std::uint64_t seed) {
  return generate_coil_maps<T>(size, size, coil_count, seed);
}

// Uniform single-coil "map" (S = 1).
template <class T>
CoilSensitivities<T> unit_coil(int rows, int cols) {
  CoilSensitivities<T> out;
  ComplexImage<T> one(rows, cols);
  for (auto& v : one.data) v = T{1};
  out.maps.push_back(std::move(one));
  return out;
}

}  // namespace dainr
