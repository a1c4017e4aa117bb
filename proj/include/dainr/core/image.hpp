#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

#include "dainr/core/error.hpp"

namespace dainr {

// Row-major complex image. Column index runs along x, row index along y.
template <class T>
struct ComplexImage {
  using value_type = std::complex<T>;

  int rows = 0;
  int cols = 0;
  std::vector<value_type> data;

  ComplexImage() = default;
  ComplexImage(int r, int c) : rows(r), cols(c), data(static_cast<std::size_t>(r) * c) {
    require(r >= 0 && c >= 0, "image dimensions must be non-negative");
  }

  std::size_t size() const { return data.size(); }
  value_type& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  const value_type& operator()(int r, int c) const {
    return data[static_cast<std::size_t>(r) * cols + c];
  }

  template <class U>
  ComplexImage<U> cast() const {
    ComplexImage<U> out(rows, cols);
    for (std::size_t i = 0; i < data.size(); ++i) out.data[i] = std::complex<U>(data[i]);
    return out;
  }
};

// Stack of equally sized complex frames, d in C^{N x N x tau}.
template <class T>
struct ImageSequence {
  std::vector<ComplexImage<T>> frames;

  ImageSequence() = default;
  ImageSequence(int count, int rows, int cols) : frames(count, ComplexImage<T>(rows, cols)) {}

  int size() const { return static_cast<int>(frames.size()); }
  int rows() const { return frames.empty() ? 0 : frames.front().rows; }
  int cols() const { return frames.empty() ? 0 : frames.front().cols; }
  ComplexImage<T>& operator[](int k) { return frames[k]; }
  const ComplexImage<T>& operator[](int k) const { return frames[k]; }

  template <class U>
  ImageSequence<U> cast() const {
    ImageSequence<U> out;
    out.frames.reserve(frames.size());
    for (const auto& f : frames) out.frames.push_back(f.template cast<U>());
    return out;
  }
};

// Real-valued row-major image (magnitudes, masks, metric inputs).
struct RealImage {
  int rows = 0;
  int cols = 0;
  std::vector<double> data;

  RealImage() = default;
  RealImage(int r, int c, double fill = 0.0)
      : rows(r), cols(c), data(static_cast<std::size_t>(r) * c, fill) {}

  std::size_t size() const { return data.size(); }
  double& operator()(int r, int c) { return data[static_cast<std::size_t>(r) * cols + c]; }
  double operator()(int r, int c) const { return data[static_cast<std::size_t>(r) * cols + c]; }
};

// Pixel-centre coordinate of index i on an evenly spaced lattice of n points
// covering [-1, 1].
inline double lattice_coordinate(int i, int n) { return -1.0 + (2.0 * i + 1.0) / n; }

}  // namespace dainr
