#pragma once

#include <cmath>
#include <complex>
#include <span>
#include <vector>

#include "dainr/core/image.hpp"
#include "dainr/mri/trajectory.hpp"

namespace dainr {

// Pixel (row, col) sits at integer coordinate (col - N/2, row - N/2), so the
// image centre is the origin.
inline int centred_index(int i, int n) { return i - n / 2; }

// Exact type-2 non-uniform DFT, s(k) = sum_x img(x) exp(-i k.x). Direct
// evaluation; the exponential factorises over the two axes.
template <class T>
class Ndft {
 public:
  Ndft(const Trajectory& traj, int rows, int cols) : traj_(traj), rows_(rows), cols_(cols) {
    require(rows >= 1 && cols >= 1, "NDFT image size must be positive");
  }
  Ndft(const Trajectory& traj, int size) : Ndft(traj, size, size) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t sample_count() const { return traj_.size(); }
  const Trajectory& trajectory() const { return traj_; }

  std::vector<std::complex<T>> forward(const ComplexImage<T>& image) const {
    require(image.rows == rows_ && image.cols == cols_, "NDFT: image size mismatch");
    std::vector<std::complex<T>> out(traj_.size());
    std::vector<std::complex<double>> ex(cols_), ey(rows_);
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      phases(traj_.k[s], -1.0, ex, ey);
      std::complex<double> acc{0.0, 0.0};
      for (int r = 0; r < rows_; ++r) {
        std::complex<double> row{0.0, 0.0};
        for (int c = 0; c < cols_; ++c) row += std::complex<double>(image(r, c)) * ex[c];
        acc += row * ey[r];
      }
      out[s] = std::complex<T>(acc);
    }
    return out;
  }

  // Conjugate transpose of forward(); optionally pre-weights the samples by
  // the trajectory's density weights.
  ComplexImage<T> adjoint(std::span<const std::complex<T>> samples, bool apply_density) const {
    require(samples.size() == traj_.size(), "NDFT adjoint: sample count mismatch");
    std::vector<std::complex<double>> acc(static_cast<std::size_t>(rows_) * cols_);
    std::vector<std::complex<double>> ex(cols_), ey(rows_);
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      std::complex<double> y(samples[s]);
      if (apply_density) y *= traj_.density[s];
      if (y == std::complex<double>{}) continue;
      phases(traj_.k[s], 1.0, ex, ey);
      for (int r = 0; r < rows_; ++r) {
        const std::complex<double> yr = y * ey[r];
        std::complex<double>* dst = acc.data() + static_cast<std::size_t>(r) * cols_;
        for (int c = 0; c < cols_; ++c) dst[c] += yr * ex[c];
      }
    }
    ComplexImage<T> out(rows_, cols_);
    for (std::size_t i = 0; i < acc.size(); ++i) out.data[i] = std::complex<T>(acc[i]);
    return out;
  }

 private:
  void phases(const std::array<double, 2>& k, double sign, std::vector<std::complex<double>>& ex,
              std::vector<std::complex<double>>& ey) const {
    for (int c = 0; c < cols_; ++c) ex[c] = std::polar(1.0, sign * k[0] * centred_index(c, cols_));
    for (int r = 0; r < rows_; ++r) ey[r] = std::polar(1.0, sign * k[1] * centred_index(r, rows_));
  }

  Trajectory traj_;
  int rows_;
  int cols_;
};

}  // namespace dainr
