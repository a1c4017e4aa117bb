#pragma once

#include <cmath>
#include <complex>
#include <numbers>
#include <span>
#include <vector>

#include "dainr/core/image.hpp"
#include "dainr/mri/fft.hpp"
#include "dainr/mri/ndft.hpp"
#include "dainr/mri/trajectory.hpp"

namespace dainr {

struct GriddingOptions {
  double oversampling = 2.0;
  int width = 4;
  double beta = 0.0;  // 0 selects the Beatty et al. value for (width, oversampling)

  double kernel_beta() const {
    if (beta > 0.0) return beta;
    const double w = width;
    const double s = oversampling;
    return std::numbers::pi * std::sqrt(w * w / (s * s) * (s - 0.5) * (s - 0.5) - 0.8);
  }
};

// Kaiser-Bessel window I0(beta sqrt(1 - (2v/W)^2)) on |v| <= W/2.
inline double kaiser_bessel(double v, int width, double beta) {
  const double x = 2.0 * v / width;
  if (std::abs(x) > 1.0) return 0.0;
  return std::cyl_bessel_i(0.0, beta * std::sqrt(1.0 - x * x));
}

// Continuous Fourier transform of kaiser_bessel at frequency xi (cycles/unit).
inline double kaiser_bessel_transform(double xi, int width, double beta) {
  const double a = std::numbers::pi * width * xi;
  const double z2 = beta * beta - a * a;
  if (z2 > 0.0) {
    const double z = std::sqrt(z2);
    return width * std::sinh(z) / z;
  }
  if (z2 < 0.0) {
    const double z = std::sqrt(-z2);
    return width * std::sin(z) / z;
  }
  return static_cast<double>(width);
}

// Gridded type-2 NUFFT approximating Ndft: deapodise, zero-pad onto an
// oversampled grid, FFT, then interpolate with a Kaiser-Bessel kernel. The
// adjoint runs the same steps transposed, so it is the exact conjugate
// transpose of forward().
template <class T>
class GriddedNufft {
 public:
  GriddedNufft(const Trajectory& traj, int rows, int cols, GriddingOptions opts = {})
      : traj_(traj), rows_(rows), cols_(cols), opts_(opts),
        grid_rows_(oversampled(rows, opts.oversampling)),
        grid_cols_(oversampled(cols, opts.oversampling)),
        fft_(grid_rows_, grid_cols_) {
    require(rows >= 1 && cols >= 1, "NUFFT image size must be positive");
    require(opts.width >= 1, "gridding kernel width must be positive");
    const double beta = opts_.kernel_beta();
    const int w = opts_.width;
    deapod_rows_.resize(rows_);
    deapod_cols_.resize(cols_);
    for (int r = 0; r < rows_; ++r)
      deapod_rows_[r] = static_cast<T>(
          1.0 / kaiser_bessel_transform(static_cast<double>(centred_index(r, rows_)) / grid_rows_,
                                        w, beta));
    for (int c = 0; c < cols_; ++c)
      deapod_cols_[c] = static_cast<T>(
          1.0 / kaiser_bessel_transform(static_cast<double>(centred_index(c, cols_)) / grid_cols_,
                                        w, beta));
    const std::size_t n = traj_.size();
    start_rows_.resize(n);
    start_cols_.resize(n);
    weight_rows_.resize(n * w);
    weight_cols_.resize(n * w);
    for (std::size_t s = 0; s < n; ++s) {
      setup_axis(traj_.k[s][1], grid_rows_, beta, start_rows_[s], &weight_rows_[s * w]);
      setup_axis(traj_.k[s][0], grid_cols_, beta, start_cols_[s], &weight_cols_[s * w]);
    }
  }
  GriddedNufft(const Trajectory& traj, int size, GriddingOptions opts = {})
      : GriddedNufft(traj, size, size, opts) {}

  int rows() const { return rows_; }
  int cols() const { return cols_; }
  std::size_t sample_count() const { return traj_.size(); }
  const Trajectory& trajectory() const { return traj_; }

  std::vector<std::complex<T>> forward(const ComplexImage<T>& image) const {
    require(image.rows == rows_ && image.cols == cols_, "NUFFT: image size mismatch");
    std::vector<std::complex<T>> grid(static_cast<std::size_t>(grid_rows_) * grid_cols_);
    for (int r = 0; r < rows_; ++r) {
      const std::size_t gr = wrap(centred_index(r, rows_), grid_rows_);
      for (int c = 0; c < cols_; ++c) {
        const std::size_t gc = wrap(centred_index(c, cols_), grid_cols_);
        grid[gr * grid_cols_ + gc] = image(r, c) * (deapod_rows_[r] * deapod_cols_[c]);
      }
    }
    fft_.forward(grid);
    const int w = opts_.width;
    std::vector<std::complex<T>> out(traj_.size());
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      std::complex<T> acc{};
      for (int a = 0; a < w; ++a) {
        const std::size_t gr = wrap(start_rows_[s] + a, grid_rows_);
        std::complex<T> row{};
        for (int b = 0; b < w; ++b)
          row += weight_cols_[s * w + b] * grid[gr * grid_cols_ + wrap(start_cols_[s] + b, grid_cols_)];
        acc += weight_rows_[s * w + a] * row;
      }
      out[s] = acc;
    }
    return out;
  }

  ComplexImage<T> adjoint(std::span<const std::complex<T>> samples, bool apply_density) const {
    require(samples.size() == traj_.size(), "NUFFT adjoint: sample count mismatch");
    std::vector<std::complex<T>> grid(static_cast<std::size_t>(grid_rows_) * grid_cols_);
    const int w = opts_.width;
    for (std::size_t s = 0; s < traj_.size(); ++s) {
      std::complex<T> y = samples[s];
      if (apply_density) y *= static_cast<T>(traj_.density[s]);
      for (int a = 0; a < w; ++a) {
        const std::size_t gr = wrap(start_rows_[s] + a, grid_rows_);
        const std::complex<T> ya = weight_rows_[s * w + a] * y;
        for (int b = 0; b < w; ++b)
          grid[gr * grid_cols_ + wrap(start_cols_[s] + b, grid_cols_)] += weight_cols_[s * w + b] * ya;
      }
    }
    fft_.inverse(grid);
    ComplexImage<T> out(rows_, cols_);
    for (int r = 0; r < rows_; ++r) {
      const std::size_t gr = wrap(centred_index(r, rows_), grid_rows_);
      for (int c = 0; c < cols_; ++c) {
        const std::size_t gc = wrap(centred_index(c, cols_), grid_cols_);
        out(r, c) = grid[gr * grid_cols_ + gc] * (deapod_rows_[r] * deapod_cols_[c]);
      }
    }
    return out;
  }

 private:
  static int oversampled(int n, double factor) {
    require(factor >= 1.0, "oversampling factor must be >= 1");
    int g = static_cast<int>(std::ceil(n * factor));
    return g + (g % 2);
  }

  static std::size_t wrap(long i, int n) {
    long m = i % n;
    return static_cast<std::size_t>(m < 0 ? m + n : m);
  }

  void setup_axis(double k, int grid, double beta, long& start, T* weights) const {
    const double u = k * grid / (2.0 * std::numbers::pi);
    const int w = opts_.width;
    start = static_cast<long>(std::ceil(u - 0.5 * w));
    for (int a = 0; a < w; ++a) weights[a] = static_cast<T>(kaiser_bessel(u - (start + a), w, beta));
  }

  Trajectory traj_;
  int rows_;
  int cols_;
  GriddingOptions opts_;
  int grid_rows_;
  int grid_cols_;
  mutable Fft2<T> fft_;
  std::vector<T> deapod_rows_;
  std::vector<T> deapod_cols_;
  std::vector<long> start_rows_;
  std::vector<long> start_cols_;
  std::vector<T> weight_rows_;
  std::vector<T> weight_cols_;
};

}  // namespace dainr
