#pragma once

#include <complex>
#include <vector>

#include <unsupported/Eigen/FFT>

#include "dainr/core/error.hpp"

namespace dainr {

// Unnormalised 2D DFT on a row-major rows x cols buffer.
//   forward: X[m] = sum_n x[n] exp(-2 pi i m.n / size)
//   inverse: x[n] = sum_m X[m] exp(+2 pi i m.n / size)   (no 1/size factor)
// The inverse is therefore the exact adjoint of the forward transform.
template <class T>
class Fft2 {
 public:
  Fft2(int rows, int cols) : rows_(rows), cols_(cols) {
    require(rows >= 1 && cols >= 1, "FFT size must be positive");
    fft_.SetFlag(Eigen::FFT<T>::Unscaled);
  }

  void forward(std::vector<std::complex<T>>& data) { transform(data, false); }
  void inverse(std::vector<std::complex<T>>& data) { transform(data, true); }

 private:
  void transform(std::vector<std::complex<T>>& data, bool inverse) {
    require(data.size() == static_cast<std::size_t>(rows_) * cols_, "FFT buffer size mismatch");
    std::vector<std::complex<T>> row(cols_), row_out(cols_);
    for (int r = 0; r < rows_; ++r) {
      std::copy_n(data.begin() + static_cast<std::size_t>(r) * cols_, cols_, row.begin());
      run(row, row_out, inverse);
      std::copy(row_out.begin(), row_out.end(), data.begin() + static_cast<std::size_t>(r) * cols_);
    }
    std::vector<std::complex<T>> col(rows_), col_out(rows_);
    for (int c = 0; c < cols_; ++c) {
      for (int r = 0; r < rows_; ++r) col[r] = data[static_cast<std::size_t>(r) * cols_ + c];
      run(col, col_out, inverse);
      for (int r = 0; r < rows_; ++r) data[static_cast<std::size_t>(r) * cols_ + c] = col_out[r];
    }
  }

  void run(std::vector<std::complex<T>>& in, std::vector<std::complex<T>>& out, bool inverse) {
    if (inverse)
      fft_.inv(out, in);
    else
      fft_.fwd(out, in);
  }

  int rows_;
  int cols_;
  Eigen::FFT<T> fft_;
};

}  // namespace dainr
