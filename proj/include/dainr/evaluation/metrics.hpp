#pragma once

#include <algorithm>
#include <cmath>
#include <limits>
#include <map>
#include <sstream>
#include <string>
#include <vector>

#include "dainr/core/image.hpp"

namespace dainr {

// |d| rescaled to [0, 1] with one min/max over the whole sequence.
template <class T>
std::vector<RealImage> normalize_sequence(const ImageSequence<T>& d) {
  require(d.size() >= 1, "cannot normalise an empty sequence");
  double lo = std::numeric_limits<double>::infinity();
  double hi = -lo;
  for (const auto& f : d.frames)
    for (auto v : f.data) {
      const double m = std::abs(std::complex<double>(v));
      lo = std::min(lo, m);
      hi = std::max(hi, m);
    }
  require(hi > lo, "cannot normalise a constant sequence");
  std::vector<RealImage> out;
  for (const auto& f : d.frames) {
    RealImage img(f.rows, f.cols);
    for (std::size_t i = 0; i < f.size(); ++i)
      img.data[i] = (std::abs(std::complex<double>(f.data[i])) - lo) / (hi - lo);
    out.push_back(std::move(img));
  }
  return out;
}

inline std::vector<RealImage> normalize_sequence(const std::vector<RealImage>& d) {
  ImageSequence<double> seq;
  for (const auto& f : d) {
    ComplexImage<double> c(f.rows, f.cols);
    for (std::size_t i = 0; i < f.size(); ++i) c.data[i] = f.data[i];
    seq.frames.push_back(std::move(c));
  }
  return normalize_sequence(seq);
}

inline void require_same_shape(const RealImage& a, const RealImage& b) {
  require(a.rows == b.rows && a.cols == b.cols,
          "image shapes differ: " + std::to_string(a.rows) + "x" + std::to_string(a.cols) + " vs " +
              std::to_string(b.rows) + "x" + std::to_string(b.cols));
}

inline double mean_squared_error(const RealImage& a, const RealImage& b) {
  require_same_shape(a, b);
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) s += (a.data[i] - b.data[i]) * (a.data[i] - b.data[i]);
  return s / static_cast<double>(a.size());
}

// 10 log10(1 / MSE) for images in [0, 1]; +infinity for identical images.
inline double psnr(const RealImage& ref, const RealImage& test) {
  const double mse = mean_squared_error(ref, test);
  if (mse == 0.0) return std::numeric_limits<double>::infinity();
  return 10.0 * std::log10(1.0 / mse);
}

inline std::string format_psnr(double db) {
  if (std::isinf(db)) return "exact";
  std::ostringstream out;
  out.precision(6);
  out << std::fixed << db;
  return out.str();
}

struct SsimOptions {
  int window = 11;
  double sigma = 1.5;
  double k1 = 0.01;
  double k2 = 0.03;
  double dynamic_range = 1.0;
};

// Mean of the local SSIM map over all fully contained Gaussian windows.
inline double ssim(const RealImage& a, const RealImage& b, const SsimOptions& opts = {}) {
  require_same_shape(a, b);
  const int w = opts.window;
  require(a.rows >= w && a.cols >= w,
          "SSIM window of " + std::to_string(w) + " exceeds the " + std::to_string(a.rows) + "x" +
              std::to_string(a.cols) + " frame");
  std::vector<double> g(w);
  double gsum = 0.0;
  for (int i = 0; i < w; ++i) {
    const double x = i - (w - 1) / 2.0;
    g[i] = std::exp(-x * x / (2.0 * opts.sigma * opts.sigma));
    gsum += g[i];
  }
  for (auto& v : g) v /= gsum;
  const double c1 = std::pow(opts.k1 * opts.dynamic_range, 2);
  const double c2 = std::pow(opts.k2 * opts.dynamic_range, 2);
  const int out_r = a.rows - w + 1;
  const int out_c = a.cols - w + 1;
  double total = 0.0;
  for (int r = 0; r < out_r; ++r)
    for (int c = 0; c < out_c; ++c) {
      double ma = 0, mb = 0, saa = 0, sbb = 0, sab = 0;
      for (int i = 0; i < w; ++i)
        for (int j = 0; j < w; ++j) {
          const double k = g[i] * g[j];
          const double x = a(r + i, c + j);
          const double y = b(r + i, c + j);
          ma += k * x;
          mb += k * y;
          saa += k * x * x;
          sbb += k * y * y;
          sab += k * x * y;
        }
      const double va = saa - ma * ma;
      const double vb = sbb - mb * mb;
      const double cov = sab - ma * mb;
      total += ((2 * ma * mb + c1) * (2 * cov + c2)) / ((ma * ma + mb * mb + c1) * (va + vb + c2));
    }
  return total / (static_cast<double>(out_r) * out_c);
}

// Per-frame mean of `frames` over the nonzero pixels of `mask`.
inline std::vector<double> roi_curve(const std::vector<RealImage>& frames, const RealImage& mask) {
  std::size_t count = 0;
  for (double m : mask.data) count += m != 0.0;
  require(count > 0, "ROI mask is empty");
  std::vector<double> out;
  for (const auto& f : frames) {
    require_same_shape(f, mask);
    double s = 0.0;
    for (std::size_t i = 0; i < f.size(); ++i)
      if (mask.data[i] != 0.0) s += f.data[i];
    out.push_back(s / static_cast<double>(count));
  }
  return out;
}

template <class T>
std::vector<double> roi_curve(const ImageSequence<T>& d, const RealImage& mask) {
  std::vector<RealImage> mags;
  for (const auto& f : d.frames) {
    RealImage m(f.rows, f.cols);
    for (std::size_t i = 0; i < f.size(); ++i) m.data[i] = std::abs(std::complex<double>(f.data[i]));
    mags.push_back(std::move(m));
  }
  return roi_curve(mags, mask);
}

inline RealImage error_map(const RealImage& ref, const RealImage& test) {
  require_same_shape(ref, test);
  RealImage out(ref.rows, ref.cols);
  for (std::size_t i = 0; i < ref.size(); ++i) out.data[i] = std::abs(ref.data[i] - test.data[i]);
  return out;
}

inline double pearson_correlation(const std::vector<double>& a, const std::vector<double>& b) {
  require(a.size() == b.size() && a.size() >= 2, "correlation needs equal-length curves");
  const double n = static_cast<double>(a.size());
  double ma = 0, mb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    ma += a[i] / n;
    mb += b[i] / n;
  }
  double sab = 0, saa = 0, sbb = 0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    sab += (a[i] - ma) * (b[i] - mb);
    saa += (a[i] - ma) * (a[i] - ma);
    sbb += (b[i] - mb) * (b[i] - mb);
  }
  require(saa > 0 && sbb > 0, "correlation of a constant curve is undefined");
  return sab / std::sqrt(saa * sbb);
}

struct MetricReport {
  std::vector<double> psnr_db;  // empty in ROI-only mode
  std::vector<double> ssim;
  std::map<std::string, std::vector<double>> roi;
  int frames = 0;

  bool has_reference() const { return !psnr_db.empty(); }

  // Mean over frames; identical frames count as exact and are skipped.
  double mean_psnr() const {
    double s = 0;
    int n = 0;
    for (double v : psnr_db)
      if (std::isfinite(v)) {
        s += v;
        ++n;
      }
    return n ? s / n : std::numeric_limits<double>::infinity();
  }
  double mean_ssim() const {
    double s = 0;
    for (double v : ssim) s += v;
    return ssim.empty() ? 0.0 : s / static_cast<double>(ssim.size());
  }

  std::string to_csv() const {
    std::ostringstream out;
    out.precision(9);
    out << "frame";
    if (has_reference()) out << ",psnr_db,ssim";
    for (const auto& [name, curve] : roi) out << ',' << name;
    out << '\n';
    for (int k = 0; k < frames; ++k) {
      out << k;
      if (has_reference()) out << ',' << format_psnr(psnr_db[k]) << ',' << ssim[k];
      for (const auto& [name, curve] : roi) out << ',' << curve[k];
      out << '\n';
    }
    return out.str();
  }
};

// Frame-wise metrics after independent sequence-global normalisation of the
// reference and the reconstruction. ROI curves use the normalised
// reconstruction.
template <class T, class U>
MetricReport evaluate_sequence(const ImageSequence<T>* reference, const ImageSequence<U>& recon,
                               const std::map<std::string, RealImage>& rois = {}) {
  MetricReport report;
  report.frames = recon.size();
  const auto test = normalize_sequence(recon);
  if (reference) {
    require(reference->size() == recon.size(), "reference and reconstruction frame counts differ");
    const auto ref = normalize_sequence(*reference);
    for (int k = 0; k < recon.size(); ++k) {
      report.psnr_db.push_back(psnr(ref[k], test[k]));
      report.ssim.push_back(ssim(ref[k], test[k]));
    }
  }
  for (const auto& [name, mask] : rois) report.roi[name] = roi_curve(test, mask);
  return report;
}

}  // namespace dainr
