#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <string>
#include <vector>

#include "dainr/core/image.hpp"

namespace dainr {

// Binary 8-bit PGM (P5). Values are mapped linearly from [lo, hi] to [0, 255]
// and clamped.
inline void write_pgm(const std::filesystem::path& path, const RealImage& img, double lo = 0.0,
                      double hi = 1.0) {
  require(img.rows >= 1 && img.cols >= 1, "cannot write an empty image");
  require(hi > lo, "PGM intensity window is empty");
  std::string bytes = "P5\n" + std::to_string(img.cols) + " " + std::to_string(img.rows) + "\n255\n";
  for (double v : img.data) {
    const double s = std::clamp((v - lo) / (hi - lo), 0.0, 1.0);
    bytes.push_back(static_cast<char>(static_cast<unsigned char>(std::lround(255.0 * s))));
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot open " + path.string() + " for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IoError("failed writing " + path.string());
}

inline RealImage read_pgm(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  std::string magic;
  int cols = 0, rows = 0, maxval = 0;
  in >> magic >> cols >> rows >> maxval;
  if (magic != "P5" || cols < 1 || rows < 1 || maxval != 255) throw IoError(path.string() + ": not an 8-bit P5 PGM");
  in.get();
  std::vector<unsigned char> px(static_cast<std::size_t>(rows) * cols);
  in.read(reinterpret_cast<char*>(px.data()), static_cast<std::streamsize>(px.size()));
  if (!in) throw IoError(path.string() + ": truncated pixel data");
  RealImage img(rows, cols);
  for (std::size_t i = 0; i < px.size(); ++i) img.data[i] = px[i] / 255.0;
  return img;
}

}  // namespace dainr
