#pragma once

#include <algorithm>
#include <array>
#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dainr/autodiff/tape.hpp"
#include "dainr/core/error.hpp"
#include "dainr/core/rng.hpp"

namespace dainr {

struct HashGridConfig {
  int levels = 16;
  std::uint64_t table_size = std::uint64_t{1} << 19;
  int features = 2;
  int min_resolution = 16;
  double growth = 2.0;
  // When positive, the growth ratio is derived from the finest resolution.
  int max_resolution = 0;
  double init_range = 1e-4;

  double growth_ratio() const {
    if (max_resolution > 0) {
      if (levels == 1) return 1.0;
      return std::exp((std::log(static_cast<double>(max_resolution)) -
                       std::log(static_cast<double>(min_resolution))) /
                      (levels - 1));
    }
    return growth;
  }

  int output_dim() const { return levels * features; }

  void validate() const {
    require(levels >= 1, "hash grid needs at least one level");
    require(features >= 1, "hash grid needs at least one feature per entry");
    require(min_resolution >= 1, "hash grid coarsest resolution must be positive");
    require(table_size >= 2 && (table_size & (table_size - 1)) == 0,
            "hash table size must be a power of two");
    require(table_size <= (std::uint64_t{1} << 32), "hash table size must fit 32-bit indices");
    if (max_resolution > 0)
      require(max_resolution > min_resolution || levels == 1,
              "finest resolution must exceed the coarsest");
    else
      require(growth > 1.0 || levels == 1, "hash grid growth ratio must exceed 1");
    require(init_range >= 0.0, "init range must be non-negative");
  }
};

// N_l = floor(N_min * b^l)
inline int grid_resolution(int level, const HashGridConfig& cfg) {
  require(level >= 0 && level < cfg.levels,
          "grid level " + std::to_string(level) + " outside [0, " + std::to_string(cfg.levels) +
              ")");
  const double exact = cfg.min_resolution * std::pow(cfg.growth_ratio(), level);
  // Guard against b^l landing a few ulps under an integer.
  return static_cast<int>(std::floor(exact * (1.0 + 1e-12)));
}

// True when all (N_l + 1)^Dim vertices of a level fit in the table.
template <int Dim>
bool dense_level(int level, const HashGridConfig& cfg) {
  const std::uint64_t side = static_cast<std::uint64_t>(grid_resolution(level, cfg)) + 1;
  std::uint64_t dense = 1;
  for (int d = 0; d < Dim; ++d) {
    dense *= side;
    if (dense > cfg.table_size) return false;
  }
  return true;
}

// Number of table entries used by a level: the dense vertex count when it fits,
// otherwise the full hash table.
template <int Dim>
std::uint64_t level_entry_count(int level, const HashGridConfig& cfg) {
  if (!dense_level<Dim>(level, cfg)) return cfg.table_size;
  const std::uint64_t side = static_cast<std::uint64_t>(grid_resolution(level, cfg)) + 1;
  std::uint64_t dense = 1;
  for (int d = 0; d < Dim; ++d) dense *= side;
  return dense;
}

inline constexpr std::array<std::uint32_t, 3> kHashPrimes = {1u, 2654435761u, 805459861u};

// Table index of a grid vertex. Dense levels use row-major order (first
// coordinate fastest); others XOR prime-multiplied coordinates modulo T.
template <int Dim>
std::uint32_t hash_index(const std::array<std::uint32_t, Dim>& vertex, int level,
                         const HashGridConfig& cfg) {
  static_assert(Dim >= 1 && Dim <= 3);
  const std::uint64_t res = static_cast<std::uint64_t>(grid_resolution(level, cfg));
  for (int d = 0; d < Dim; ++d)
    require(vertex[d] <= res, "vertex coordinate outside level grid");
  if (dense_level<Dim>(level, cfg)) {
    std::uint64_t index = 0;
    std::uint64_t stride = 1;
    for (int d = 0; d < Dim; ++d) {
      index += vertex[d] * stride;
      stride *= res + 1;
    }
    return static_cast<std::uint32_t>(index);
  }
  std::uint32_t h = 0;
  for (int d = 0; d < Dim; ++d) h ^= vertex[d] * kHashPrimes[d];
  return static_cast<std::uint32_t>(h & (cfg.table_size - 1));
}

// Multiresolution grid of trainable feature vectors over [-1, 1]^Dim.
template <class T, int Dim>
class HashGrid {
 public:
  static constexpr int kCorners = 1 << Dim;

  HashGrid() = default;

  HashGrid(const HashGridConfig& cfg, Rng& rng) : cfg_(cfg) {
    cfg_.validate();
    std::uint64_t total = 0;
    for (int l = 0; l < cfg_.levels; ++l) {
      offsets_.push_back(total);
      resolutions_.push_back(grid_resolution(l, cfg_));
      dense_.push_back(dense_level<Dim>(l, cfg_));
      total += level_entry_count<Dim>(l, cfg_);
    }
    offsets_.push_back(total);
    std::vector<T> init(total * static_cast<std::uint64_t>(cfg_.features));
    for (auto& v : init) v = static_cast<T>(rng.uniform(-cfg_.init_range, cfg_.init_range));
    table_ = ad::Tensor<T>::from(
        {static_cast<std::size_t>(total), static_cast<std::size_t>(cfg_.features)},
        std::move(init), true);
  }

  const HashGridConfig& config() const { return cfg_; }
  int output_dim() const { return cfg_.output_dim(); }
  int resolution(int level) const { return resolutions_.at(level); }
  std::uint64_t level_offset(int level) const { return offsets_.at(level); }
  std::uint64_t level_entries(int level) const { return offsets_.at(level + 1) - offsets_[level]; }
  bool dense(int level) const { return dense_.at(level); }

  ad::Tensor<T>& table() { return table_; }
  const ad::Tensor<T>& table() const { return table_; }

  // coords [B, Dim] -> [B, L * F]. Coordinates are clamped to [-1, 1]; the
  // backward pass reaches both the table entries and the coordinates.
  ad::Tensor<T> encode(ad::Tape<T>& tape, const ad::Tensor<T>& coords) const {
    require(coords.rank() == 2 && coords.dim(1) == static_cast<std::size_t>(Dim),
            "hash encode expects [B, " + std::to_string(Dim) + "] coordinates");
    const std::size_t batch = coords.dim(0);
    const int width = output_dim();
    auto cv = coords.values();
    for (T v : cv)
      if (std::isnan(static_cast<double>(v))) throw InvalidArgument("hash encode: NaN coordinate");

    const bool rg = coords.requires_grad() || table_.requires_grad();
    auto y = ad::Tensor<T>::zeros({batch, static_cast<std::size_t>(width)}, rg);
    auto yv = y.values();
    auto tv = table_.values();
    const int F = cfg_.features;
    Corners c;
    for (std::size_t b = 0; b < batch; ++b) {
      for (int l = 0; l < cfg_.levels; ++l) {
        locate(&cv[b * Dim], l, c);
        T* out = yv.data() + b * width + l * F;
        for (int k = 0; k < kCorners; ++k) {
          const T* entry = tv.data() + c.index[k] * F;
          for (int f = 0; f < F; ++f) out[f] += static_cast<T>(c.weight[k]) * entry[f];
        }
      }
    }
    if (rg) {
      tape.record(y, [grid = *this, coords, y, batch, width, F] {
        const HashGrid* self = &grid;
        const auto& table = grid.table_;
        auto gy = y.grad();
        auto cv = coords.values();
        auto tv = table.values();
        const bool table_grad = table.requires_grad();
        const bool coord_grad = coords.requires_grad();
        std::span<T> gt = table_grad ? table.grad() : std::span<T>{};
        std::span<T> gc = coord_grad ? coords.grad() : std::span<T>{};
        Corners c;
        for (std::size_t b = 0; b < batch; ++b) {
          for (int l = 0; l < self->cfg_.levels; ++l) {
            self->locate(&cv[b * Dim], l, c);
            const T* g = gy.data() + b * width + l * F;
            for (int k = 0; k < kCorners; ++k) {
              const std::uint64_t base = c.index[k] * F;
              if (table_grad)
                for (int f = 0; f < F; ++f) gt[base + f] += static_cast<T>(c.weight[k]) * g[f];
              if (coord_grad) {
                double dot = 0.0;
                for (int f = 0; f < F; ++f) dot += static_cast<double>(g[f]) * tv[base + f];
                for (int d = 0; d < Dim; ++d) c.coord_grad[d] += c.dweight[k][d] * dot;
              }
            }
            if (coord_grad)
              for (int d = 0; d < Dim; ++d) gc[b * Dim + d] += static_cast<T>(c.coord_grad[d]);
          }
        }
      });
    }
    return y;
  }

  // Forward-only evaluation at one point.
  std::vector<T> encode_point(const std::array<T, Dim>& x) const {
    std::vector<T> out(static_cast<std::size_t>(output_dim()), T{0});
    auto tv = table_.values();
    Corners c;
    for (int l = 0; l < cfg_.levels; ++l) {
      locate(x.data(), l, c);
      for (int k = 0; k < kCorners; ++k)
        for (int f = 0; f < cfg_.features; ++f)
          out[l * cfg_.features + f] +=
              static_cast<T>(c.weight[k]) * tv[c.index[k] * cfg_.features + f];
    }
    return out;
  }

  // Interpolation corners of a point at one level (exposed for tests).
  struct Corners {
    std::array<std::uint64_t, kCorners> index{};
    std::array<double, kCorners> weight{};
    // d weight / d coordinate, including the [-1,1] -> [0, N_l] scaling.
    std::array<std::array<double, Dim>, kCorners> dweight{};
    std::array<double, Dim> coord_grad{};
  };

  void locate(const T* x, int level, Corners& c) const {
    const int res = resolutions_[level];
    std::array<std::uint32_t, Dim> cell{};
    std::array<double, Dim> frac{};
    std::array<double, Dim> scale{};
    for (int d = 0; d < Dim; ++d) {
      const double raw = static_cast<double>(x[d]);
      const double clamped = std::clamp(raw, -1.0, 1.0);
      const double pos = (clamped + 1.0) * 0.5 * res;
      const double fl = std::min(std::floor(pos), static_cast<double>(res - 1));
      cell[d] = static_cast<std::uint32_t>(fl);
      frac[d] = pos - fl;
      scale[d] = (raw >= -1.0 && raw <= 1.0) ? 0.5 * res : 0.0;
      c.coord_grad[d] = 0.0;
    }
    for (int k = 0; k < kCorners; ++k) {
      std::array<std::uint32_t, Dim> vertex{};
      double w = 1.0;
      for (int d = 0; d < Dim; ++d) {
        const bool upper = (k >> d) & 1;
        vertex[d] = cell[d] + (upper ? 1u : 0u);
        w *= upper ? frac[d] : 1.0 - frac[d];
      }
      for (int d = 0; d < Dim; ++d) {
        double dw = scale[d];
        for (int e = 0; e < Dim; ++e) {
          const bool upper = (k >> e) & 1;
          if (e == d)
            dw *= upper ? 1.0 : -1.0;
          else
            dw *= upper ? frac[e] : 1.0 - frac[e];
        }
        c.dweight[k][d] = dw;
      }
      c.weight[k] = w;
      c.index[k] = offsets_[level] + vertex_index(vertex, level);
    }
  }

 private:
  std::uint64_t vertex_index(const std::array<std::uint32_t, Dim>& v, int level) const {
    if (dense_[level]) {
      const std::uint64_t side = static_cast<std::uint64_t>(resolutions_[level]) + 1;
      std::uint64_t index = 0;
      std::uint64_t stride = 1;
      for (int d = 0; d < Dim; ++d) {
        index += v[d] * stride;
        stride *= side;
      }
      return index;
    }
    std::uint32_t h = 0;
    for (int d = 0; d < Dim; ++d) h ^= v[d] * kHashPrimes[d];
    return h & (cfg_.table_size - 1);
  }

  HashGridConfig cfg_;
  std::vector<std::uint64_t> offsets_;
  std::vector<int> resolutions_;
  std::vector<bool> dense_;
  ad::Tensor<T> table_;
};

}  // namespace dainr
