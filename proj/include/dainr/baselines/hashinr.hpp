#pragma once

#include <vector>

#include "dainr/baselines/regularizers.hpp"
#include "dainr/encodings/hash_grid.hpp"
#include "dainr/networks/mlp.hpp"
#include "dainr/training/loss.hpp"
#include "dainr/training/problem.hpp"
#include "dainr/training/trainer.hpp"

namespace dainr {

struct HashInrConfig {
  int rows = 64;
  int cols = 64;
  int frames = 16;
  HashGridConfig hash;
  int hidden_width = 64;
  int hidden_layers = 5;
  std::uint64_t seed = 0;

  void validate() const {
    require(rows >= 1 && cols >= 1, "model image size must be positive");
    require(frames >= 2, "direct mapping model needs at least two frames");
    hash.validate();
  }
};

// Direct (x, y, t) -> (Re, Im) mapping through a 3D hash grid and one MLP,
// without a canonical space. Frame k sits at t = -1 + 2k / (frames - 1).
template <class T>
class HashInrModel {
 public:
  explicit HashInrModel(const HashInrConfig& cfg) : cfg_(cfg) {
    cfg_.validate();
    Rng rng(cfg_.seed);
    grid_ = HashGrid<T, 3>(cfg_.hash, rng);
    net_ = Mlp<T>({cfg_.hash.output_dim(), 2, cfg_.hidden_width, cfg_.hidden_layers}, rng);
  }

  const HashInrConfig& config() const { return cfg_; }
  HashGrid<T, 3>& hash_grid() { return grid_; }
  const Mlp<T>& net() const { return net_; }

  double time_of(double frame) const { return -1.0 + 2.0 * frame / (cfg_.frames - 1); }

  ad::Tensor<T> render(ad::Tape<T>& tape, double frame) const {
    const std::size_t pixels = static_cast<std::size_t>(cfg_.rows) * cfg_.cols;
    std::vector<T> coords(pixels * 3);
    const T t = static_cast<T>(time_of(frame));
    for (int r = 0; r < cfg_.rows; ++r)
      for (int c = 0; c < cfg_.cols; ++c) {
        const std::size_t i = static_cast<std::size_t>(r) * cfg_.cols + c;
        coords[3 * i] = static_cast<T>(lattice_coordinate(c, cfg_.cols));
        coords[3 * i + 1] = static_cast<T>(lattice_coordinate(r, cfg_.rows));
        coords[3 * i + 2] = t;
      }
    auto x = ad::Tensor<T>::from({pixels, 3}, std::move(coords));
    return net_.forward(tape, grid_.encode(tape, x));
  }

  ComplexImage<T> render_frame(double frame) const {
    ad::Tape<T> tape;
    auto out = render(tape, frame);
    ComplexImage<T> img(cfg_.rows, cfg_.cols);
    auto v = out.values();
    for (std::size_t i = 0; i < img.size(); ++i) img.data[i] = {v[2 * i], v[2 * i + 1]};
    return img;
  }

  ImageSequence<T> render_sequence() const {
    ImageSequence<T> out;
    for (int k = 0; k < cfg_.frames; ++k) out.frames.push_back(render_frame(k));
    return out;
  }

  std::vector<ad::Tensor<T>> parameters() const {
    auto out = net_.parameters();
    out.insert(out.begin(), grid_.table());
    return out;
  }

  std::vector<std::pair<std::string, ad::Tensor<T>>> named_parameters() const {
    std::vector<std::pair<std::string, ad::Tensor<T>>> out{{"hash.table", grid_.table()}};
    for (auto& p : net_.named_parameters("net")) out.push_back(p);
    return out;
  }

 private:
  HashInrConfig cfg_;
  HashGrid<T, 3> grid_;
  Mlp<T> net_;
};

// Minimises sum_c ||F_u S_c d - m_c||^2 + lambda_S TV_t(d) + lambda_L ||d||_*.
// With both weights zero each step fits one frame, like DA-INR; otherwise each
// step renders every training frame so the temporal terms see the sequence.
template <class T>
TrainResult hashinr_optimize(HashInrModel<T>& model, const ReconstructionProblem<T>& problem,
                             const RegularizerWeights& weights, const TrainConfig& cfg) {
  weights.validate();
  require(model.config().frames == problem.frames, "model frame count does not match the data");
  require(model.config().rows == problem.image_size, "model size does not match the data");
  const bool joint = weights.temporal_tv > 0.0 || weights.low_rank > 0.0;
  StepLoss<T> step = [&](ad::Tape<T>& tape, int frame) {
    if (!joint)
      return squared_data_term(tape, model.render(tape, frame), problem.coils,
                               *problem.ops[frame], std::span<const T>(problem.targets[frame]));
    std::vector<ad::Tensor<T>> terms;
    std::vector<ad::Tensor<T>> rendered;
    for (int k : problem.train_frames) {
      auto pixels = model.render(tape, k);
      rendered.push_back(pixels);
      terms.push_back(squared_data_term(tape, pixels, problem.coils, *problem.ops[k],
                                        std::span<const T>(problem.targets[k])));
    }
    const int n = static_cast<int>(rendered.size());
    auto stacked = ad::concat_rows(tape, rendered);
    if (weights.temporal_tv > 0.0 && n >= 2)
      terms.push_back(ad::scale(tape, ad::temporal_tv(tape, stacked, n),
                                static_cast<T>(weights.temporal_tv)));
    if (weights.low_rank > 0.0)
      terms.push_back(ad::scale(tape, ad::nuclear_norm(tape, stacked, n),
                                static_cast<T>(weights.low_rank)));
    return ad::add_scalars(tape, terms);
  };
  const std::vector<int> frames = joint ? std::vector<int>{-1} : problem.train_frames;
  return optimize(model.parameters(), frames, step, cfg);
}

}  // namespace dainr
