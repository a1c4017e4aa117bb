#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "dainr/autodiff/ops.hpp"
#include "dainr/core/rng.hpp"

namespace dainr {

struct MlpConfig {
  int input_dim = 0;
  int output_dim = 0;
  int hidden_width = 64;
  int hidden_layers = 5;

  void validate() const {
    require(input_dim >= 1 && output_dim >= 1, "MLP input/output dimensions must be positive");
    require(hidden_width >= 1 && hidden_layers >= 0, "MLP hidden shape must be non-negative");
  }
};

// Fully connected network: ReLU after every hidden layer, identity output.
template <class T>
class Mlp {
 public:
  Mlp() = default;

  // Kaiming-uniform weights (bound sqrt(6 / fan_in)), biases in
  // +-1/sqrt(fan_in). The last layer is multiplied by output_scale.
  Mlp(const MlpConfig& cfg, Rng& rng, double output_scale = 1.0) : cfg_(cfg) {
    cfg_.validate();
    std::vector<int> widths{cfg_.input_dim};
    for (int i = 0; i < cfg_.hidden_layers; ++i) widths.push_back(cfg_.hidden_width);
    widths.push_back(cfg_.output_dim);
    for (std::size_t l = 0; l + 1 < widths.size(); ++l) {
      const int fan_in = widths[l];
      const int fan_out = widths[l + 1];
      const bool last = l + 2 == widths.size();
      const double gain = last ? output_scale : 1.0;
      const double w_bound = std::sqrt(6.0 / fan_in);
      const double b_bound = 1.0 / std::sqrt(static_cast<double>(fan_in));
      std::vector<T> w(static_cast<std::size_t>(fan_in) * fan_out);
      std::vector<T> b(static_cast<std::size_t>(fan_out));
      for (auto& v : w) v = static_cast<T>(gain * rng.uniform(-w_bound, w_bound));
      for (auto& v : b) v = static_cast<T>(gain * rng.uniform(-b_bound, b_bound));
      weights_.push_back(ad::Tensor<T>::from(
          {static_cast<std::size_t>(fan_out), static_cast<std::size_t>(fan_in)}, std::move(w),
          true));
      biases_.push_back(
          ad::Tensor<T>::from({static_cast<std::size_t>(fan_out)}, std::move(b), true));
    }
  }

  const MlpConfig& config() const { return cfg_; }
  std::size_t layer_count() const { return weights_.size(); }
  ad::Tensor<T>& weight(std::size_t l) { return weights_.at(l); }
  ad::Tensor<T>& bias(std::size_t l) { return biases_.at(l); }
  const ad::Tensor<T>& weight(std::size_t l) const { return weights_.at(l); }
  const ad::Tensor<T>& bias(std::size_t l) const { return biases_.at(l); }

  ad::Tensor<T> forward(ad::Tape<T>& tape, const ad::Tensor<T>& x) const {
    require(x.rank() == 2 && x.dim(1) == static_cast<std::size_t>(cfg_.input_dim),
            "MLP expects [B, " + std::to_string(cfg_.input_dim) + "] input, got " +
                ad::to_string(x.shape()));
    ad::Tensor<T> h = x;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      h = ad::linear(tape, h, weights_[l], biases_[l]);
      if (l + 1 < weights_.size()) h = ad::relu(tape, h);
    }
    return h;
  }

  std::vector<ad::Tensor<T>> parameters() const {
    std::vector<ad::Tensor<T>> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.push_back(weights_[l]);
      out.push_back(biases_[l]);
    }
    return out;
  }

  std::vector<std::pair<std::string, ad::Tensor<T>>> named_parameters(
      const std::string& prefix) const {
    std::vector<std::pair<std::string, ad::Tensor<T>>> out;
    for (std::size_t l = 0; l < weights_.size(); ++l) {
      out.emplace_back(prefix + ".layer" + std::to_string(l) + ".weight", weights_[l]);
      out.emplace_back(prefix + ".layer" + std::to_string(l) + ".bias", biases_[l]);
    }
    return out;
  }

 private:
  MlpConfig cfg_;
  std::vector<ad::Tensor<T>> weights_;
  std::vector<ad::Tensor<T>> biases_;
};

}  // namespace dainr
