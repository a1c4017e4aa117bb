#pragma once

#include <cmath>
#include <cstdint>
#include <string>
#include <vector>

#include "dainr/autodiff/tensor.hpp"
#include "dainr/core/error.hpp"

namespace dainr::ad {

struct AdamWOptions {
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;
  double weight_decay = 0.0;

  void validate() const {
    require(lr > 0.0, "AdamW: learning rate must be positive");
    require(beta1 >= 0.0 && beta1 < 1.0 && beta2 >= 0.0 && beta2 < 1.0,
            "AdamW: betas must lie in [0, 1)");
    require(eps > 0.0 && weight_decay >= 0.0, "AdamW: eps must be positive, decay non-negative");
  }
};

// Adam with decoupled weight decay:
//   p <- p (1 - lr wd)
//   m <- b1 m + (1 - b1) g,   v <- b2 v + (1 - b2) g^2
//   p <- p - lr (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)
template <class T>
class AdamW {
 public:
  AdamW(std::vector<Tensor<T>> params, AdamWOptions options = {})
      : params_(std::move(params)), options_(options) {
    options_.validate();
    first_.reserve(params_.size());
    second_.reserve(params_.size());
    for (const auto& p : params_) {
      first_.emplace_back(p.numel(), T{0});
      second_.emplace_back(p.numel(), T{0});
    }
  }

  const AdamWOptions& options() const { return options_; }
  std::int64_t step_count() const { return step_; }
  const std::vector<Tensor<T>>& parameters() const { return params_; }
  const std::vector<T>& first_moment(std::size_t i) const { return first_.at(i); }
  const std::vector<T>& second_moment(std::size_t i) const { return second_.at(i); }

  void zero_grad() {
    for (auto& p : params_) p.zero_grad();
  }

  // Applies one update from the gradients currently stored on the parameters.
  // Non-finite gradients abort the step before any state is modified.
  void step() {
    for (std::size_t i = 0; i < params_.size(); ++i) {
      for (T g : params_[i].grad()) {
        if (!std::isfinite(static_cast<double>(g)))
          throw NumericalError("AdamW: non-finite gradient in parameter " + std::to_string(i) +
                               " at step " + std::to_string(step_ + 1) + "; step aborted");
      }
    }
    ++step_;
    const double bc1 = 1.0 - std::pow(options_.beta1, static_cast<double>(step_));
    const double bc2 = 1.0 - std::pow(options_.beta2, static_cast<double>(step_));
    const T b1 = static_cast<T>(options_.beta1);
    const T b2 = static_cast<T>(options_.beta2);
    const T eps = static_cast<T>(options_.eps);
    const T decay = static_cast<T>(1.0 - options_.lr * options_.weight_decay);
    const T step_size = static_cast<T>(options_.lr / bc1);
    const T inv_sqrt_bc2 = static_cast<T>(1.0 / std::sqrt(bc2));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      auto p = params_[i].values();
      auto g = params_[i].grad();
      auto& m = first_[i];
      auto& v = second_[i];
      for (std::size_t j = 0; j < p.size(); ++j) {
        if (options_.weight_decay != 0.0) p[j] *= decay;
        m[j] = b1 * m[j] + (T{1} - b1) * g[j];
        v[j] = b2 * v[j] + (T{1} - b2) * g[j] * g[j];
        const T denom = std::sqrt(v[j]) * inv_sqrt_bc2 + eps;
        p[j] -= step_size * m[j] / denom;
      }
    }
  }

 private:
  std::vector<Tensor<T>> params_;
  AdamWOptions options_;
  std::vector<std::vector<T>> first_;
  std::vector<std::vector<T>> second_;
  std::int64_t step_ = 0;
};

}  // namespace dainr::ad
