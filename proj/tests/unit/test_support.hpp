#pragma once

#include <gtest/gtest.h>

#include <cmath>
#include <functional>
#include <random>
#include <vector>

#include "dainr/autodiff/tape.hpp"

namespace dainr::testing {

using LossFn = std::function<ad::Tensor<double>(ad::Tape<double>&)>;

// Compares reverse-mode gradients of `loss` against central differences for
// every entry of every tensor in `inputs`.
inline void expect_gradients_match(const LossFn& loss, const std::vector<ad::Tensor<double>>& inputs,
                                   double step = 1e-6, double tol = 1e-6) {
  for (const auto& t : inputs) t.zero_grad();
  ad::Tape<double> tape;
  auto value = loss(tape);
  tape.backward(value);
  for (std::size_t n = 0; n < inputs.size(); ++n) {
    auto input = inputs[n];
    std::vector<double> analytic(input.grad().begin(), input.grad().end());
    auto v = input.values();
    for (std::size_t i = 0; i < v.size(); ++i) {
      const double saved = v[i];
      v[i] = saved + step;
      ad::Tape<double> t1;
      const double up = loss(t1).item();
      v[i] = saved - step;
      ad::Tape<double> t2;
      const double down = loss(t2).item();
      v[i] = saved;
      const double numeric = (up - down) / (2 * step);
      EXPECT_NEAR(analytic[i], numeric, tol * std::max(1.0, std::abs(numeric)))
          << "input " << n << " element " << i;
    }
  }
}

inline ad::Tensor<double> random_tensor(ad::Shape shape, std::uint64_t seed, double lo = -1.0,
                                        double hi = 1.0, bool requires_grad = true) {
  std::mt19937_64 gen(seed);
  std::uniform_real_distribution<double> dist(lo, hi);
  std::vector<double> v(ad::element_count(shape));
  for (auto& x : v) x = dist(gen);
  return ad::Tensor<double>::from(std::move(shape), std::move(v), requires_grad);
}

}  // namespace dainr::testing
