#pragma once

#include <algorithm>
#include <cstddef>
#include <functional>
#include <memory>
#include <numeric>
#include <span>
#include <string>
#include <vector>

#include "dainr/core/error.hpp"

namespace dainr::ad {

using Shape = std::vector<std::size_t>;

inline std::size_t element_count(const Shape& shape) {
  return std::accumulate(shape.begin(), shape.end(), std::size_t{1}, std::multiplies<>{});
}

inline std::string to_string(const Shape& shape) {
  std::string s = "[";
  for (std::size_t i = 0; i < shape.size(); ++i) {
    if (i) s += ", ";
    s += std::to_string(shape[i]);
  }
  return s + "]";
}

template <class T>
struct TensorStorage {
  Shape shape;
  std::vector<T> value;
  std::vector<T> grad;  // empty until the first backward contribution
  bool requires_grad = false;

  std::span<T> ensure_grad() {
    if (grad.size() != value.size()) grad.assign(value.size(), T{0});
    return grad;
  }
  bool has_grad() const { return !grad.empty() || value.empty(); }
};

// Shared handle to a dense row-major array. Copies alias the same storage, so
// a parameter held by a model and by the tape is one object.
template <class T>
class Tensor {
 public:
  using value_type = T;

  Tensor() = default;

  static Tensor zeros(Shape shape, bool requires_grad = false) {
    Tensor t;
    t.impl_ = std::make_shared<TensorStorage<T>>();
    t.impl_->value.assign(element_count(shape), T{0});
    t.impl_->shape = std::move(shape);
    t.impl_->requires_grad = requires_grad;
    return t;
  }

  static Tensor from(Shape shape, std::vector<T> values, bool requires_grad = false) {
    require(element_count(shape) == values.size(),
            "tensor data length " + std::to_string(values.size()) + " does not match shape " +
                to_string(shape));
    Tensor t;
    t.impl_ = std::make_shared<TensorStorage<T>>();
    t.impl_->shape = std::move(shape);
    t.impl_->value = std::move(values);
    t.impl_->requires_grad = requires_grad;
    return t;
  }

  static Tensor scalar(T v, bool requires_grad = false) { return from({}, {v}, requires_grad); }

  bool defined() const { return static_cast<bool>(impl_); }
  const Shape& shape() const { return impl_->shape; }
  std::size_t dim(std::size_t i) const { return impl_->shape.at(i); }
  std::size_t rank() const { return impl_->shape.size(); }
  std::size_t numel() const { return impl_->value.size(); }

  std::span<T> values() { return impl_->value; }
  std::span<const T> values() const { return impl_->value; }
  T item() const {
    require(numel() == 1, "item() requires a single-element tensor");
    return impl_->value[0];
  }

  // Gradient accumulator; zero-filled on first access.
  std::span<T> grad() const { return impl_->ensure_grad(); }
  void zero_grad() const { std::fill(impl_->grad.begin(), impl_->grad.end(), T{0}); }

  bool requires_grad() const { return impl_->requires_grad; }
  void set_requires_grad(bool on) { impl_->requires_grad = on; }

  TensorStorage<T>* storage() const { return impl_.get(); }
  const std::shared_ptr<TensorStorage<T>>& shared() const { return impl_; }

  Tensor clone() const { return from(shape(), impl_->value, requires_grad()); }

 private:
  std::shared_ptr<TensorStorage<T>> impl_;
};

}  // namespace dainr::ad
