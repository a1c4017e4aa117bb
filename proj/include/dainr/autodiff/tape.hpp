#pragma once

#include <functional>
#include <memory>
#include <vector>

#include "dainr/autodiff/tensor.hpp"

namespace dainr::ad {

// Define-by-run record of differentiable operations. Entries are appended in
// execution order, which is a topological order of the graph, so a single
// reverse sweep visits every node exactly once.
template <class T>
class Tape {
 public:
  using BackwardFn = std::function<void()>;

  void record(const Tensor<T>& output, BackwardFn backward) {
    entries_.push_back({output.shared(), std::move(backward)});
  }

  bool empty() const { return entries_.empty(); }
  std::size_t size() const { return entries_.size(); }
  void clear() { entries_.clear(); }

  // Seeds d(loss)/d(loss) = 1 and propagates. Gradients are accumulated, so
  // callers zero parameter gradients beforehand.
  void backward(const Tensor<T>& loss) {
    require(!entries_.empty(), "backward called on an empty tape");
    require(loss.defined() && loss.numel() == 1, "backward requires a scalar loss");
    require(loss.requires_grad(), "loss was not produced by recorded operations");
    loss.grad()[0] += T{1};
    for (auto it = entries_.rbegin(); it != entries_.rend(); ++it) {
      if (it->output->grad.empty()) continue;  // not reachable from the loss
      it->backward();
    }
  }

 private:
  struct Entry {
    std::shared_ptr<TensorStorage<T>> output;
    BackwardFn backward;
  };
  std::vector<Entry> entries_;
};

}  // namespace dainr::ad
