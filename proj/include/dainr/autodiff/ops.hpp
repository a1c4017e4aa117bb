#pragma once

#include <Eigen/Core>
#include <cmath>
#include <cstddef>
#include <initializer_list>
#include <span>
#include <vector>

#include "dainr/autodiff/tape.hpp"
#include "dainr/autodiff/tensor.hpp"

namespace dainr::ad {

namespace detail {

template <class T>
using RowMatrix = Eigen::Matrix<T, Eigen::Dynamic, Eigen::Dynamic, Eigen::RowMajor>;

template <class T>
bool needs_grad(std::initializer_list<Tensor<T>> inputs) {
  for (const auto& t : inputs)
    if (t.defined() && t.requires_grad()) return true;
  return false;
}

template <class T>
Tensor<T> make_output(Shape shape, bool requires_grad) {
  return Tensor<T>::zeros(std::move(shape), requires_grad);
}

template <class T>
void require_matrix(const Tensor<T>& t, const char* what) {
  require(t.defined() && t.rank() == 2, std::string(what) + " must be a rank-2 tensor");
}

template <class T>
T sign(T v) {
  return v > T{0} ? T{1} : (v < T{0} ? T{-1} : T{0});
}

}  // namespace detail

// y = x W^T + b with x [B, in], W [out, in], b [out].
template <class T>
Tensor<T> linear(Tape<T>& tape, const Tensor<T>& x, const Tensor<T>& w, const Tensor<T>& b) {
  detail::require_matrix(x, "linear input");
  detail::require_matrix(w, "linear weight");
  const auto batch = static_cast<Eigen::Index>(x.dim(0));
  const auto in = static_cast<Eigen::Index>(x.dim(1));
  const auto out = static_cast<Eigen::Index>(w.dim(0));
  require(static_cast<Eigen::Index>(w.dim(1)) == in,
          "linear: weight " + to_string(w.shape()) + " incompatible with input " +
              to_string(x.shape()));
  require(b.numel() == static_cast<std::size_t>(out), "linear: bias length mismatch");

  const bool rg = detail::needs_grad<T>({x, w, b});
  auto y = detail::make_output<T>({x.dim(0), w.dim(0)}, rg);
  using M = detail::RowMatrix<T>;
  using V = Eigen::Matrix<T, 1, Eigen::Dynamic>;
  Eigen::Map<const M> X(x.values().data(), batch, in);
  Eigen::Map<const M> W(w.values().data(), out, in);
  Eigen::Map<const V> bias(b.values().data(), out);
  Eigen::Map<M> Y(y.values().data(), batch, out);
  Y.noalias() = X * W.transpose();
  Y.rowwise() += bias;

  if (rg) {
    tape.record(y, [x, w, b, y, batch, in, out] {
      Eigen::Map<const M> dY(y.grad().data(), batch, out);
      if (x.requires_grad()) {
        Eigen::Map<M> dX(x.grad().data(), batch, in);
        Eigen::Map<const M> Wm(w.values().data(), out, in);
        dX.noalias() += dY * Wm;
      }
      if (w.requires_grad()) {
        Eigen::Map<M> dW(w.grad().data(), out, in);
        Eigen::Map<const M> Xm(x.values().data(), batch, in);
        dW.noalias() += dY.transpose() * Xm;
      }
      if (b.requires_grad()) {
        Eigen::Map<V> db(b.grad().data(), out);
        db += dY.colwise().sum();
      }
    });
  }
  return y;
}

// Plain matrix product a [M, K] * b [K, N].
template <class T>
Tensor<T> matmul(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  detail::require_matrix(a, "matmul lhs");
  detail::require_matrix(b, "matmul rhs");
  require(a.dim(1) == b.dim(0), "matmul: inner dimensions differ");
  const auto m = static_cast<Eigen::Index>(a.dim(0));
  const auto k = static_cast<Eigen::Index>(a.dim(1));
  const auto n = static_cast<Eigen::Index>(b.dim(1));
  const bool rg = detail::needs_grad<T>({a, b});
  auto y = detail::make_output<T>({a.dim(0), b.dim(1)}, rg);
  using M = detail::RowMatrix<T>;
  Eigen::Map<M>(y.values().data(), m, n).noalias() =
      Eigen::Map<const M>(a.values().data(), m, k) * Eigen::Map<const M>(b.values().data(), k, n);
  if (rg) {
    tape.record(y, [a, b, y, m, k, n] {
      Eigen::Map<const M> dY(y.grad().data(), m, n);
      if (a.requires_grad())
        Eigen::Map<M>(a.grad().data(), m, k).noalias() +=
            dY * Eigen::Map<const M>(b.values().data(), k, n).transpose();
      if (b.requires_grad())
        Eigen::Map<M>(b.grad().data(), k, n).noalias() +=
            Eigen::Map<const M>(a.values().data(), m, k).transpose() * dY;
    });
  }
  return y;
}

namespace detail {

// Elementwise unary op with derivative expressed through (input, output).
template <class T, class Fwd, class Deriv>
Tensor<T> unary(Tape<T>& tape, const Tensor<T>& x, Fwd fwd, Deriv deriv) {
  const bool rg = x.requires_grad();
  auto y = make_output<T>(x.shape(), rg);
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < xv.size(); ++i) yv[i] = fwd(xv[i]);
  if (rg) {
    tape.record(y, [x, y, deriv] {
      auto gx = x.grad();
      auto gy = y.grad();
      auto xv = x.values();
      auto yv = y.values();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i] * deriv(xv[i], yv[i]);
    });
  }
  return y;
}

}  // namespace detail

template <class T>
Tensor<T> relu(Tape<T>& tape, const Tensor<T>& x) {
  return detail::unary(
      tape, x, [](T v) { return v > T{0} ? v : T{0}; },
      [](T v, T) { return v > T{0} ? T{1} : T{0}; });
}

template <class T>
Tensor<T> sin(Tape<T>& tape, const Tensor<T>& x) {
  return detail::unary(
      tape, x, [](T v) { return std::sin(v); }, [](T v, T) { return std::cos(v); });
}

template <class T>
Tensor<T> cos(Tape<T>& tape, const Tensor<T>& x) {
  return detail::unary(
      tape, x, [](T v) { return std::cos(v); }, [](T v, T) { return -std::sin(v); });
}

template <class T>
Tensor<T> scale(Tape<T>& tape, const Tensor<T>& x, T factor) {
  return detail::unary(
      tape, x, [factor](T v) { return factor * v; }, [factor](T, T) { return factor; });
}

template <class T>
Tensor<T> add(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(),
          "add: shape mismatch " + to_string(a.shape()) + " vs " + to_string(b.shape()));
  const bool rg = detail::needs_grad<T>({a, b});
  auto y = detail::make_output<T>(a.shape(), rg);
  auto av = a.values();
  auto bv = b.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = av[i] + bv[i];
  if (rg) {
    tape.record(y, [a, b, y] {
      auto gy = y.grad();
      if (a.requires_grad()) {
        auto g = a.grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
      }
      if (b.requires_grad()) {
        auto g = b.grad();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i];
      }
    });
  }
  return y;
}

template <class T>
Tensor<T> multiply(Tape<T>& tape, const Tensor<T>& a, const Tensor<T>& b) {
  require(a.shape() == b.shape(), "multiply: shape mismatch");
  const bool rg = detail::needs_grad<T>({a, b});
  auto y = detail::make_output<T>(a.shape(), rg);
  auto av = a.values();
  auto bv = b.values();
  auto yv = y.values();
  for (std::size_t i = 0; i < yv.size(); ++i) yv[i] = av[i] * bv[i];
  if (rg) {
    tape.record(y, [a, b, y] {
      auto gy = y.grad();
      if (a.requires_grad()) {
        auto g = a.grad();
        auto bv = b.values();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * bv[i];
      }
      if (b.requires_grad()) {
        auto g = b.grad();
        auto av = a.values();
        for (std::size_t i = 0; i < g.size(); ++i) g[i] += gy[i] * av[i];
      }
    });
  }
  return y;
}

template <class T>
Tensor<T> sum(Tape<T>& tape, const Tensor<T>& x) {
  const bool rg = x.requires_grad();
  auto y = detail::make_output<T>({}, rg);
  T acc{0};
  for (T v : x.values()) acc += v;
  y.values()[0] = acc;
  if (rg) {
    tape.record(y, [x, y] {
      const T g = y.grad()[0];
      for (auto& v : x.grad()) v += g;
    });
  }
  return y;
}

// Sum of scalar tensors (loss terms).
template <class T>
Tensor<T> add_scalars(Tape<T>& tape, const std::vector<Tensor<T>>& terms) {
  require(!terms.empty(), "add_scalars: no terms");
  bool rg = false;
  T acc{0};
  for (const auto& t : terms) {
    require(t.numel() == 1, "add_scalars: terms must be scalars");
    rg = rg || t.requires_grad();
    acc += t.values()[0];
  }
  auto y = detail::make_output<T>({}, rg);
  y.values()[0] = acc;
  if (rg) {
    tape.record(y, [terms, y] {
      const T g = y.grad()[0];
      for (const auto& t : terms)
        if (t.requires_grad()) t.grad()[0] += g;
    });
  }
  return y;
}

// Column-wise concatenation of [B, n_i] matrices into [B, sum n_i].
template <class T>
Tensor<T> concat_columns(Tape<T>& tape, const std::vector<Tensor<T>>& parts) {
  require(!parts.empty(), "concat_columns: no inputs");
  const std::size_t batch = parts.front().dim(0);
  std::size_t width = 0;
  bool rg = false;
  for (const auto& p : parts) {
    detail::require_matrix(p, "concat_columns input");
    require(p.dim(0) == batch, "concat_columns: row counts differ");
    width += p.dim(1);
    rg = rg || p.requires_grad();
  }
  auto y = detail::make_output<T>({batch, width}, rg);
  auto yv = y.values();
  std::size_t offset = 0;
  for (const auto& p : parts) {
    const std::size_t w = p.dim(1);
    auto pv = p.values();
    for (std::size_t r = 0; r < batch; ++r)
      std::copy_n(pv.begin() + r * w, w, yv.begin() + r * width + offset);
    offset += w;
  }
  if (rg) {
    tape.record(y, [parts, y, batch, width] {
      auto gy = y.grad();
      std::size_t offset = 0;
      for (const auto& p : parts) {
        const std::size_t w = p.dim(1);
        if (p.requires_grad()) {
          auto gp = p.grad();
          for (std::size_t r = 0; r < batch; ++r)
            for (std::size_t c = 0; c < w; ++c) gp[r * w + c] += gy[r * width + offset + c];
        }
        offset += w;
      }
    });
  }
  return y;
}

// Row-wise (leading-axis) concatenation; trailing dimensions must agree.
template <class T>
Tensor<T> concat_rows(Tape<T>& tape, const std::vector<Tensor<T>>& parts) {
  require(!parts.empty(), "concat_rows: no inputs");
  Shape tail(parts.front().shape().begin() + 1, parts.front().shape().end());
  std::size_t rows = 0;
  bool rg = false;
  for (const auto& p : parts) {
    require(p.rank() >= 1 && Shape(p.shape().begin() + 1, p.shape().end()) == tail,
            "concat_rows: trailing shapes differ");
    rows += p.dim(0);
    rg = rg || p.requires_grad();
  }
  Shape shape{rows};
  shape.insert(shape.end(), tail.begin(), tail.end());
  auto y = detail::make_output<T>(shape, rg);
  auto yv = y.values();
  std::size_t offset = 0;
  for (const auto& p : parts) {
    std::copy(p.values().begin(), p.values().end(), yv.begin() + offset);
    offset += p.numel();
  }
  if (rg) {
    tape.record(y, [parts, y] {
      auto gy = y.grad();
      std::size_t offset = 0;
      for (const auto& p : parts) {
        if (p.requires_grad()) {
          auto gp = p.grad();
          for (std::size_t i = 0; i < gp.size(); ++i) gp[i] += gy[offset + i];
        }
        offset += p.numel();
      }
    });
  }
  return y;
}

// Same data, new shape.
template <class T>
Tensor<T> reshape(Tape<T>& tape, const Tensor<T>& x, Shape shape) {
  require(element_count(shape) == x.numel(), "reshape: element count changes");
  auto y = Tensor<T>::from(std::move(shape), std::vector<T>(x.values().begin(), x.values().end()),
                           x.requires_grad());
  if (x.requires_grad()) {
    tape.record(y, [x, y] {
      auto gx = x.grad();
      auto gy = y.grad();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += gy[i];
    });
  }
  return y;
}

// out[i, :] = x[indices[i], :]; the backward pass scatter-adds in index order.
template <class T>
Tensor<T> gather_rows(Tape<T>& tape, const Tensor<T>& x, std::vector<std::size_t> indices) {
  detail::require_matrix(x, "gather_rows input");
  const std::size_t width = x.dim(1);
  for (std::size_t i : indices) require(i < x.dim(0), "gather_rows: index out of range");
  const bool rg = x.requires_grad();
  auto y = detail::make_output<T>({indices.size(), width}, rg);
  auto xv = x.values();
  auto yv = y.values();
  for (std::size_t r = 0; r < indices.size(); ++r)
    std::copy_n(xv.begin() + indices[r] * width, width, yv.begin() + r * width);
  if (rg) {
    tape.record(y, [x, y, width, indices = std::move(indices)] {
      auto gx = x.grad();
      auto gy = y.grad();
      for (std::size_t r = 0; r < indices.size(); ++r)
        for (std::size_t c = 0; c < width; ++c) gx[indices[r] * width + c] += gy[r * width + c];
    });
  }
  return y;
}

// sum_i |x_i - target_i|, with the subgradient sign(0) = 0.
template <class T>
Tensor<T> l1_distance(Tape<T>& tape, const Tensor<T>& x, std::span<const T> target) {
  require(x.numel() == target.size(), "l1_distance: length mismatch");
  const bool rg = x.requires_grad();
  auto y = detail::make_output<T>({}, rg);
  auto xv = x.values();
  T acc{0};
  for (std::size_t i = 0; i < xv.size(); ++i) acc += std::abs(xv[i] - target[i]);
  y.values()[0] = acc;
  if (rg) {
    std::vector<T> tgt(target.begin(), target.end());
    tape.record(y, [x, y, tgt = std::move(tgt)] {
      const T g = y.grad()[0];
      auto gx = x.grad();
      auto xv = x.values();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += g * detail::sign(xv[i] - tgt[i]);
    });
  }
  return y;
}

// sum_i (x_i - target_i)^2
template <class T>
Tensor<T> squared_l2_distance(Tape<T>& tape, const Tensor<T>& x, std::span<const T> target) {
  require(x.numel() == target.size(), "squared_l2_distance: length mismatch");
  const bool rg = x.requires_grad();
  auto y = detail::make_output<T>({}, rg);
  auto xv = x.values();
  T acc{0};
  for (std::size_t i = 0; i < xv.size(); ++i) {
    const T d = xv[i] - target[i];
    acc += d * d;
  }
  y.values()[0] = acc;
  if (rg) {
    std::vector<T> tgt(target.begin(), target.end());
    tape.record(y, [x, y, tgt = std::move(tgt)] {
      const T g = y.grad()[0];
      auto gx = x.grad();
      auto xv = x.values();
      for (std::size_t i = 0; i < gx.size(); ++i) gx[i] += T{2} * g * (xv[i] - tgt[i]);
    });
  }
  return y;
}

}  // namespace dainr::ad
