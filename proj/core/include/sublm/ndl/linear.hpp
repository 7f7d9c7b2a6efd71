#pragma once

#include <cmath>

#include "sublm/ndl/tensor.hpp"

namespace sublm::ndl {

template <typename T>
struct LinearParams {
  size_t input_dim = 0;
  size_t output_dim = 0;
  Tensor<T> w; // O × I
  Tensor<T> b; // O

  LinearParams() = default;
  LinearParams(size_t in, size_t out)
      : input_dim(in), output_dim(out), w({out, in}), b({out}) {}

  bool empty() const { return w.size() == 0; }

  void init(util::Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(std::max<size_t>(input_dim, 1)));
    w.fill_uniform(rng, bound);
    b.zero();
  }
};

template <typename T>
struct LinearGrads {
  Tensor<T> w, b;

  LinearGrads() = default;
  explicit LinearGrads(const LinearParams<T>& p) : w(p.w.shape), b(p.b.shape) {}

  void zero() {
    w.zero();
    b.zero();
  }

  void add(const LinearGrads& other) {
    for (size_t i = 0; i < w.size(); ++i) w[i] += other.w[i];
    for (size_t i = 0; i < b.size(); ++i) b[i] += other.b[i];
  }
};

template <typename T>
void linear_forward(const LinearParams<T>& p, const Vec<T>& x, Vec<T>& y) {
  if (x.size() != p.input_dim) throw ValidationError("linear_forward: input dim mismatch");
  y.assign(p.output_dim, T(0));
  matvec(p.w, x.data(), y.data());
  for (size_t o = 0; o < p.output_dim; ++o) y[o] += p.b[o];
  check_finite(y, "linear output");
}

// dx (optional, accumulated) and parameter grads for one sample.
template <typename T>
void linear_backward(const LinearParams<T>& p, const Vec<T>& x, const Vec<T>& dy,
                     LinearGrads<T>& grads, Vec<T>* dx_acc = nullptr) {
  outer_acc(grads.w, dy.data(), x.data());
  for (size_t o = 0; o < p.output_dim; ++o) grads.b[o] += dy[o];
  if (dx_acc) {
    if (dx_acc->size() != p.input_dim) dx_acc->assign(p.input_dim, T(0));
    matvec_transposed_acc(p.w, dy.data(), dx_acc->data());
  }
}

} // namespace sublm::ndl
