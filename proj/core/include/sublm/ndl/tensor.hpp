#pragma once

#include <cmath>
#include <cstddef>
#include <numeric>
#include <string>
#include <vector>

#include "sublm/error.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::ndl {

// Dense row-major tensor. Templated on the scalar so the same model code
// runs in 32-bit for training and 64-bit for finite-difference checks.
template <typename T>
struct Tensor {
  std::vector<size_t> shape;
  std::vector<T> data;

  Tensor() = default;
  explicit Tensor(std::vector<size_t> s, T fill = T(0))
      : shape(std::move(s)),
        data(std::accumulate(shape.begin(), shape.end(), size_t{1}, std::multiplies<>()), fill) {}

  size_t size() const { return data.size(); }
  size_t rows() const { return shape.empty() ? 0 : shape[0]; }
  size_t cols() const { return shape.size() < 2 ? 1 : shape[1]; }

  T* row(size_t r) { return data.data() + r * cols(); }
  const T* row(size_t r) const { return data.data() + r * cols(); }

  T& operator[](size_t i) { return data[i]; }
  const T& operator[](size_t i) const { return data[i]; }

  void zero() { std::fill(data.begin(), data.end(), T(0)); }

  void fill_uniform(util::Rng& rng, double bound) {
    for (auto& v : data) v = static_cast<T>(rng.uniform(-bound, bound));
  }

  bool same_shape(const Tensor& other) const { return shape == other.shape; }

  template <typename U>
  Tensor<U> cast() const {
    Tensor<U> out;
    out.shape = shape;
    out.data.resize(data.size());
    for (size_t i = 0; i < data.size(); ++i) out.data[i] = static_cast<U>(data[i]);
    return out;
  }
};

template <typename T>
using Vec = std::vector<T>;

template <typename T>
inline T sigmoid(T v) {
  return T(1) / (T(1) + std::exp(-v));
}

template <typename T>
inline void check_finite(const T* data, size_t n, const std::string& what) {
  for (size_t i = 0; i < n; ++i) {
    if (!std::isfinite(static_cast<double>(data[i])))
      throw NumericError("non-finite value in " + what + " at index " + std::to_string(i));
  }
}

template <typename T>
inline void check_finite(const Vec<T>& v, const std::string& what) {
  check_finite(v.data(), v.size(), what);
}

template <typename T>
inline void check_finite(const Tensor<T>& t, const std::string& what) {
  check_finite(t.data.data(), t.size(), what);
}

// Lane-blocked dot product: fixed summation order, vectorizable without
// relaxing IEEE semantics. 16 lanes keep the FMA pipeline busy instead of
// serializing on one accumulator.
template <typename T>
inline T dot(const T* a, const T* b, size_t n) {
  constexpr size_t kLanes = 16;
  T lanes[kLanes] = {};
  size_t i = 0;
  for (; i + kLanes <= n; i += kLanes)
    for (size_t k = 0; k < kLanes; ++k) lanes[k] += a[i + k] * b[i + k];
  T acc = T(0);
  for (; i < n; ++i) acc += a[i] * b[i];
  for (size_t k = 0; k < kLanes; ++k) acc += lanes[k];
  return acc;
}

// y = W x (+ y0). W is O×I row-major.
template <typename T>
inline void matvec(const Tensor<T>& w, const T* x, T* y, bool accumulate = false) {
  const size_t out_dim = w.rows(), in_dim = w.cols();
  for (size_t o = 0; o < out_dim; ++o) {
    const T d = dot(w.row(o), x, in_dim);
    y[o] = accumulate ? y[o] + d : d;
  }
}

// dx += W^T dy.
template <typename T>
inline void matvec_transposed_acc(const Tensor<T>& w, const T* dy, T* dx) {
  const size_t out_dim = w.rows(), in_dim = w.cols();
  for (size_t o = 0; o < out_dim; ++o) {
    const T* wr = w.row(o);
    const T g = dy[o];
    if (g == T(0)) continue;
    for (size_t i = 0; i < in_dim; ++i) dx[i] += wr[i] * g;
  }
}

// dW += dy x^T.
template <typename T>
inline void outer_acc(Tensor<T>& dw, const T* dy, const T* x) {
  const size_t out_dim = dw.rows(), in_dim = dw.cols();
  for (size_t o = 0; o < out_dim; ++o) {
    T* wr = dw.row(o);
    const T g = dy[o];
    if (g == T(0)) continue;
    for (size_t i = 0; i < in_dim; ++i) wr[i] += g * x[i];
  }
}

template <typename T>
inline void axpy(T a, const Vec<T>& x, Vec<T>& y) {
  for (size_t i = 0; i < x.size(); ++i) y[i] += a * x[i];
}

} // namespace sublm::ndl
