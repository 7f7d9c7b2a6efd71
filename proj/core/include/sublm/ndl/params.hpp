#pragma once

#include <string>
#include <vector>

#include "sublm/ndl/tensor.hpp"

namespace sublm::ndl {

// Uniform named view over a model's trainable tensors and their gradient
// buffers. Order is part of the checkpoint contract.
template <typename T>
struct NamedParam {
  std::string name;
  Tensor<T>* value = nullptr;
  Tensor<T>* grad = nullptr;
};

template <typename T>
using NamedParamList = std::vector<NamedParam<T>>;

template <typename T>
inline void zero_grads(NamedParamList<T>& params) {
  for (auto& p : params)
    if (p.grad) p.grad->zero();
}

// Global-norm gradient clipping. Returns the pre-clip norm.
template <typename T>
inline double clip_grad_norm(NamedParamList<T>& params, double max_norm) {
  double sq = 0.0;
  for (auto& p : params) {
    if (!p.grad) continue;
    for (const T& g : p.grad->data) sq += static_cast<double>(g) * static_cast<double>(g);
  }
  const double norm = std::sqrt(sq);
  if (max_norm > 0.0 && norm > max_norm) {
    const T scale = static_cast<T>(max_norm / norm);
    for (auto& p : params) {
      if (!p.grad) continue;
      for (T& g : p.grad->data) g *= scale;
    }
  }
  return norm;
}

} // namespace sublm::ndl
