#pragma once

#include <cmath>

#include "sublm/ndl/tensor.hpp"

namespace sublm::ndl {

// Mean squared error over all entries. grad = 2 (pred - target) / N.
template <typename T>
T mse_loss(const Vec<T>& pred, const Vec<T>& target, Vec<T>* grad = nullptr) {
  if (pred.size() != target.size() || pred.empty())
    throw ValidationError("mse_loss: shape mismatch");
  const T inv_n = T(1) / static_cast<T>(pred.size());
  T acc = T(0);
  if (grad) grad->assign(pred.size(), T(0));
  for (size_t i = 0; i < pred.size(); ++i) {
    const T d = pred[i] - target[i];
    acc += d * d;
    if (grad) (*grad)[i] = T(2) * d * inv_n;
  }
  const T loss = acc * inv_n;
  if (!std::isfinite(static_cast<double>(loss))) throw NumericError("mse_loss: non-finite loss");
  return loss;
}

// Mean binary cross entropy over independent logits with {0,1} targets,
// in the overflow-safe form max(l,0) - l t + log(1 + exp(-|l|)).
// grad = (sigmoid(l) - t) / N.
template <typename T>
T bce_loss(const Vec<T>& logits, const Vec<T>& targets, Vec<T>* grad = nullptr) {
  if (logits.size() != targets.size() || logits.empty())
    throw ValidationError("bce_loss: shape mismatch");
  const T inv_n = T(1) / static_cast<T>(logits.size());
  T acc = T(0);
  if (grad) grad->assign(logits.size(), T(0));
  for (size_t i = 0; i < logits.size(); ++i) {
    const T t = targets[i];
    if (t != T(0) && t != T(1)) throw ValidationError("bce_loss: target outside {0,1}");
    const T l = logits[i];
    acc += std::max(l, T(0)) - l * t + std::log1p(std::exp(-std::abs(l)));
    if (grad) (*grad)[i] = (sigmoid(l) - t) * inv_n;
  }
  const T loss = acc * inv_n;
  if (!std::isfinite(static_cast<double>(loss))) throw NumericError("bce_loss: non-finite loss");
  return loss;
}

} // namespace sublm::ndl
