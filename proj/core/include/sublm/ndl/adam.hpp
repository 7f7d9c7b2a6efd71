#pragma once

#include <cmath>

#include "sublm/ndl/params.hpp"

namespace sublm::ndl {

// Bias-corrected Adam over a named parameter list.
template <typename T>
class Adam {
public:
  double lr = 1e-3;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double eps = 1e-8;

  explicit Adam(double learning_rate = 1e-3) : lr(learning_rate) {}

  void step(NamedParamList<T>& params) {
    if (slots_.empty()) {
      for (auto& p : params) {
        slots_.push_back({Tensor<T>(p.value->shape), Tensor<T>(p.value->shape)});
      }
    }
    if (slots_.size() != params.size()) throw ValidationError("adam: parameter list changed");
    ++t_;
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t_));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t_));
    for (size_t k = 0; k < params.size(); ++k) {
      auto& p = params[k];
      if (!p.grad) continue;
      if (!p.value->same_shape(*p.grad) || !p.value->same_shape(slots_[k].m))
        throw ValidationError("adam: shape mismatch for " + p.name);
      check_finite(*p.grad, "gradient of " + p.name);
      Tensor<T>& m = slots_[k].m;
      Tensor<T>& v = slots_[k].v;
      for (size_t i = 0; i < p.value->size(); ++i) {
        const double g = static_cast<double>(p.grad->data[i]);
        const double mi = beta1 * static_cast<double>(m[i]) + (1.0 - beta1) * g;
        const double vi = beta2 * static_cast<double>(v[i]) + (1.0 - beta2) * g * g;
        m[i] = static_cast<T>(mi);
        v[i] = static_cast<T>(vi);
        const double m_hat = mi / bc1;
        const double v_hat = vi / bc2;
        p.value->data[i] -= static_cast<T>(lr * m_hat / (std::sqrt(v_hat) + eps));
      }
      check_finite(*p.value, "parameter " + p.name);
    }
  }

  uint64_t steps_taken() const { return t_; }

private:
  struct Slot {
    Tensor<T> m, v;
  };
  std::vector<Slot> slots_;
  uint64_t t_ = 0;
};

} // namespace sublm::ndl
