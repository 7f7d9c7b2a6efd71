#pragma once

#include <cmath>
#include <string>
#include <type_traits>
#include <vector>

#include "sublm/ndl/tensor.hpp"

namespace sublm::ndl {

// Single LSTM cell. Gate order in the stacked 4H dimension is i, f, g, o.
template <typename T>
struct LstmParams {
  size_t input_dim = 0;
  size_t hidden_dim = 0;
  Tensor<T> w_ih; // 4H × I
  Tensor<T> w_hh; // 4H × H
  Tensor<T> bias; // 4H

  LstmParams() = default;
  LstmParams(size_t in, size_t hidden)
      : input_dim(in),
        hidden_dim(hidden),
        w_ih({4 * hidden, in}),
        w_hh({4 * hidden, hidden}),
        bias({4 * hidden}) {}

  // uniform(-1/sqrt(H), 1/sqrt(H)); forget-gate bias starts at +1.
  void init(util::Rng& rng) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(hidden_dim));
    w_ih.fill_uniform(rng, bound);
    w_hh.fill_uniform(rng, bound);
    bias.zero();
    for (size_t h = 0; h < hidden_dim; ++h) bias[hidden_dim + h] = T(1);
  }
};

template <typename T>
struct LstmGrads {
  Tensor<T> w_ih, w_hh, bias;

  LstmGrads() = default;
  explicit LstmGrads(const LstmParams<T>& p)
      : w_ih(p.w_ih.shape), w_hh(p.w_hh.shape), bias(p.bias.shape) {}

  void zero() {
    w_ih.zero();
    w_hh.zero();
    bias.zero();
  }

  void add(const LstmGrads& other) {
    for (size_t i = 0; i < w_ih.size(); ++i) w_ih[i] += other.w_ih[i];
    for (size_t i = 0; i < w_hh.size(); ++i) w_hh[i] += other.w_hh[i];
    for (size_t i = 0; i < bias.size(); ++i) bias[i] += other.bias[i];
  }
};

// Everything the backward pass needs from one forward step.
template <typename T>
struct LstmStepCache {
  Vec<T> x;
  Vec<T> h_prev, c_prev;
  Vec<T> gi, gf, gg, go; // post-activation gates
  Vec<T> c, tanh_c;
};

// One cell step. h_out/c_out are resized to H; cache is optional.
template <typename T>
void lstm_step(const LstmParams<T>& p, const Vec<T>& x, const Vec<T>& h_prev,
               const Vec<T>& c_prev, Vec<T>& h_out, Vec<T>& c_out,
               LstmStepCache<T>* cache = nullptr) {
  const size_t hidden = p.hidden_dim;
  if (x.size() != p.input_dim || h_prev.size() != hidden || c_prev.size() != hidden)
    throw ValidationError("lstm_step: shape mismatch");

  Vec<T> pre(4 * hidden);
  matvec(p.w_ih, x.data(), pre.data());
  matvec(p.w_hh, h_prev.data(), pre.data(), /*accumulate=*/true);
  for (size_t k = 0; k < 4 * hidden; ++k) pre[k] += p.bias[k];

  h_out.assign(hidden, T(0));
  c_out.assign(hidden, T(0));
  Vec<T> gi(hidden), gf(hidden), gg(hidden), go(hidden), tanh_c(hidden);
  for (size_t h = 0; h < hidden; ++h) {
    gi[h] = sigmoid(pre[h]);
    gf[h] = sigmoid(pre[hidden + h]);
    gg[h] = std::tanh(pre[2 * hidden + h]);
    go[h] = sigmoid(pre[3 * hidden + h]);
    c_out[h] = gf[h] * c_prev[h] + gi[h] * gg[h];
    tanh_c[h] = std::tanh(c_out[h]);
    h_out[h] = go[h] * tanh_c[h];
  }
  check_finite(h_out, "lstm_step h");
  check_finite(c_out, "lstm_step c");

  if (cache) {
    cache->x = x;
    cache->h_prev = h_prev;
    cache->c_prev = c_prev;
    cache->gi = std::move(gi);
    cache->gf = std::move(gf);
    cache->gg = std::move(gg);
    cache->go = std::move(go);
    cache->c = c_out;
    cache->tanh_c = std::move(tanh_c);
  }
}

namespace detail {

// Gate pre-activation gradients for one step. dh/dc carry the incoming
// gradient and are replaced by the gradient w.r.t. the previous step's h/c.
template <typename T>
void lstm_step_grads(const LstmParams<T>& p, const LstmStepCache<T>& cache, Vec<T>& dh,
                     Vec<T>& dc, Vec<T>& da, Vec<T>* dx) {
  const size_t hidden = p.hidden_dim;
  da.resize(4 * hidden);
  for (size_t h = 0; h < hidden; ++h) {
    const T go = cache.go[h], gi = cache.gi[h], gf = cache.gf[h], gg = cache.gg[h];
    const T tc = cache.tanh_c[h];
    const T d_o = dh[h] * tc;
    const T dct = dc[h] + dh[h] * go * (T(1) - tc * tc);
    const T d_i = dct * gg;
    const T d_f = dct * cache.c_prev[h];
    const T d_g = dct * gi;
    da[h] = d_i * gi * (T(1) - gi);
    da[hidden + h] = d_f * gf * (T(1) - gf);
    da[2 * hidden + h] = d_g * (T(1) - gg * gg);
    da[3 * hidden + h] = d_o * go * (T(1) - go);
    dc[h] = dct * gf; // gradient into c_{t-1}
  }
  if (dx) {
    dx->assign(p.input_dim, T(0));
    matvec_transposed_acc(p.w_ih, da.data(), dx->data());
  }
  // gradient into h_{t-1}
  std::fill(dh.begin(), dh.end(), T(0));
  matvec_transposed_acc(p.w_hh, da.data(), dh.data());
}

// dW += sum_t da[t] x[t]^T with each dW row streamed once; the per-step
// vectors stay cache-resident, which matters over long sequences.
template <typename T>
void outer_acc_blocked(Tensor<T>& dw, const std::vector<Vec<T>>& das,
                       const std::vector<const Vec<T>*>& xs) {
  const size_t out_dim = dw.rows(), in_dim = dw.cols();
  const size_t steps = das.size();
  for (size_t o = 0; o < out_dim; ++o) {
    T* row = dw.row(o);
    for (size_t t = 0; t < steps; ++t) {
      const T g = das[t][o];
      if (g == T(0)) continue;
      const T* x = xs[t]->data();
      for (size_t i = 0; i < in_dim; ++i) row[i] += g * x[i];
    }
  }
}

} // namespace detail

// Backward through one cached step. dh/dc carry the incoming gradient and are
// replaced by the gradient w.r.t. the previous step's h/c. dx, when non-null,
// receives the input gradient (overwritten).
template <typename T>
void lstm_step_backward(const LstmParams<T>& p, const LstmStepCache<T>& cache, Vec<T>& dh,
                        Vec<T>& dc, LstmGrads<T>& grads, Vec<T>* dx = nullptr) {
  Vec<T> da;
  detail::lstm_step_grads(p, cache, dh, dc, da, dx);
  outer_acc(grads.w_ih, da.data(), cache.x.data());
  outer_acc(grads.w_hh, da.data(), cache.h_prev.data());
  for (size_t k = 0; k < 4 * p.hidden_dim; ++k) grads.bias[k] += da[k];
}

// A full forward run over a sequence, keeping per-step caches for BPTT.
template <typename T>
struct LstmRun {
  std::vector<LstmStepCache<T>> steps;
  Vec<T> h, c; // final states

  // h_t for step t; the final step's h lives in `h`.
  const Vec<T>& h_at(size_t t) const { return t + 1 < steps.size() ? steps[t + 1].h_prev : h; }
};

template <typename T>
LstmRun<T> lstm_forward(const LstmParams<T>& p, const std::vector<Vec<T>>& inputs,
                        const Vec<T>* h0 = nullptr, const Vec<T>* c0 = nullptr) {
  LstmRun<T> run;
  run.h = h0 ? *h0 : Vec<T>(p.hidden_dim, T(0));
  run.c = c0 ? *c0 : Vec<T>(p.hidden_dim, T(0));
  run.steps.resize(inputs.size());
  Vec<T> h_next, c_next;
  for (size_t t = 0; t < inputs.size(); ++t) {
    lstm_step(p, inputs[t], run.h, run.c, h_next, c_next, &run.steps[t]);
    run.h = h_next;
    run.c = c_next;
  }
  return run;
}

// BPTT over a cached run. dh_per_step[t] (optional) is the upstream gradient
// on h_t; dh_last/dc_last (optional) add gradient on the final states.
// Gradients accumulate into `grads`. dx, dh0, dc0 are optional outputs.
template <typename T>
void lstm_backward(const LstmParams<T>& p, const LstmRun<T>& run,
                   std::type_identity_t<const std::vector<Vec<T>>*> dh_per_step,
                   std::type_identity_t<const Vec<T>*> dh_last,
                   std::type_identity_t<const Vec<T>*> dc_last, LstmGrads<T>& grads,
                   std::type_identity_t<std::vector<Vec<T>>*> dx = nullptr,
                   std::type_identity_t<Vec<T>*> dh0 = nullptr,
                   std::type_identity_t<Vec<T>*> dc0 = nullptr) {
  const size_t hidden = p.hidden_dim;
  const size_t n_steps = run.steps.size();
  Vec<T> dh(hidden, T(0)), dc(hidden, T(0));
  if (dh_last) axpy(T(1), *dh_last, dh);
  if (dc_last) axpy(T(1), *dc_last, dc);
  if (dx) dx->assign(n_steps, Vec<T>());

  // gate gradients per step; the weight-gradient update is deferred so each
  // dW row is streamed only once per sequence
  std::vector<Vec<T>> das(n_steps);
  for (size_t t = n_steps; t-- > 0;) {
    if (dh_per_step && !(*dh_per_step)[t].empty()) axpy(T(1), (*dh_per_step)[t], dh);
    detail::lstm_step_grads(p, run.steps[t], dh, dc, das[t], dx ? &(*dx)[t] : nullptr);
  }

  std::vector<const Vec<T>*> xs(n_steps), hs(n_steps);
  for (size_t t = 0; t < n_steps; ++t) {
    xs[t] = &run.steps[t].x;
    hs[t] = &run.steps[t].h_prev;
  }
  detail::outer_acc_blocked(grads.w_ih, das, xs);
  detail::outer_acc_blocked(grads.w_hh, das, hs);
  for (size_t t = 0; t < n_steps; ++t)
    for (size_t k = 0; k < 4 * hidden; ++k) grads.bias[k] += das[t][k];

  if (dh0) *dh0 = dh;
  if (dc0) *dc0 = dc;
}

} // namespace sublm::ndl
