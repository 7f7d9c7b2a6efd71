#pragma once

#include <cmath>
#include <span>
#include <vector>

#include "sublm/ndl/lstm.hpp"
#include "sublm/ndl/params.hpp"
#include "sublm/textlm/cbow.hpp"

namespace sublm::textlm {

struct TextLmConfig {
  size_t embed_dim = 768; // also the LSTM hidden size; output weights are tied
};

template <typename T>
struct TextLmGrads;

// Next-token LSTM language model over sub-word unit labels. The output
// projection shares the embedding matrix (logits = E h + b).
template <typename T>
struct TextLm {
  TextLmConfig cfg;
  size_t vocab_size = 0;
  ndl::Tensor<T> embedding; // V × E
  ndl::LstmParams<T> lstm;  // E -> E
  ndl::Tensor<T> out_bias;  // V

  TextLm() = default;
  TextLm(TextLmConfig c, size_t vocab)
      : cfg(c),
        vocab_size(vocab),
        embedding({vocab, c.embed_dim}),
        lstm(c.embed_dim, c.embed_dim),
        out_bias({vocab}) {}

  void init(util::Rng& rng) {
    embedding.fill_uniform(rng, 1.0 / std::sqrt(static_cast<double>(cfg.embed_dim)));
    lstm.init(rng);
    out_bias.zero();
  }

  void init_embedding_from_cbow(const CbowParams& cbow) {
    if (cbow.vocab_size != vocab_size || cbow.dim != cfg.embed_dim)
      throw ValidationError("cbow init: embedding shape mismatch");
    for (size_t i = 0; i < embedding.size(); ++i)
      embedding.data[i] = static_cast<T>(cbow.input.data[i]);
  }

  ndl::NamedParamList<T> named_params(TextLmGrads<T>* grads = nullptr) {
    return {
        {"embedding", &embedding, grads ? &grads->embedding : nullptr},
        {"lstm.w_ih", &lstm.w_ih, grads ? &grads->lstm.w_ih : nullptr},
        {"lstm.w_hh", &lstm.w_hh, grads ? &grads->lstm.w_hh : nullptr},
        {"lstm.bias", &lstm.bias, grads ? &grads->lstm.bias : nullptr},
        {"out_bias", &out_bias, grads ? &grads->out_bias : nullptr},
    };
  }
};

template <typename T>
struct TextLmGrads {
  ndl::Tensor<T> embedding;
  ndl::LstmGrads<T> lstm;
  ndl::Tensor<T> out_bias;

  explicit TextLmGrads(const TextLm<T>& m)
      : embedding(m.embedding.shape), lstm(m.lstm), out_bias(m.out_bias.shape) {}

  void zero() {
    embedding.zero();
    lstm.zero();
    out_bias.zero();
  }
};

// Teacher-forced pass over one contiguous chunk: inputs[i] predicts
// targets[i], starting from zero state. Returns the summed cross entropy;
// gradient contributions (scaled by grad_scale per token) accumulate into
// `grads` when present. `correct` counts argmax hits.
template <typename T>
double textlm_chunk(const TextLm<T>& model, std::span<const size_t> inputs,
                    std::span<const size_t> targets, TextLmGrads<T>* grads,
                    double grad_scale = 1.0, size_t* correct = nullptr) {
  if (inputs.size() != targets.size() || inputs.empty())
    throw ValidationError("textlm_chunk: inputs/targets length mismatch");
  const size_t steps = inputs.size();
  const size_t dim = model.cfg.embed_dim;
  const size_t vocab = model.vocab_size;

  std::vector<ndl::Vec<T>> xs(steps);
  for (size_t t = 0; t < steps; ++t) {
    if (inputs[t] >= vocab || targets[t] >= vocab)
      throw ValidationError("textlm_chunk: token id out of range");
    xs[t].assign(model.embedding.row(inputs[t]), model.embedding.row(inputs[t]) + dim);
  }
  auto run = ndl::lstm_forward(model.lstm, xs);

  double loss = 0.0;
  std::vector<ndl::Vec<T>> dh_per_step;
  if (grads) dh_per_step.assign(steps, {});

  ndl::Vec<T> logits(vocab), probs(vocab);
  for (size_t t = 0; t < steps; ++t) {
    const ndl::Vec<T>& h = run.h_at(t);
    ndl::matvec(model.embedding, h.data(), logits.data());
    for (size_t v = 0; v < vocab; ++v) logits[v] += model.out_bias[v];

    T max_logit = logits[0];
    for (T l : logits) max_logit = std::max(max_logit, l);
    double z = 0.0;
    for (size_t v = 0; v < vocab; ++v) {
      probs[v] = std::exp(logits[v] - max_logit);
      z += static_cast<double>(probs[v]);
    }
    const double log_z = std::log(z) + static_cast<double>(max_logit);
    loss += log_z - static_cast<double>(logits[targets[t]]);

    if (correct) {
      size_t argmax = 0;
      for (size_t v = 1; v < vocab; ++v)
        if (logits[v] > logits[argmax]) argmax = v;
      if (argmax == targets[t]) ++(*correct);
    }

    if (grads) {
      ndl::Vec<T> dlogits(vocab);
      const T inv_z = static_cast<T>(1.0 / z);
      for (size_t v = 0; v < vocab; ++v) dlogits[v] = probs[v] * inv_z;
      dlogits[targets[t]] -= T(1);
      for (size_t v = 0; v < vocab; ++v) dlogits[v] *= static_cast<T>(grad_scale);

      for (size_t v = 0; v < vocab; ++v) grads->out_bias[v] += dlogits[v];
      // tied output: logits = E h + b, so dE += dlogits h^T and dh = E^T dlogits
      ndl::outer_acc(grads->embedding, dlogits.data(), h.data());
      dh_per_step[t].assign(dim, T(0));
      ndl::matvec_transposed_acc(model.embedding, dlogits.data(), dh_per_step[t].data());
    }
  }
  if (!std::isfinite(loss)) throw NumericError("textlm_chunk: non-finite loss");

  if (grads) {
    std::vector<ndl::Vec<T>> dx;
    ndl::lstm_backward(model.lstm, run, &dh_per_step, nullptr, nullptr, grads->lstm, &dx);
    // embedding also receives gradient through its use as the input lookup
    for (size_t t = 0; t < steps; ++t) {
      T* row = grads->embedding.row(inputs[t]);
      for (size_t d = 0; d < dim; ++d) row[d] += dx[t][d];
    }
  }
  return loss;
}

// Final hidden state after consuming the given token ids from zero state.
template <typename T>
ndl::Vec<T> context_embedding(const TextLm<T>& model, std::span<const size_t> token_ids) {
  const size_t dim = model.cfg.embed_dim;
  std::vector<ndl::Vec<T>> xs(token_ids.size());
  for (size_t t = 0; t < token_ids.size(); ++t) {
    if (token_ids[t] >= model.vocab_size)
      throw ValidationError("context_embedding: token id out of range");
    xs[t].assign(model.embedding.row(token_ids[t]), model.embedding.row(token_ids[t]) + dim);
  }
  if (xs.empty()) return ndl::Vec<T>(dim, T(0));
  return ndl::lstm_forward(model.lstm, xs).h;
}

} // namespace sublm::textlm
