#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "sublm/ndl/linear.hpp"
#include "sublm/ndl/losses.hpp"
#include "sublm/ndl/lstm.hpp"
#include "sublm/ndl/params.hpp"

namespace sublm::speechlm {

enum class Variant { synthesis_only, mtl_panphon, aux_textlm, top_line };

Variant parse_variant(const std::string& name);
const char* variant_name(Variant v);

struct SpeechLmConfig {
  size_t mel_bins = 80;
  size_t hidden = 256; // per-unit latent size
  size_t n_ctx = 4;
  size_t artic_dim = 66;  // articulatory vector width (66 syllable, 22 phoneme)
  size_t text_dim = 768;  // text-LM context embedding width
  Variant variant = Variant::synthesis_only;
  double lambda_mtl = 1.0;
  double lambda_len = 0.1;
  double first_frame_value = -11.512925464970229; // ln(1e-5), the all-floor frame
  size_t max_len_frames = 43; // 250 ms at the default hop

  size_t z_dim() const { return n_ctx * hidden; }
  size_t aux_dim() const {
    switch (variant) {
      case Variant::aux_textlm: return text_dim;
      case Variant::top_line: return artic_dim;
      default: return 0;
    }
  }
  size_t z_aug_dim() const { return z_dim() + aux_dim(); }

  void validate() const;
};

struct DimLedger {
  size_t v = 0;       // per-unit latent
  size_t z = 0;       // concatenated context
  size_t z_aug = 0;   // context + auxiliary features
  size_t mel = 0;
  size_t panphon = 0; // MTL / top-line articulatory width
};

template <typename T>
struct SpeechLmGrads;

template <typename T>
struct SpeechLmModel {
  SpeechLmConfig cfg;
  ndl::LstmParams<T> encoder;      // mel -> hidden, one instance shared by all positions
  ndl::LinearParams<T> init_proj;  // z_aug -> (h0, c0)
  ndl::LstmParams<T> decoder;      // mel -> hidden
  ndl::LinearParams<T> frame_head; // hidden -> mel
  ndl::LinearParams<T> length_head; // z_aug -> 1, predicts ln(frame count)
  ndl::LinearParams<T> mtl_head;   // z -> artic_dim (mtl_panphon only)

  SpeechLmModel() = default;
  explicit SpeechLmModel(const SpeechLmConfig& c)
      : cfg(c),
        encoder(c.mel_bins, c.hidden),
        init_proj(c.z_aug_dim(), 2 * c.hidden),
        decoder(c.mel_bins, c.hidden),
        frame_head(c.hidden, c.mel_bins),
        length_head(c.z_aug_dim(), 1) {
    cfg.validate();
    if (cfg.variant == Variant::mtl_panphon)
      mtl_head = ndl::LinearParams<T>(c.z_dim(), c.artic_dim);
  }

  void init(uint64_t seed) {
    util::Rng rng(seed);
    encoder.init(rng);
    init_proj.init(rng);
    decoder.init(rng);
    frame_head.init(rng);
    length_head.init(rng);
    if (!mtl_head.empty()) mtl_head.init(rng);
  }

  DimLedger dims() const {
    return {cfg.hidden, cfg.z_dim(), cfg.z_aug_dim(), cfg.mel_bins,
            cfg.variant == Variant::mtl_panphon || cfg.variant == Variant::top_line
                ? cfg.artic_dim
                : cfg.artic_dim};
  }

  ndl::NamedParamList<T> named_params(SpeechLmGrads<T>* g = nullptr) {
    ndl::NamedParamList<T> list = {
        {"encoder.w_ih", &encoder.w_ih, g ? &g->encoder.w_ih : nullptr},
        {"encoder.w_hh", &encoder.w_hh, g ? &g->encoder.w_hh : nullptr},
        {"encoder.bias", &encoder.bias, g ? &g->encoder.bias : nullptr},
        {"init_proj.w", &init_proj.w, g ? &g->init_proj.w : nullptr},
        {"init_proj.b", &init_proj.b, g ? &g->init_proj.b : nullptr},
        {"decoder.w_ih", &decoder.w_ih, g ? &g->decoder.w_ih : nullptr},
        {"decoder.w_hh", &decoder.w_hh, g ? &g->decoder.w_hh : nullptr},
        {"decoder.bias", &decoder.bias, g ? &g->decoder.bias : nullptr},
        {"frame_head.w", &frame_head.w, g ? &g->frame_head.w : nullptr},
        {"frame_head.b", &frame_head.b, g ? &g->frame_head.b : nullptr},
        {"length_head.w", &length_head.w, g ? &g->length_head.w : nullptr},
        {"length_head.b", &length_head.b, g ? &g->length_head.b : nullptr},
    };
    if (!mtl_head.empty()) {
      list.push_back({"mtl_head.w", &mtl_head.w, g ? &g->mtl_head.w : nullptr});
      list.push_back({"mtl_head.b", &mtl_head.b, g ? &g->mtl_head.b : nullptr});
    }
    return list;
  }
};

template <typename T>
struct SpeechLmGrads {
  ndl::LstmGrads<T> encoder, decoder;
  ndl::LinearGrads<T> init_proj, frame_head, length_head, mtl_head;

  explicit SpeechLmGrads(const SpeechLmModel<T>& m)
      : encoder(m.encoder),
        decoder(m.decoder),
        init_proj(m.init_proj),
        frame_head(m.frame_head),
        length_head(m.length_head),
        mtl_head(m.mtl_head) {}

  void zero() {
    encoder.zero();
    decoder.zero();
    init_proj.zero();
    frame_head.zero();
    length_head.zero();
    mtl_head.zero();
  }

  void add(const SpeechLmGrads& other) {
    encoder.add(other.encoder);
    decoder.add(other.decoder);
    init_proj.add(other.init_proj);
    frame_head.add(other.frame_head);
    length_head.add(other.length_head);
    mtl_head.add(other.mtl_head);
  }
};

// One training example: 4 context units, the next unit as teacher frames,
// plus whatever auxiliary data the variant needs.
template <typename T>
struct WindowSample {
  std::vector<std::vector<ndl::Vec<T>>> context; // n_ctx units, frames each
  std::vector<ndl::Vec<T>> target;               // teacher frames of the next unit
  ndl::Vec<T> aux;          // empty | text embedding (768) | next-unit artic
  ndl::Vec<T> artic_target; // mtl_panphon: {0,1} articulatory targets
};

struct LossBreakdown {
  double total = 0.0;
  double mse = 0.0;
  double bce = 0.0;      // 0 when the variant has no MTL head
  double len_term = 0.0; // squared error on ln(frame count)
};

template <typename T>
struct ForwardCache {
  std::vector<ndl::LstmRun<T>> enc_runs;
  ndl::Vec<T> z, z_aug;
  ndl::Vec<T> init_out; // (h0, c0)
  std::vector<ndl::Vec<T>> dec_inputs;
  ndl::LstmRun<T> dec_run;
  std::vector<ndl::Vec<T>> pred;
  ndl::Vec<T> mtl_logits;
  ndl::Vec<T> len_out; // 1
  LossBreakdown losses;
};

// Final encoder state over one unit's frames.
template <typename T>
ndl::Vec<T> encode_unit(const SpeechLmModel<T>& model, const std::vector<ndl::Vec<T>>& frames) {
  if (frames.empty()) throw ValidationError("encode_unit: empty unit");
  for (const auto& f : frames)
    if (f.size() != model.cfg.mel_bins)
      throw ValidationError("encode_unit: frame width does not match mel_bins");
  return ndl::lstm_forward(model.encoder, frames).h;
}

// z (and z_aug) for a 4-unit context plus variant-dependent auxiliary vector.
template <typename T>
void build_context(const SpeechLmModel<T>& model,
                   const std::vector<std::vector<ndl::Vec<T>>>& context, const ndl::Vec<T>& aux,
                   ndl::Vec<T>& z_out, ndl::Vec<T>& z_aug_out,
                   std::vector<ndl::LstmRun<T>>* runs = nullptr) {
  const auto& cfg = model.cfg;
  if (context.size() != cfg.n_ctx)
    throw ValidationError("build_context: expected " + std::to_string(cfg.n_ctx) +
                          " context units, got " + std::to_string(context.size()));
  if (aux.size() != cfg.aux_dim())
    throw ValidationError("build_context: auxiliary vector must have dim " +
                          std::to_string(cfg.aux_dim()) + " for variant " +
                          variant_name(cfg.variant) + ", got " + std::to_string(aux.size()));

  z_out.assign(cfg.z_dim(), T(0));
  if (runs) runs->resize(cfg.n_ctx);
  for (size_t i = 0; i < cfg.n_ctx; ++i) {
    if (context[i].empty()) throw ValidationError("build_context: empty context unit");
    auto run = ndl::lstm_forward(model.encoder, context[i]);
    std::copy(run.h.begin(), run.h.end(), z_out.begin() + static_cast<ptrdiff_t>(i * cfg.hidden));
    if (runs) (*runs)[i] = std::move(run);
  }
  z_aug_out = z_out;
  z_aug_out.insert(z_aug_out.end(), aux.begin(), aux.end());
}

// Teacher-forced forward pass; fills the cache for the backward pass.
template <typename T>
LossBreakdown forward(const SpeechLmModel<T>& model, const WindowSample<T>& sample,
                      ForwardCache<T>& cache) {
  const auto& cfg = model.cfg;
  if (sample.target.empty()) throw ValidationError("forward: empty target unit");

  build_context(model, sample.context, sample.aux, cache.z, cache.z_aug, &cache.enc_runs);

  ndl::linear_forward(model.init_proj, cache.z_aug, cache.init_out);
  ndl::Vec<T> h0(cache.init_out.begin(), cache.init_out.begin() + cfg.hidden);
  ndl::Vec<T> c0(cache.init_out.begin() + cfg.hidden, cache.init_out.end());

  const size_t steps = sample.target.size();
  cache.dec_inputs.assign(steps, {});
  cache.dec_inputs[0].assign(cfg.mel_bins, static_cast<T>(cfg.first_frame_value));
  for (size_t t = 1; t < steps; ++t) cache.dec_inputs[t] = sample.target[t - 1];
  cache.dec_run = ndl::lstm_forward(model.decoder, cache.dec_inputs, &h0, &c0);

  cache.pred.assign(steps, {});
  ndl::Vec<T> flat_pred, flat_target;
  flat_pred.reserve(steps * cfg.mel_bins);
  flat_target.reserve(steps * cfg.mel_bins);
  for (size_t t = 0; t < steps; ++t) {
    ndl::linear_forward(model.frame_head, cache.dec_run.h_at(t), cache.pred[t]);
    flat_pred.insert(flat_pred.end(), cache.pred[t].begin(), cache.pred[t].end());
    flat_target.insert(flat_target.end(), sample.target[t].begin(), sample.target[t].end());
  }

  LossBreakdown losses;
  losses.mse = static_cast<double>(ndl::mse_loss(flat_pred, flat_target));

  ndl::linear_forward(model.length_head, cache.z_aug, cache.len_out);
  const double len_target = std::log(static_cast<double>(steps));
  const double len_diff = static_cast<double>(cache.len_out[0]) - len_target;
  losses.len_term = len_diff * len_diff;

  if (cfg.variant == Variant::mtl_panphon) {
    if (sample.artic_target.size() != cfg.artic_dim)
      throw ValidationError("forward: mtl variant needs an articulatory target");
    ndl::linear_forward(model.mtl_head, cache.z, cache.mtl_logits);
    losses.bce = static_cast<double>(ndl::bce_loss(cache.mtl_logits, sample.artic_target));
  }

  losses.total = losses.mse + cfg.lambda_mtl * losses.bce + cfg.lambda_len * losses.len_term;
  cache.losses = losses;
  return losses;
}

// Backward for one cached window; gradients scaled by `scale` accumulate.
template <typename T>
void backward(const SpeechLmModel<T>& model, const WindowSample<T>& sample,
              const ForwardCache<T>& cache, SpeechLmGrads<T>& grads, double scale = 1.0) {
  const auto& cfg = model.cfg;
  const size_t steps = sample.target.size();
  const T s = static_cast<T>(scale);

  // MSE through the frame head into per-step decoder state gradients
  const T mse_norm = T(2) / static_cast<T>(steps * cfg.mel_bins);
  std::vector<ndl::Vec<T>> dh_dec(steps);
  ndl::Vec<T> dpred(cfg.mel_bins);
  for (size_t t = 0; t < steps; ++t) {
    for (size_t m = 0; m < cfg.mel_bins; ++m)
      dpred[m] = s * mse_norm * (cache.pred[t][m] - sample.target[t][m]);
    dh_dec[t].assign(cfg.hidden, T(0));
    ndl::linear_backward(model.frame_head, cache.dec_run.h_at(t), dpred, grads.frame_head,
                         &dh_dec[t]);
  }

  // decoder BPTT; teacher inputs are constants, so input grads are dropped
  ndl::Vec<T> dh0, dc0;
  ndl::lstm_backward(model.decoder, cache.dec_run, &dh_dec, nullptr, nullptr, grads.decoder,
                     nullptr, &dh0, &dc0);

  ndl::Vec<T> dz_aug(cfg.z_aug_dim(), T(0));

  // init projection
  ndl::Vec<T> d_init(2 * cfg.hidden);
  std::copy(dh0.begin(), dh0.end(), d_init.begin());
  std::copy(dc0.begin(), dc0.end(), d_init.begin() + static_cast<ptrdiff_t>(cfg.hidden));
  ndl::linear_backward(model.init_proj, cache.z_aug, d_init, grads.init_proj, &dz_aug);

  // length head
  const double len_target = std::log(static_cast<double>(steps));
  ndl::Vec<T> dlen{static_cast<T>(scale * cfg.lambda_len * 2.0 *
                                  (static_cast<double>(cache.len_out[0]) - len_target))};
  ndl::linear_backward(model.length_head, cache.z_aug, dlen, grads.length_head, &dz_aug);

  ndl::Vec<T> dz(dz_aug.begin(), dz_aug.begin() + static_cast<ptrdiff_t>(cfg.z_dim()));
  // auxiliary features are frozen inputs; their slice of dz_aug is dropped

  // MTL head feeds from z
  if (cfg.variant == Variant::mtl_panphon) {
    ndl::Vec<T> dlogits(cfg.artic_dim);
    const T bce_norm = T(1) / static_cast<T>(cfg.artic_dim);
    for (size_t i = 0; i < cfg.artic_dim; ++i)
      dlogits[i] = static_cast<T>(scale * cfg.lambda_mtl) * bce_norm *
                   (ndl::sigmoid(cache.mtl_logits[i]) - sample.artic_target[i]);
    ndl::linear_backward(model.mtl_head, cache.z, dlogits, grads.mtl_head, &dz);
  }

  // shared encoder: every position accumulates into the same gradients
  for (size_t i = 0; i < cfg.n_ctx; ++i) {
    ndl::Vec<T> dv(dz.begin() + static_cast<ptrdiff_t>(i * cfg.hidden),
                   dz.begin() + static_cast<ptrdiff_t>((i + 1) * cfg.hidden));
    ndl::lstm_backward(model.encoder, cache.enc_runs[i], nullptr, &dv, nullptr, grads.encoder);
  }
}

// Free-running generation of one unit. The frame count comes from the length
// head (clamped to [1, max_len_frames]) unless forced_len is nonzero.
template <typename T>
std::vector<ndl::Vec<T>> generate_unit(const SpeechLmModel<T>& model, const ndl::Vec<T>& z_aug,
                                       size_t forced_len = 0, size_t* predicted_len = nullptr) {
  const auto& cfg = model.cfg;
  if (z_aug.size() != cfg.z_aug_dim()) throw ValidationError("generate_unit: z_aug dim mismatch");

  ndl::Vec<T> init_out;
  ndl::linear_forward(model.init_proj, z_aug, init_out);
  ndl::Vec<T> h(init_out.begin(), init_out.begin() + cfg.hidden);
  ndl::Vec<T> c(init_out.begin() + cfg.hidden, init_out.end());

  size_t len = forced_len;
  if (len == 0) {
    ndl::Vec<T> len_out;
    ndl::linear_forward(model.length_head, z_aug, len_out);
    const double predicted = std::exp(static_cast<double>(len_out[0]));
    len = static_cast<size_t>(std::llround(predicted));
    len = std::max<size_t>(1, std::min(len, cfg.max_len_frames));
  }
  if (predicted_len) *predicted_len = len;

  std::vector<ndl::Vec<T>> frames;
  frames.reserve(len);
  ndl::Vec<T> x(cfg.mel_bins, static_cast<T>(cfg.first_frame_value));
  ndl::Vec<T> h_next, c_next, pred;
  for (size_t t = 0; t < len; ++t) {
    ndl::lstm_step(model.decoder, x, h, c, h_next, c_next);
    h = h_next;
    c = c_next;
    ndl::linear_forward(model.frame_head, h, pred);
    frames.push_back(pred);
    x = pred; // exposure to its own predictions at inference
  }
  return frames;
}

} // namespace sublm::speechlm
