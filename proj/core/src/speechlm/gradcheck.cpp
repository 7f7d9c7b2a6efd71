#include "sublm/speechlm/gradcheck.hpp"

#include "sublm/util/rng.hpp"

namespace sublm::speechlm {

ndl::GradCheckResult gradcheck_variant(Variant variant, uint64_t seed, size_t max_coords) {
  SpeechLmConfig cfg;
  cfg.mel_bins = 8;
  cfg.hidden = 8;
  cfg.n_ctx = 2;
  cfg.artic_dim = 10;
  cfg.text_dim = 7;
  cfg.variant = variant;
  cfg.max_len_frames = 5;

  SpeechLmModel<double> model(cfg);
  model.init(seed);

  util::Rng rng(seed ^ 0xbabb1eull);
  WindowSample<double> sample;
  sample.context.resize(cfg.n_ctx);
  for (auto& unit : sample.context) {
    unit.resize(2 + rng.uniform_int(2), ndl::Vec<double>(cfg.mel_bins));
    for (auto& frame : unit)
      for (auto& v : frame) v = rng.uniform(-2.0, 1.0);
  }
  sample.target.assign(3, ndl::Vec<double>(cfg.mel_bins));
  for (auto& frame : sample.target)
    for (auto& v : frame) v = rng.uniform(-2.0, 1.0);
  if (cfg.aux_dim() > 0) {
    sample.aux.resize(cfg.aux_dim());
    for (auto& v : sample.aux)
      v = variant == Variant::top_line ? (rng.next_double() < 0.5 ? 0.0 : 1.0)
                                       : rng.uniform(-1.0, 1.0);
  }
  if (variant == Variant::mtl_panphon) {
    sample.artic_target.resize(cfg.artic_dim);
    for (auto& v : sample.artic_target) v = rng.next_double() < 0.5 ? 0.0 : 1.0;
  }

  SpeechLmGrads<double> grads(model);
  grads.zero();
  ForwardCache<double> cache;
  forward(model, sample, cache);
  backward(model, sample, cache, grads, 1.0);

  auto params = model.named_params(&grads);
  auto loss = [&]() {
    ForwardCache<double> c;
    return forward(model, sample, c).total;
  };
  return ndl::grad_check(loss, params, 1e-5, max_coords, seed);
}

} // namespace sublm::speechlm
