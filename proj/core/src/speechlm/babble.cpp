#include "sublm/speechlm/babble.hpp"

#include <cmath>
#include <deque>

#include "sublm/speechlm/data.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::speechlm {

namespace {

struct ContextEntry {
  std::vector<ndl::Vec<float>> frames;
  std::string label;
};

struct LatentIndex {
  std::vector<ndl::Vec<float>> latents;
  std::vector<std::string> labels;
  std::vector<double> norms;

  std::string nearest(const ndl::Vec<float>& v) const {
    double norm_v = 0.0;
    for (float x : v) norm_v += static_cast<double>(x) * x;
    norm_v = std::sqrt(std::max(norm_v, 1e-30));
    double best = -2.0;
    size_t best_i = 0;
    for (size_t i = 0; i < latents.size(); ++i) {
      double dot = 0.0;
      for (size_t d = 0; d < v.size(); ++d)
        dot += static_cast<double>(latents[i][d]) * v[d];
      const double cosine = dot / (norms[i] * norm_v);
      if (cosine > best) {
        best = cosine;
        best_i = i;
      }
    }
    return labels.empty() ? std::string() : labels[best_i];
  }
};

} // namespace

BabbleResult babble(const SpeechLmModel<float>& model,
                    const std::vector<corpus::UnitSequence>& seqs, const dsp::DspConfig& dsp_cfg,
                    const BabbleOptions& opts, const textlm::TextLm<float>* text_model,
                    const textlm::SubwordVocab* vocab) {
  const auto& cfg = model.cfg;
  if (cfg.variant == Variant::aux_textlm && (!text_model || !vocab))
    throw ValidationError("babble: aux_textlm needs a frozen text LM and its vocab");

  BabbleResult result;
  result.mel.n_mels = cfg.mel_bins;
  result.mel.hop_seconds = dsp_cfg.hop_seconds();
  result.mel.config_id = dsp_cfg.id();
  result.audio.sample_rate = dsp_cfg.sample_rate;
  if (opts.n_units == 0) return result;

  util::Rng rng(opts.seed);

  // seed context: a contiguous run of n_ctx units from the corpus
  std::vector<size_t> eligible;
  for (size_t i = 0; i < seqs.size(); ++i)
    if (seqs[i].units.size() >= cfg.n_ctx) eligible.push_back(i);
  if (eligible.empty())
    throw ValidationError("babble: no utterance has " + std::to_string(cfg.n_ctx) + " units");
  const auto& seed_seq = seqs[eligible[rng.uniform_int(eligible.size())]];
  const size_t start = rng.uniform_int(seed_seq.units.size() - cfg.n_ctx + 1);
  result.seed_utt_id = seed_seq.utt_id;

  std::deque<ContextEntry> context;
  for (size_t i = 0; i < cfg.n_ctx; ++i) {
    const corpus::Unit& u = seed_seq.units[start + i];
    context.push_back({unit_frames(u), u.label});
    result.seed_unit_indices.push_back(start + i);
    result.seed_labels.push_back(u.label);
  }

  // latent index for nearest-neighbor labels of generated units
  LatentIndex index;
  if (cfg.variant == Variant::aux_textlm) {
    size_t total_units = 0;
    for (const auto& s : seqs) total_units += s.units.size();
    const size_t stride = std::max<size_t>(1, total_units / std::max<size_t>(1, opts.max_index_units));
    size_t counter = 0;
    for (const auto& s : seqs)
      for (const auto& u : s.units) {
        if (counter++ % stride != 0) continue;
        if (u.n_frames() == 0) continue;
        auto v = encode_unit(model, unit_frames(u));
        double n = 0.0;
        for (float x : v) n += static_cast<double>(x) * x;
        index.norms.push_back(std::sqrt(std::max(n, 1e-30)));
        index.latents.push_back(std::move(v));
        index.labels.push_back(u.label);
      }
  }

  // unigram pool for the top_line's next-unit articulatory vector
  std::vector<const corpus::Unit*> unigram_pool;
  if (cfg.variant == Variant::top_line) {
    for (const auto& s : seqs)
      for (const auto& u : s.units) unigram_pool.push_back(&u);
    if (unigram_pool.empty()) throw ValidationError("babble: empty corpus for top_line sampling");
  }

  std::vector<ndl::Vec<float>> all_frames;
  for (size_t n = 0; n < opts.n_units; ++n) {
    std::vector<std::vector<ndl::Vec<float>>> ctx_frames;
    std::vector<std::string> ctx_labels;
    for (const auto& entry : context) {
      ctx_frames.push_back(entry.frames);
      ctx_labels.push_back(entry.label);
    }

    ndl::Vec<float> aux;
    if (cfg.variant == Variant::aux_textlm) {
      aux = textlm::context_embedding(*text_model, vocab->encode(ctx_labels));
    } else if (cfg.variant == Variant::top_line) {
      aux = unigram_pool[rng.uniform_int(unigram_pool.size())]->artic;
    }

    ndl::Vec<float> z, z_aug;
    build_context(model, ctx_frames, aux, z, z_aug);
    auto frames = generate_unit(model, z_aug);

    std::string label;
    if (cfg.variant == Variant::aux_textlm)
      label = index.nearest(encode_unit(model, frames));
    result.generated_labels.push_back(label);
    result.unit_frame_counts.push_back(frames.size());

    for (const auto& f : frames) all_frames.push_back(f);
    context.pop_front();
    context.push_back({std::move(frames), label});
  }

  result.mel.n_frames = all_frames.size();
  result.mel.values.resize(all_frames.size() * cfg.mel_bins);
  for (size_t t = 0; t < all_frames.size(); ++t)
    for (size_t m = 0; m < cfg.mel_bins; ++m)
      result.mel.at(t, m) = static_cast<double>(all_frames[t][m]);

  if (result.mel.n_frames > 0) result.audio = dsp::griffin_lim(result.mel, dsp_cfg);
  return result;
}

} // namespace sublm::speechlm
