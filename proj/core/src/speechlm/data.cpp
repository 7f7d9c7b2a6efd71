#include "sublm/speechlm/data.hpp"

#include "sublm/error.hpp"

namespace sublm::speechlm {

std::vector<ndl::Vec<float>> unit_frames(const corpus::Unit& unit) {
  std::vector<ndl::Vec<float>> frames(unit.frames.n_frames);
  for (size_t t = 0; t < unit.frames.n_frames; ++t) {
    frames[t].resize(unit.frames.n_mels);
    for (size_t m = 0; m < unit.frames.n_mels; ++m)
      frames[t][m] = static_cast<float>(unit.frames.at(t, m));
  }
  return frames;
}

WindowData build_windows(const std::vector<corpus::UnitSequence>& seqs,
                         const SpeechLmConfig& cfg, const textlm::TextLm<float>* text_model,
                         const textlm::SubwordVocab* vocab) {
  if (cfg.variant == Variant::aux_textlm && (!text_model || !vocab))
    throw ValidationError("build_windows: aux_textlm needs a frozen text LM and its vocab");
  if (cfg.variant == Variant::aux_textlm && text_model->cfg.embed_dim != cfg.text_dim)
    throw ValidationError("build_windows: text LM embedding dim " +
                          std::to_string(text_model->cfg.embed_dim) +
                          " does not match config text_dim " + std::to_string(cfg.text_dim));

  const auto& inv = corpus::PhoneInventory::english();
  WindowData data;
  for (const auto& seq : seqs) {
    for (const auto& window : corpus::context_windows(seq, cfg.n_ctx)) {
      const corpus::Unit& target = seq.units[window.target];
      if (target.n_frames() == 0) continue;

      WindowSample<float> sample;
      WindowMeta meta;
      meta.utt_id = seq.utt_id;
      meta.target_index = window.target;
      meta.target_label = target.label;
      if (!target.nucleus.empty())
        meta.target_vowel_id = static_cast<int>(inv.vowel_id(target.nucleus));

      sample.context.resize(cfg.n_ctx);
      for (size_t i = 0; i < cfg.n_ctx; ++i) {
        const corpus::Unit& u = seq.units[window.target - cfg.n_ctx + i];
        sample.context[i] = unit_frames(u);
        meta.context_labels.push_back(u.label);
      }
      sample.target = unit_frames(target);

      if (cfg.variant == Variant::mtl_panphon) {
        if (target.artic.size() != cfg.artic_dim)
          throw ValidationError("build_windows: unit artic dim " +
                                std::to_string(target.artic.size()) +
                                " does not match config artic_dim " +
                                std::to_string(cfg.artic_dim));
        sample.artic_target = target.artic;
      } else if (cfg.variant == Variant::top_line) {
        if (target.artic.size() != cfg.artic_dim)
          throw ValidationError("build_windows: unit artic dim mismatch for top_line");
        sample.aux = target.artic;
      } else if (cfg.variant == Variant::aux_textlm) {
        const auto ids = vocab->encode(meta.context_labels);
        sample.aux = textlm::context_embedding(*text_model, ids);
      }

      data.samples.push_back(std::move(sample));
      data.meta.push_back(std::move(meta));
    }
  }
  return data;
}

} // namespace sublm::speechlm
