#pragma once

#include <string>
#include <vector>

#include "sublm/corpus/units.hpp"
#include "sublm/dsp/griffin_lim.hpp"
#include "sublm/speechlm/model.hpp"
#include "sublm/textlm/lm.hpp"
#include "sublm/textlm/vocab.hpp"

namespace sublm::speechlm {

struct BabbleOptions {
  size_t n_units = 20;
  uint64_t seed = 1;
  size_t max_index_units = 2000; // latent index size for label lookup
};

struct BabbleResult {
  dsp::MelSpectrogram mel;
  dsp::AudioBuffer audio;
  std::string seed_utt_id;
  std::vector<size_t> seed_unit_indices;
  std::vector<std::string> seed_labels;
  std::vector<std::string> generated_labels; // nearest-neighbor labels (aux_textlm)
  std::vector<size_t> unit_frame_counts;
};

// Autoregressive unit-level generation: generate the next unit from the
// sliding 4-unit context, append it, drop the oldest. The seed context comes
// from the corpus, picked by the seed. aux_textlm feeds the text LM the
// context labels, labelling generated units by latent-cosine nearest
// neighbor; top_line draws a next-unit articulatory vector from the corpus
// unigram distribution.
BabbleResult babble(const SpeechLmModel<float>& model,
                    const std::vector<corpus::UnitSequence>& seqs, const dsp::DspConfig& dsp_cfg,
                    const BabbleOptions& opts, const textlm::TextLm<float>* text_model = nullptr,
                    const textlm::SubwordVocab* vocab = nullptr);

} // namespace sublm::speechlm
