#pragma once

#include <optional>
#include <string>
#include <vector>

#include "sublm/corpus/units.hpp"
#include "sublm/speechlm/model.hpp"
#include "sublm/textlm/lm.hpp"
#include "sublm/textlm/vocab.hpp"

namespace sublm::speechlm {

struct WindowMeta {
  std::string utt_id;
  size_t target_index = 0;        // unit index within the utterance
  std::string target_label;
  int target_vowel_id = -1;       // 16-way vowel id of the target nucleus
  std::vector<std::string> context_labels;
};

struct WindowData {
  std::vector<WindowSample<float>> samples;
  std::vector<WindowMeta> meta;
};

// Materializes (context, target) windows from preprocessed utterances.
// aux_textlm windows get the frozen text LM's embedding of the four context
// labels; top_line windows get the target unit's articulatory vector.
WindowData build_windows(const std::vector<corpus::UnitSequence>& seqs,
                         const SpeechLmConfig& cfg,
                         const textlm::TextLm<float>* text_model = nullptr,
                         const textlm::SubwordVocab* vocab = nullptr);

// Float frames of one unit, as the model consumes them.
std::vector<ndl::Vec<float>> unit_frames(const corpus::Unit& unit);

} // namespace sublm::speechlm
