#pragma once

#include <array>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "sublm/corpus/alignment.hpp"
#include "sublm/dsp/audio.hpp"

namespace sublm::corpus {

// Deterministic formant-synthesized corpus: vowels are three-formant sinusoid
// sums, consonants shaped noise bursts or stops. Alignments are exact by
// construction. A stand-in for real single-speaker data at desk scale.
struct SynthSpec {
  uint64_t seed = 1;
  size_t n_utts = 40;
  size_t min_syllables = 2;
  size_t max_syllables = 6;
  int sample_rate = 22050;
  size_t jobs = 1;
};

struct SynthUtterance {
  std::string utt_id;
  dsp::AudioBuffer audio;
  UtteranceAlignment alignment;
  std::string transcript;
};

// Fixed word list (word -> phones); covers all 16 vowels as nuclei and the
// onset clusters the syllabifier has to split.
const std::map<std::string, std::vector<std::string>>& synth_lexicon();

// Per-vowel formant triple (F1, F2, F3) in Hz.
const std::array<double, 3>& vowel_formants(const std::string& vowel);

SynthUtterance synth_utterance(const SynthSpec& spec, size_t utt_index);

struct SynthManifest {
  std::filesystem::path manifest_path;  // utt_id \t wav_path \t transcript
  std::filesystem::path alignment_path; // TSV
  size_t n_utts = 0;
};

// Writes wavs/, alignments.tsv and manifest.tsv under out_dir.
SynthManifest synth_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir);

// Manifest rows as written by synth_corpus (and accepted by preprocessing).
struct ManifestRow {
  std::string utt_id;
  std::filesystem::path wav_path; // resolved against the manifest's directory
  std::string transcript;
};
std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path);

} // namespace sublm::corpus
