#pragma once

#include <string>
#include <vector>

#include "sublm/artic/features.hpp"
#include "sublm/corpus/alignment.hpp"
#include "sublm/corpus/syllabify.hpp"
#include "sublm/dsp/mel.hpp"

namespace sublm::corpus {

enum class UnitKind { phoneme, syllable };

inline const char* unit_kind_name(UnitKind k) {
  return k == UnitKind::syllable ? "syllable" : "phoneme";
}
UnitKind parse_unit_kind(const std::string& name);

// Duration ceilings: anything longer is removed during preprocessing.
inline constexpr double kMaxSyllableSeconds = 0.250;
inline constexpr double kMaxPhonemeSeconds = 0.150;

struct Unit {
  UnitKind kind = UnitKind::syllable;
  std::string label;                 // phones joined, e.g. "dhax"
  std::vector<std::string> phones;   // onset + nucleus + coda in order
  std::vector<std::string> onset;
  std::string nucleus;               // vowel; empty for consonant phoneme units
  std::vector<std::string> coda;
  double start = 0.0, end = 0.0;     // seconds
  size_t frame_begin = 0, frame_end = 0; // rows in the utterance melspectrogram
  dsp::MelSpectrogram frames;        // sliced rows [frame_begin, frame_end)
  artic::BinaryVector artic;         // 66-dim (syllable) or 22-dim (phoneme)

  double duration() const { return end - start; }
  size_t n_frames() const { return frame_end - frame_begin; }
};

struct UnitSequence {
  std::string utt_id;
  std::string transcript;
  std::vector<Unit> units; // time-ordered, silences removed
};

struct DropCounts {
  size_t silence_events = 0;
  size_t stop_words = 0;
  size_t too_long = 0;
  size_t no_nucleus = 0;
  size_t zero_frames = 0;

  DropCounts& operator+=(const DropCounts& o) {
    silence_events += o.silence_events;
    stop_words += o.stop_words;
    too_long += o.too_long;
    no_nucleus += o.no_nucleus;
    zero_frames += o.zero_frames;
    return *this;
  }
};

// Slices an utterance's melspectrogram into filtered units. A mel frame
// belongs to a unit when its interval [t*hop, (t+1)*hop) lies inside the
// unit's [start, end); partial overlap at unit edges is not counted.
UnitSequence build_units(const UtteranceAlignment& alignment, const dsp::MelSpectrogram& mel,
                         UnitKind kind, const PhoneInventory& inv, const artic::ArticTable& artic_table,
                         const StopWordLexicon& stop_words, DropCounts* drops = nullptr,
                         const std::string& transcript = "");

// Sliding (context, target) windows that never cross utterance boundaries.
struct ContextWindow {
  size_t target = 0; // index into seq.units; context is the n_ctx units before
};

std::vector<ContextWindow> context_windows(const UnitSequence& seq, size_t n_ctx = 4);

} // namespace sublm::corpus
