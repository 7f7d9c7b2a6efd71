#include "sublm/corpus/units.hpp"

#include <algorithm>
#include <cmath>

#include "sublm/error.hpp"

namespace sublm::corpus {

UnitKind parse_unit_kind(const std::string& name) {
  if (name == "syllable") return UnitKind::syllable;
  if (name == "phoneme") return UnitKind::phoneme;
  throw ValidationError("unknown unit kind '" + name + "' (expected syllable or phoneme)");
}

namespace {

constexpr double kEps = 1e-9;

std::string join_phones(const std::vector<std::string>& phones) {
  std::string out;
  for (const auto& p : phones) out += p;
  return out;
}

// Frames fully contained in [start, end), clamped to the utterance.
std::pair<size_t, size_t> contained_frames(double start, double end, double hop, size_t n_frames) {
  const size_t t_begin = static_cast<size_t>(std::max(0.0, std::ceil(start / hop - kEps)));
  const double last = std::floor(end / hop + kEps); // (t+1) <= end/hop
  if (last < 1.0 || static_cast<double>(t_begin) >= last) return {0, 0};
  size_t t_end = static_cast<size_t>(last);
  t_end = std::min(t_end, n_frames);
  if (t_begin >= t_end) return {0, 0};
  return {t_begin, t_end};
}

struct WordSpan {
  int word_index;
  std::vector<const PhoneEvent*> events;
};

} // namespace

UnitSequence build_units(const UtteranceAlignment& alignment, const dsp::MelSpectrogram& mel,
                         UnitKind kind, const PhoneInventory& inv,
                         const artic::ArticTable& artic_table, const StopWordLexicon& stop_words,
                         DropCounts* drops, const std::string& transcript) {
  DropCounts local;
  UnitSequence seq;
  seq.utt_id = alignment.utt_id;
  seq.transcript = transcript;

  // group non-silence events into words
  std::vector<WordSpan> words;
  for (const auto& ev : alignment.events) {
    if (inv.is_silence(ev.phone)) {
      ++local.silence_events;
      continue;
    }
    if (words.empty() || words.back().word_index != ev.word_index)
      words.push_back({ev.word_index, {}});
    words.back().events.push_back(&ev);
  }

  const double hop = mel.hop_seconds;
  const double max_dur = kind == UnitKind::syllable ? kMaxSyllableSeconds : kMaxPhonemeSeconds;

  auto emit = [&](Unit&& unit) {
    if (unit.duration() > max_dur + kEps) {
      ++local.too_long;
      return;
    }
    auto [fb, fe] = contained_frames(unit.start, unit.end, hop, mel.n_frames);
    if (fb >= fe) {
      ++local.zero_frames;
      return;
    }
    unit.frame_begin = fb;
    unit.frame_end = fe;
    unit.frames = mel.slice_rows(fb, fe);
    seq.units.push_back(std::move(unit));
  };

  for (const auto& word : words) {
    std::vector<std::string> phones;
    phones.reserve(word.events.size());
    for (const auto* ev : word.events) phones.push_back(ev->phone);

    if (stop_words.matches(phones)) {
      ++local.stop_words;
      continue;
    }

    if (kind == UnitKind::phoneme) {
      for (const auto* ev : word.events) {
        Unit u;
        u.kind = UnitKind::phoneme;
        u.label = ev->phone;
        u.phones = {ev->phone};
        if (inv.is_vowel(ev->phone)) u.nucleus = ev->phone;
        u.start = ev->start;
        u.end = ev->end;
        u.artic = artic::phone_vector_binary(ev->phone, artic_table);
        emit(std::move(u));
      }
      continue;
    }

    std::vector<SyllableParts> sylls;
    try {
      sylls = syllabify(phones, inv);
    } catch (const NoNucleusError&) {
      ++local.no_nucleus;
      continue;
    }

    size_t ev_pos = 0;
    for (const auto& parts : sylls) {
      const size_t n = parts.onset.size() + 1 + parts.coda.size();
      Unit u;
      u.kind = UnitKind::syllable;
      u.onset = parts.onset;
      u.nucleus = parts.nucleus;
      u.coda = parts.coda;
      u.phones = parts.phones();
      u.label = join_phones(u.phones);
      u.start = word.events[ev_pos]->start;
      u.end = word.events[ev_pos + n - 1]->end;
      u.artic = artic::syllable_vector(parts.onset, parts.nucleus, parts.coda, artic_table);
      ev_pos += n;
      emit(std::move(u));
    }
  }

  if (drops) *drops += local;
  return seq;
}

std::vector<ContextWindow> context_windows(const UnitSequence& seq, size_t n_ctx) {
  std::vector<ContextWindow> out;
  if (seq.units.size() <= n_ctx) return out;
  for (size_t target = n_ctx; target < seq.units.size(); ++target) out.push_back({target});
  return out;
}

} // namespace sublm::corpus
