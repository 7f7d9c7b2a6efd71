#include "sublm/corpus/synth.hpp"

#include <cmath>
#include <iomanip>
#include <set>
#include <sstream>

#include "sublm/corpus/syllabify.hpp"
#include "sublm/error.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/parallel.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::corpus {

namespace {

const std::map<std::string, std::array<double, 3>>& formant_table() {
  static const std::map<std::string, std::array<double, 3>> table = {
      {"iy", {270, 2290, 3010}}, {"ih", {390, 1990, 2550}}, {"ey", {480, 2050, 2600}},
      {"eh", {530, 1840, 2480}}, {"ae", {660, 1720, 2410}}, {"aa", {730, 1090, 2440}},
      {"ah", {640, 1190, 2390}}, {"ax", {500, 1500, 2500}}, {"ao", {570, 840, 2410}},
      {"ow", {500, 900, 2400}},  {"oy", {560, 920, 2480}},  {"uh", {440, 1020, 2240}},
      {"uw", {300, 870, 2240}},  {"aw", {680, 1500, 2450}}, {"ay", {700, 1220, 2520}},
      {"er", {490, 1350, 1690}}};
  return table;
}

const std::map<std::string, std::array<double, 2>>& sonorant_table() {
  static const std::map<std::string, std::array<double, 2>> table = {
      {"m", {250, 1200}}, {"n", {300, 1450}}, {"ng", {280, 2300}}, {"l", {360, 1300}},
      {"r", {310, 1060}}, {"w", {300, 700}},  {"y", {280, 2200}}};
  return table;
}

bool is_stop(const std::string& p) {
  static const std::set<std::string> stops = {"p", "b", "t", "d", "k", "g"};
  return stops.count(p) > 0;
}

bool is_affricate(const std::string& p) { return p == "ch" || p == "jh"; }

bool is_voiced_consonant(const std::string& p) {
  static const std::set<std::string> voiced = {"b", "d", "g", "jh", "v", "dh", "z", "zh"};
  return voiced.count(p) > 0;
}

void add_ramped(std::vector<double>& out, size_t offset, const std::vector<double>& seg,
                int sample_rate) {
  const size_t ramp = std::min<size_t>(seg.size() / 4, static_cast<size_t>(0.006 * sample_rate));
  for (size_t i = 0; i < seg.size(); ++i) {
    double env = 1.0;
    if (i < ramp) env = 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(i) / ramp));
    const size_t from_end = seg.size() - 1 - i;
    if (from_end < ramp) env *= 0.5 * (1.0 - std::cos(M_PI * static_cast<double>(from_end) / ramp));
    out[offset + i] += seg[i] * env;
  }
}

std::vector<double> tone_sum(size_t n, int sr, const std::vector<std::pair<double, double>>& fa) {
  std::vector<double> seg(n, 0.0);
  for (auto [freq, amp] : fa)
    for (size_t i = 0; i < n; ++i)
      seg[i] += amp * std::sin(2.0 * M_PI * freq * static_cast<double>(i) / sr);
  return seg;
}

std::vector<double> noise(size_t n, util::Rng& rng, double amp) {
  std::vector<double> seg(n);
  for (auto& s : seg) s = amp * rng.uniform(-1.0, 1.0);
  return seg;
}

// crude spectral shaping: first difference boosts highs, moving average cuts them
void highpass(std::vector<double>& seg) {
  for (size_t i = seg.size(); i-- > 1;) seg[i] = seg[i] - seg[i - 1];
}

void lowpass(std::vector<double>& seg) {
  double prev = 0.0;
  for (double& s : seg) {
    const double cur = s;
    s = 0.5 * (cur + prev);
    prev = cur;
  }
}

std::vector<double> render_phone(const std::string& phone, size_t n, int sr, util::Rng& rng) {
  const auto& formants = formant_table();
  if (auto it = formants.find(phone); it != formants.end()) {
    return tone_sum(n, sr, {{it->second[0], 1.0}, {it->second[1], 0.5}, {it->second[2], 0.3}});
  }
  const auto& sonorants = sonorant_table();
  if (auto it = sonorants.find(phone); it != sonorants.end()) {
    return tone_sum(n, sr, {{it->second[0], 0.55}, {it->second[1], 0.18}});
  }
  if (is_stop(phone) || is_affricate(phone)) {
    const size_t closure = is_affricate(phone) ? n * 35 / 100 : n * 55 / 100;
    std::vector<double> seg(n, 0.0);
    std::vector<double> burst = noise(n - closure, rng, 0.5);
    if (phone == "t" || phone == "d" || is_affricate(phone)) highpass(burst);
    if (phone == "p" || phone == "b") lowpass(burst);
    // exponential decay after the release
    for (size_t i = 0; i < burst.size(); ++i)
      seg[closure + i] = burst[i] * std::exp(-3.0 * static_cast<double>(i) / burst.size());
    if (is_voiced_consonant(phone)) {
      for (size_t i = 0; i < n; ++i)
        seg[i] += 0.10 * std::sin(2.0 * M_PI * 120.0 * static_cast<double>(i) / sr);
    }
    return seg;
  }
  // fricatives and hh
  double amp = 0.30;
  std::vector<double> seg = noise(n, rng, amp);
  if (phone == "s" || phone == "z") {
    highpass(seg);
  } else if (phone == "sh" || phone == "zh" || phone == "ch") {
    highpass(seg);
    lowpass(seg);
  } else {
    lowpass(seg);
    for (double& s : seg) s *= 0.6;
  }
  if (is_voiced_consonant(phone)) {
    for (size_t i = 0; i < n; ++i)
      seg[i] += 0.12 * std::sin(2.0 * M_PI * 140.0 * static_cast<double>(i) / sr);
  }
  return seg;
}

struct TimedPhone {
  std::string phone;
  double duration;
};

} // namespace

const std::map<std::string, std::vector<std::string>>& synth_lexicon() {
  static const std::map<std::string, std::vector<std::string>> lex = {
      {"the", {"dh", "ax"}},
      {"printing", {"p", "r", "ih", "n", "t", "ih", "n", "g"}},
      {"tana", {"t", "aa", "n", "ax"}},
      {"seeno", {"s", "iy", "n", "ow"}},
      {"raki", {"r", "aa", "k", "iy"}},
      {"stone", {"s", "t", "ow", "n"}},
      {"milu", {"m", "ih", "l", "uw"}},
      {"pesta", {"p", "eh", "s", "t", "ax"}},
      {"gruv", {"g", "r", "uw", "v"}},
      {"fawda", {"f", "aw", "d", "ax"}},
      {"koyla", {"k", "oy", "l", "ax"}},
      {"chesu", {"ch", "eh", "s", "uw"}},
      {"banit", {"b", "ae", "n", "ih", "t"}},
      {"dorm", {"d", "ao", "r", "m"}},
      {"lum", {"l", "ah", "m"}},
      {"wessa", {"w", "eh", "s", "ax"}},
      {"yuki", {"y", "uw", "k", "iy"}},
      {"thorn", {"th", "ao", "r", "n"}},
      {"vana", {"v", "ae", "n", "ax"}},
      {"zila", {"z", "iy", "l", "ax"}},
      {"hako", {"hh", "aa", "k", "ow"}},
      {"jamu", {"jh", "ae", "m", "uw"}},
      {"shilo", {"sh", "ih", "l", "ow"}},
      {"ringo", {"r", "ih", "ng", "g", "ow"}},
      {"berta", {"b", "er", "t", "ax"}},
      {"mayto", {"m", "ey", "t", "ow"}},
      {"booka", {"b", "uh", "k", "ax"}},
      {"cowda", {"k", "aw", "d", "ax"}},
      {"kyla", {"k", "ay", "l", "ax"}},
      {"zhena", {"zh", "eh", "n", "ax"}},
  };
  return lex;
}

const std::array<double, 3>& vowel_formants(const std::string& vowel) {
  auto it = formant_table().find(vowel);
  if (it == formant_table().end())
    throw ValidationError("no formant entry for vowel '" + vowel + "'");
  return it->second;
}

SynthUtterance synth_utterance(const SynthSpec& spec, size_t utt_index) {
  util::Rng rng = util::Rng::derive(spec.seed, utt_index);
  const auto& lex = synth_lexicon();
  const PhoneInventory& inv = PhoneInventory::english();

  std::vector<std::string> word_keys;
  for (const auto& [word, phones] : lex)
    if (word != "the") word_keys.push_back(word);

  auto syllable_count = [&](const std::vector<std::string>& phones) {
    size_t n = 0;
    for (const auto& p : phones) n += inv.is_vowel(p) ? 1 : 0;
    return n;
  };

  // pick words until the syllable budget is reached
  const size_t budget =
      spec.min_syllables + rng.uniform_int(spec.max_syllables - spec.min_syllables + 1);
  std::vector<std::string> words;
  size_t sylls = 0;
  while (sylls < budget) {
    if (!words.empty() && rng.next_double() < 0.25 && sylls + 1 < budget) {
      words.push_back("the");
      sylls += 1;
      continue;
    }
    const std::string& w = word_keys[rng.uniform_int(word_keys.size())];
    const size_t n = syllable_count(lex.at(w));
    if (sylls + n > budget && !words.empty()) break;
    words.push_back(w);
    sylls += n;
  }

  // durations per phone; syllables are rescaled to stay under 240 ms
  std::vector<std::vector<TimedPhone>> timed_words;
  for (const auto& word : words) {
    const auto& phones = lex.at(word);
    std::vector<TimedPhone> timed;
    for (const auto& p : phones) {
      const double dur =
          inv.is_vowel(p) ? rng.uniform(0.090, 0.145) : rng.uniform(0.035, 0.065);
      timed.push_back({p, dur});
    }
    // enforce the per-syllable ceiling by scaling each syllable's span
    const auto parts = syllabify(phones, inv);
    size_t pos = 0;
    for (const auto& syl : parts) {
      const size_t n = syl.onset.size() + 1 + syl.coda.size();
      double total = 0.0;
      for (size_t i = 0; i < n; ++i) total += timed[pos + i].duration;
      if (total > 0.240) {
        const double scale = 0.240 / total;
        for (size_t i = 0; i < n; ++i) timed[pos + i].duration *= scale;
      }
      pos += n;
    }
    timed_words.push_back(std::move(timed));
  }

  SynthUtterance out;
  std::ostringstream id;
  id << "utt" << std::setw(4) << std::setfill('0') << utt_index;
  out.utt_id = id.str();
  out.alignment.utt_id = out.utt_id;
  out.audio.sample_rate = spec.sample_rate;

  std::ostringstream transcript;
  for (size_t i = 0; i < words.size(); ++i) transcript << (i ? " " : "") << words[i];
  out.transcript = transcript.str();

  // lay out events: leading/trailing silence, occasional inter-word pauses
  double t = rng.uniform(0.050, 0.150);
  std::vector<std::pair<std::string, std::pair<double, double>>> segments; // phone, [start,end)
  out.alignment.events.push_back({out.utt_id, "sil", 0.0, t, -1});
  for (size_t w = 0; w < timed_words.size(); ++w) {
    for (const auto& tp : timed_words[w]) {
      out.alignment.events.push_back(
          {out.utt_id, tp.phone, t, t + tp.duration, static_cast<int>(w)});
      segments.push_back({tp.phone, {t, t + tp.duration}});
      t += tp.duration;
    }
    if (w + 1 < timed_words.size() && rng.next_double() < 0.3) {
      const double pause = rng.uniform(0.030, 0.080);
      out.alignment.events.push_back({out.utt_id, "sil", t, t + pause, -1});
      t += pause;
    }
  }
  const double tail = rng.uniform(0.050, 0.150);
  out.alignment.events.push_back({out.utt_id, "sil", t, t + tail, -1});
  t += tail;

  const size_t n_samples = static_cast<size_t>(std::ceil(t * spec.sample_rate));
  out.audio.samples.assign(n_samples, 0.0);
  for (const auto& [phone, span] : segments) {
    const size_t begin = static_cast<size_t>(span.first * spec.sample_rate);
    const size_t end = std::min(n_samples, static_cast<size_t>(span.second * spec.sample_rate));
    if (end <= begin) continue;
    auto seg = render_phone(phone, end - begin, spec.sample_rate, rng);
    add_ramped(out.audio.samples, begin, seg, spec.sample_rate);
  }
  for (double& s : out.audio.samples) s *= 0.28;
  return out;
}

SynthManifest synth_corpus(const SynthSpec& spec, const std::filesystem::path& out_dir) {
  namespace fs = std::filesystem;
  fs::create_directories(out_dir / "wavs");

  std::vector<SynthUtterance> utts(spec.n_utts);
  util::parallel_for(spec.n_utts, spec.jobs,
                     [&](size_t i) { utts[i] = synth_utterance(spec, i); });

  std::ostringstream manifest;
  std::vector<UtteranceAlignment> alignments;
  for (auto& utt : utts) {
    const fs::path wav_rel = fs::path("wavs") / (utt.utt_id + ".wav");
    dsp::save_wav(out_dir / wav_rel, utt.audio);
    manifest << utt.utt_id << '\t' << wav_rel.string() << '\t' << utt.transcript << '\n';
    alignments.push_back(std::move(utt.alignment));
  }

  SynthManifest result;
  result.manifest_path = out_dir / "manifest.tsv";
  result.alignment_path = out_dir / "alignments.tsv";
  result.n_utts = spec.n_utts;
  util::write_text_file(result.manifest_path, manifest.str());
  write_alignment(result.alignment_path, alignments);
  return result;
}

std::vector<ManifestRow> read_manifest(const std::filesystem::path& manifest_path) {
  std::vector<ManifestRow> rows;
  const auto base = manifest_path.parent_path();
  size_t line_no = 0;
  for (const auto& line : util::read_lines(manifest_path)) {
    ++line_no;
    if (line.empty()) continue;
    const auto fields = util::split(line, '\t');
    if (fields.size() != 3)
      throw ValidationError(manifest_path.string() + " line " + std::to_string(line_no) +
                            ": expected utt_id<TAB>wav_path<TAB>transcript");
    ManifestRow row;
    row.utt_id = fields[0];
    const std::filesystem::path wav(fields[1]);
    row.wav_path = wav.is_absolute() ? wav : base / wav;
    row.transcript = fields[2];
    rows.push_back(std::move(row));
  }
  return rows;
}

} // namespace sublm::corpus
