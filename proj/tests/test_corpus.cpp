#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include <doctest.h>

#include <filesystem>
#include <set>

#include "sublm/corpus/alignment.hpp"
#include "sublm/corpus/stats.hpp"
#include "sublm/corpus/synth.hpp"
#include "sublm/corpus/syllabify.hpp"
#include "sublm/corpus/units.hpp"
#include "sublm/dsp/mel.hpp"
#include "sublm/error.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/rng.hpp"

using namespace sublm;
using namespace sublm::corpus;

namespace {

struct TempDir {
  std::filesystem::path path;
  explicit TempDir(const std::string& name)
      : path(std::filesystem::temp_directory_path() / name) {
    std::filesystem::remove_all(path);
    std::filesystem::create_directories(path);
  }
  ~TempDir() { std::filesystem::remove_all(path); }
};

std::vector<std::string> phones(std::initializer_list<const char*> list) {
  return {list.begin(), list.end()};
}

dsp::MelSpectrogram flat_mel(size_t frames, double hop_seconds) {
  dsp::MelSpectrogram mel;
  mel.n_frames = frames;
  mel.n_mels = 8;
  mel.hop_seconds = hop_seconds;
  mel.values.assign(frames * 8, -1.0);
  return mel;
}

} // namespace

TEST_CASE("inventory: 16 vowels, 24 consonants, disjoint") {
  const auto& inv = PhoneInventory::english();
  CHECK(inv.vowels().size() == 16);
  CHECK(inv.consonants().size() == 24);
  for (const auto& v : inv.vowels()) CHECK_FALSE(inv.is_consonant(v));
  CHECK(inv.is_silence("sil"));
  CHECK_FALSE(inv.contains("sil"));
  CHECK(inv.vowel_id("aa") == 0);
  CHECK(inv.vowel_id("ax") == 15);
  CHECK_THROWS_AS(inv.vowel_id("t"), ValidationError);
}

TEST_CASE("parse_alignment reads rows and groups by utterance") {
  TempDir dir("sublm_align_test");
  const auto path = dir.path / "a.tsv";
  util::write_text_file(path,
                        "u1\tdh\t0.10\t0.15\t0\n"
                        "u1\tax\t0.15\t0.22\t0\n"
                        "u2\tsil\t0.00\t0.30\t-1\n");
  auto utts = parse_alignment(path);
  REQUIRE(utts.size() == 2);
  CHECK(utts[0].utt_id == "u1");
  CHECK(utts[0].events.size() == 2);
  CHECK(utts[0].events[0].phone == "dh");
  CHECK(utts[0].events[0].start == 0.10);
  CHECK(utts[0].events[0].end == 0.15);
  CHECK(utts[0].events[0].word_index == 0);

  SUBCASE("overlap is rejected") {
    util::write_text_file(path, "u1\tdh\t0.10\t0.20\t0\nu1\tax\t0.15\t0.25\t0\n");
    CHECK_THROWS_AS(parse_alignment(path), ValidationError);
  }
  SUBCASE("unknown phone is rejected with the line number") {
    util::write_text_file(path, "u1\tzz\t0.10\t0.20\t0\n");
    try {
      parse_alignment(path);
      FAIL("expected inventory error");
    } catch (const ValidationError& e) {
      CHECK(std::string(e.what()).find("zz") != std::string::npos);
      CHECK(std::string(e.what()).find("line 1") != std::string::npos);
    }
  }
}

TEST_CASE("syllabify reproduces the printing fixture") {
  auto sylls = syllabify(phones({"p", "r", "ih", "n", "t", "ih", "n", "g"}));
  REQUIRE(sylls.size() == 2);
  CHECK(sylls[0].onset == phones({"p", "r"}));
  CHECK(sylls[0].nucleus == "ih");
  CHECK(sylls[0].coda == phones({"n"}));
  CHECK(sylls[1].onset == phones({"t"}));
  CHECK(sylls[1].nucleus == "ih");
  CHECK(sylls[1].coda == phones({"n", "g"}));
}

TEST_CASE("syllabify handles bare vowels and rejects vowel-less words") {
  auto bare = syllabify(phones({"ax"}));
  REQUIRE(bare.size() == 1);
  CHECK(bare[0].onset.empty());
  CHECK(bare[0].nucleus == "ax");
  CHECK(bare[0].coda.empty());

  CHECK_THROWS_AS(syllabify(phones({"s", "t", "r"})), NoNucleusError);
}

TEST_CASE("syllabify: more lexicon fixtures") {
  // present -> p.r.eh | z.ax.n.t
  auto present = syllabify(phones({"p", "r", "eh", "z", "ax", "n", "t"}));
  REQUIRE(present.size() == 2);
  CHECK(present[0].phones() == phones({"p", "r", "eh"}));
  CHECK(present[1].phones() == phones({"z", "ax", "n", "t"}));

  // occupied-style k.y cluster: aa | k.y.ax | p.ay.d
  auto occupied = syllabify(phones({"aa", "k", "y", "ax", "p", "ay", "d"}));
  REQUIRE(occupied.size() == 3);
  CHECK(occupied[0].phones() == phones({"aa"}));
  CHECK(occupied[1].phones() == phones({"k", "y", "ax"}));
  CHECK(occupied[2].phones() == phones({"p", "ay", "d"}));

  // pesta keeps the legal s.t onset together
  auto pesta = syllabify(phones({"p", "eh", "s", "t", "ax"}));
  REQUIRE(pesta.size() == 2);
  CHECK(pesta[0].phones() == phones({"p", "eh"}));
  CHECK(pesta[1].phones() == phones({"s", "t", "ax"}));

  // ringo: ng cannot start a syllable
  auto ringo = syllabify(phones({"r", "ih", "ng", "g", "ow"}));
  REQUIRE(ringo.size() == 2);
  CHECK(ringo[0].phones() == phones({"r", "ih", "ng"}));
  CHECK(ringo[1].phones() == phones({"g", "ow"}));
}

TEST_CASE("syllabify round-trip and one-nucleus over random words") {
  const auto& inv = PhoneInventory::english();
  std::vector<std::string> vowels(inv.vowels().begin(), inv.vowels().end());
  std::vector<std::string> consonants(inv.consonants().begin(), inv.consonants().end());
  util::Rng rng(123);
  for (int trial = 0; trial < 500; ++trial) {
    std::vector<std::string> word;
    const size_t len = 1 + rng.uniform_int(8);
    bool has_vowel = false;
    for (size_t i = 0; i < len; ++i) {
      if (rng.next_double() < 0.4) {
        word.push_back(vowels[rng.uniform_int(vowels.size())]);
        has_vowel = true;
      } else {
        word.push_back(consonants[rng.uniform_int(consonants.size())]);
      }
    }
    if (!has_vowel) word.push_back(vowels[rng.uniform_int(vowels.size())]);

    auto sylls = syllabify(word);
    std::vector<std::string> rebuilt;
    for (const auto& s : sylls) {
      const auto p = s.phones();
      rebuilt.insert(rebuilt.end(), p.begin(), p.end());
      CHECK(inv.is_vowel(s.nucleus));
      for (const auto& c : s.onset) CHECK(inv.is_consonant(c));
      for (const auto& c : s.coda) CHECK(inv.is_consonant(c));
    }
    CHECK(rebuilt == word);
  }
}

TEST_CASE("build_units drops stop words, long units and silences") {
  const double hop = 128.0 / 22050.0;
  UtteranceAlignment utt;
  utt.utt_id = "u1";
  // sil | the (stop word) | tana | overlong syllable "lum"
  utt.events = {
      {"u1", "sil", 0.00, 0.10, -1}, {"u1", "dh", 0.10, 0.15, 0},  {"u1", "ax", 0.15, 0.20, 0},
      {"u1", "t", 0.20, 0.25, 1},    {"u1", "aa", 0.25, 0.35, 1},  {"u1", "n", 0.35, 0.40, 1},
      {"u1", "ax", 0.40, 0.48, 1},   {"u1", "l", 0.48, 0.55, 2},   {"u1", "ah", 0.55, 0.70, 2},
      {"u1", "m", 0.70, 0.78, 2}, // l+ah+m spans 0.30 s -> dropped
  };
  auto mel = flat_mel(200, hop);
  DropCounts drops;
  auto seq = build_units(utt, mel, UnitKind::syllable, PhoneInventory::english(),
                         artic::ArticTable::builtin(), StopWordLexicon::defaults(), &drops);

  REQUIRE(seq.units.size() == 2); // t.aa and n.ax
  CHECK(seq.units[0].label == "taa");
  CHECK(seq.units[1].label == "nax");
  for (const auto& u : seq.units) CHECK(u.label != "dhax");
  CHECK(drops.silence_events == 1);
  CHECK(drops.stop_words == 1);
  CHECK(drops.too_long == 1);
  CHECK(seq.units[0].artic.size() == 66);
}

TEST_CASE("frame assignment: containment oracle by interval enumeration") {
  const double hop = 128.0 / 22050.0;
  UtteranceAlignment utt;
  utt.utt_id = "u1";
  utt.events = {{"u1", "iy", 0.0, 0.0124, 0}};
  auto mel = flat_mel(100, hop);
  auto seq = build_units(utt, mel, UnitKind::phoneme, PhoneInventory::english(),
                         artic::ArticTable::builtin(), StopWordLexicon::defaults(), nullptr);
  REQUIRE(seq.units.size() == 1);

  // oracle: enumerate frame intervals, keep those inside [start, end)
  std::vector<size_t> expect;
  for (size_t t = 0; t < 100; ++t) {
    const double lo = t * hop, hi = (t + 1) * hop;
    if (lo >= 0.0 - 1e-12 && hi <= 0.0124 + 1e-12) expect.push_back(t);
  }
  CHECK(expect == std::vector<size_t>{0, 1});
  CHECK(seq.units[0].frame_begin == 0);
  CHECK(seq.units[0].frame_end == 2);
  CHECK(seq.units[0].n_frames() == 2);
}

TEST_CASE("frame slicing never assigns a frame to two units") {
  const double hop = 128.0 / 22050.0;
  UtteranceAlignment utt;
  utt.utt_id = "u1";
  double t = 0.0;
  int word = 0;
  // several adjacent short words
  for (const char* ph : {"t", "aa", "n", "ax", "s", "iy", "m", "uw"}) {
    utt.events.push_back({"u1", ph, t, t + 0.06, word});
    t += 0.06;
    if (utt.events.size() % 2 == 0) ++word;
  }
  auto mel = flat_mel(200, hop);
  auto seq = build_units(utt, mel, UnitKind::syllable, PhoneInventory::english(),
                         artic::ArticTable::builtin(), StopWordLexicon::defaults(), nullptr);
  std::set<size_t> claimed;
  for (const auto& u : seq.units)
    for (size_t f = u.frame_begin; f < u.frame_end; ++f) CHECK(claimed.insert(f).second);
}

TEST_CASE("context_windows counts and identity") {
  UnitSequence seq;
  seq.units.resize(6);
  CHECK(context_windows(seq, 4).size() == 2);
  seq.units.resize(4);
  CHECK(context_windows(seq, 4).empty());
  seq.units.resize(5);
  auto w = context_windows(seq, 4);
  REQUIRE(w.size() == 1);
  CHECK(w[0].target == 4);
}

TEST_CASE("synth_corpus is deterministic and within duration contracts") {
  TempDir dir("sublm_synth_test");
  SynthSpec spec;
  spec.seed = 7;
  spec.n_utts = 3;
  auto m1 = synth_corpus(spec, dir.path / "a");
  auto m2 = synth_corpus(spec, dir.path / "b");

  CHECK(util::read_text_file(m1.manifest_path) ==
        util::read_text_file(m2.manifest_path));
  CHECK(util::read_text_file(m1.alignment_path) ==
        util::read_text_file(m2.alignment_path));
  for (size_t i = 0; i < spec.n_utts; ++i) {
    char name[32];
    std::snprintf(name, sizeof name, "utt%04zu.wav", i);
    CHECK(util::read_text_file(dir.path / "a" / "wavs" / name) ==
          util::read_text_file(dir.path / "b" / "wavs" / name));
  }

  // alignment durations respect the syllable ceiling by construction
  const auto& inv = PhoneInventory::english();
  auto utts = parse_alignment(m1.alignment_path);
  for (const auto& utt : utts) {
    // rebuild per-word syllable spans
    std::map<int, std::vector<const PhoneEvent*>> words;
    for (const auto& ev : utt.events)
      if (!inv.is_silence(ev.phone)) words[ev.word_index].push_back(&ev);
    for (auto& [idx, evs] : words) {
      std::vector<std::string> ph;
      for (auto* e : evs) ph.push_back(e->phone);
      auto sylls = syllabify(ph, inv);
      size_t pos = 0;
      for (const auto& s : sylls) {
        const size_t n = s.phones().size();
        const double dur = evs[pos + n - 1]->end - evs[pos]->start;
        CHECK(dur <= 0.250 + 1e-9);
        pos += n;
      }
    }
  }
}

TEST_CASE("synthetic ax segment has a stable mel argmax matching the DFT oracle") {
  SynthSpec spec;
  spec.seed = 11;
  dsp::DspConfig cfg;
  const double win_seconds = static_cast<double>(cfg.fft_size) / cfg.sample_rate;

  // find an utterance with an ax long enough to hold fully-interior frames
  for (size_t idx = 0; idx < 20; ++idx) {
    auto utt = synth_utterance(spec, idx);
    for (const auto& ev : utt.alignment.events) {
      if (ev.phone != "ax" || ev.end - ev.start < 0.09) continue;

      auto mel = dsp::melspectrogram(utt.audio, cfg);
      auto fb = dsp::MelFilterbank::build(cfg);

      size_t prev = SIZE_MAX;
      size_t interior = 0;
      for (size_t t = 0; t < mel.n_frames; ++t) {
        const double lo = static_cast<double>(t) * cfg.hop_seconds();
        if (lo < ev.start || lo + win_seconds > ev.end) continue; // window must stay inside
        ++interior;

        size_t argmax = 0;
        for (size_t m = 1; m < mel.n_mels; ++m)
          if (mel.at(t, m) > mel.at(t, argmax)) argmax = m;

        // oracle: direct DFT of this windowed frame of the formant sum
        std::vector<double> power(fb.freq_bins, 0.0);
        const size_t off = t * cfg.hop;
        for (size_t k = 0; k < fb.freq_bins; ++k) {
          double re = 0.0, im = 0.0;
          for (size_t i = 0; i < cfg.fft_size; ++i) {
            const double w = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                                   static_cast<double>(cfg.fft_size)));
            const double ang =
                -2.0 * M_PI * static_cast<double>(k * i) / static_cast<double>(cfg.fft_size);
            const double s = utt.audio.samples[off + i] * w;
            re += s * std::cos(ang);
            im += s * std::sin(ang);
          }
          power[k] = re * re + im * im;
        }
        std::vector<double> mel_power(cfg.mel_bins);
        fb.apply(power.data(), mel_power.data());
        size_t oracle_band = 0;
        for (size_t m = 1; m < cfg.mel_bins; ++m)
          if (mel_power[m] > mel_power[oracle_band]) oracle_band = m;

        CHECK(argmax == oracle_band);
        if (prev != SIZE_MAX) CHECK(argmax == prev); // stable across the segment
        prev = argmax;
      }
      CHECK(interior >= 3);
      return; // one good segment is enough
    }
  }
  FAIL("no suitable ax segment found in 20 utterances");
}

TEST_CASE("corpus_stats ordering and degenerate cases") {
  UnitSequence seq;
  seq.utt_id = "u";
  Unit a;
  a.label = "ax";
  seq.units = {a, a};
  auto stats = corpus_stats({seq});
  REQUIRE(stats.counts.size() == 1);
  CHECK(stats.counts[0].first == "ax");
  CHECK(stats.counts[0].second == 2);
  CHECK(stats.top_share(1) == 1.0);

  auto empty = corpus_stats({});
  CHECK(empty.counts.empty());
  CHECK(empty.total == 0);
  CHECK(empty.top_share(5) == 0.0);
}

TEST_CASE("stats csv format") {
  TempDir dir("sublm_stats_test");
  UnitSequence seq;
  Unit a, b;
  a.label = "taa";
  b.label = "nax";
  seq.units = {a, a, b};
  auto stats = corpus_stats({seq});
  const auto path = dir.path / "stats.csv";
  write_stats_csv(path, stats);
  CHECK(util::read_text_file(path) == "label,count\ntaa,2\nnax,1\n");
}
