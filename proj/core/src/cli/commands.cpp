#include "sublm/cli/commands.hpp"

#include <iostream>
#include <map>
#include <sstream>

#include "sublm/corpus/stats.hpp"
#include "sublm/corpus/synth.hpp"
#include "sublm/dsp/audio.hpp"
#include "sublm/dsp/griffin_lim.hpp"
#include "sublm/error.hpp"
#include "sublm/ndl/serialize.hpp"
#include "sublm/evalprobe/report.hpp"
#include "sublm/speechlm/babble.hpp"
#include "sublm/speechlm/gradcheck.hpp"
#include "sublm/speechlm/train.hpp"
#include "sublm/textlm/train.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/parallel.hpp"

namespace sublm::cli {

namespace fs = std::filesystem;

namespace {

std::string join_phones(const std::vector<std::string>& phones) {
  return phones.empty() ? "-" : util::join(phones, ".");
}

std::vector<std::string> split_phones(const std::string& s) {
  if (s == "-") return {};
  return util::split(s, '.');
}

std::string artic_to_string(const artic::BinaryVector& v) {
  std::string out;
  out.reserve(v.size());
  for (float x : v) out.push_back(x > 0.5f ? '1' : '0');
  return out;
}

artic::BinaryVector artic_from_string(const std::string& s) {
  artic::BinaryVector v(s.size(), 0.0f);
  for (size_t i = 0; i < s.size(); ++i) v[i] = s[i] == '1' ? 1.0f : 0.0f;
  return v;
}

const artic::ArticTable& artic_table_from(const Config& cfg) {
  if (cfg.has_value("paths.artic_table")) {
    static std::map<std::string, artic::ArticTable> loaded;
    const std::string key = cfg.get("paths.artic_table");
    auto it = loaded.find(key);
    if (it == loaded.end()) it = loaded.emplace(key, artic::ArticTable::load(key)).first;
    return it->second;
  }
  return artic::ArticTable::builtin();
}

const corpus::StopWordLexicon& stop_words_from(const Config& cfg) {
  if (cfg.has_value("paths.stop_words")) {
    static std::map<std::string, corpus::StopWordLexicon> loaded;
    const std::string key = cfg.get("paths.stop_words");
    auto it = loaded.find(key);
    if (it == loaded.end())
      it = loaded.emplace(key, corpus::StopWordLexicon::load(key)).first;
    return it->second;
  }
  return corpus::StopWordLexicon::defaults();
}

speechlm::SpeechLmConfig model_config_from(const Config& cfg, corpus::UnitKind kind) {
  speechlm::SpeechLmConfig mc;
  mc.mel_bins = cfg.get_size("dsp.mel_bins");
  mc.n_ctx = cfg.get_size("corpus.n_ctx");
  mc.artic_dim = kind == corpus::UnitKind::syllable ? artic::kSyllableDim : artic::kNumFeatures;
  mc.text_dim = cfg.get_size("textlm.embed_dim");
  mc.variant = speechlm::parse_variant(cfg.get("model.variant"));
  mc.lambda_mtl = cfg.get_double("model.lambda_mtl");
  mc.lambda_len = cfg.get_double("model.lambda_len");
  const auto dsp_cfg = dsp_config_from(cfg);
  mc.first_frame_value = dsp_cfg.log_floor_value();
  mc.max_len_frames = std::max<size_t>(
      1, static_cast<size_t>(corpus::kMaxSyllableSeconds / dsp_cfg.hop_seconds()));
  return mc;
}

struct FrozenTextLm {
  bool present = false;
  textlm::TextLm<float> model;
  textlm::SubwordVocab vocab;
};

FrozenTextLm load_frozen_textlm(const Config& cfg, bool required) {
  FrozenTextLm out;
  if (!cfg.has_value("paths.textlm")) {
    if (required)
      throw ValidationError("paths.textlm is required for the aux_textlm variant");
    return out;
  }
  out.model = textlm::load_textlm(cfg.get_path("paths.textlm"));
  const fs::path vocab_path = cfg.has_value("paths.vocab")
                                  ? cfg.get_path("paths.vocab")
                                  : cfg.get_path("paths.textlm").parent_path() / "vocab.txt";
  out.vocab = textlm::SubwordVocab::load(vocab_path);
  out.present = true;
  return out;
}

} // namespace

void cmd_synth_corpus(const Config& cfg, bool force) {
  const fs::path out_dir = cfg.get_path("paths.corpus_dir");
  if (fs::exists(out_dir) && !fs::is_empty(out_dir) && !force)
    throw ValidationError("corpus dir " + out_dir.string() +
                          " already exists; pass --force to overwrite");
  if (force) fs::remove_all(out_dir);

  corpus::SynthSpec spec;
  spec.seed = cfg.get_u64("seed");
  spec.n_utts = cfg.get_size("corpus.n_utts");
  spec.min_syllables = cfg.get_size("corpus.min_syllables");
  spec.max_syllables = cfg.get_size("corpus.max_syllables");
  spec.sample_rate = cfg.get_int("dsp.sample_rate");
  spec.jobs = cfg.get_size("jobs");
  if (spec.min_syllables == 0 || spec.min_syllables > spec.max_syllables)
    throw ValidationError("corpus.min_syllables/max_syllables out of order");

  const auto manifest = corpus::synth_corpus(spec, out_dir);
  write_run_stamp(out_dir, cfg, {});
  std::cout << "synth-corpus: " << manifest.n_utts << " utterances under " << out_dir << "\n";
}

PreprocessSummary cmd_preprocess(const Config& cfg) {
  const fs::path corpus_dir = cfg.get_path("paths.corpus_dir");
  const fs::path cache_dir = cfg.get_path("paths.cache_dir");
  const auto dsp_cfg = dsp_config_from(cfg);
  const auto kind = corpus::parse_unit_kind(cfg.get("corpus.kind"));
  const auto& inv = corpus::PhoneInventory::english();
  const auto& table = artic_table_from(cfg);
  const auto& stops = stop_words_from(cfg);

  const fs::path manifest_path = corpus_dir / "manifest.tsv";
  const fs::path alignment_path = corpus_dir / "alignments.tsv";
  const auto rows = corpus::read_manifest(manifest_path);
  const auto alignments = corpus::parse_alignment(alignment_path, inv);
  std::map<std::string, const corpus::UtteranceAlignment*> alignment_of;
  for (const auto& a : alignments) alignment_of[a.utt_id] = &a;

  fs::create_directories(cache_dir / "units");

  std::vector<corpus::UnitSequence> seqs(rows.size());
  std::vector<corpus::DropCounts> drops(rows.size());
  util::parallel_for(rows.size(), cfg.get_size("jobs"), [&](size_t i) {
    const auto& row = rows[i];
    auto it = alignment_of.find(row.utt_id);
    if (it == alignment_of.end())
      throw ValidationError("no alignment for utterance '" + row.utt_id + "'");
    const auto audio = dsp::load_wav(row.wav_path);
    const auto mel = dsp::melspectrogram(audio, dsp_cfg);
    seqs[i] = corpus::build_units(*it->second, mel, kind, inv, table, stops, &drops[i],
                                  row.transcript);
  });

  PreprocessSummary summary;
  summary.n_utts = rows.size();

  std::ostringstream index;
  index << "utt_id\tunit_idx\tkind\tlabel\tonset\tnucleus\tcoda\tstart\tend\tframe_begin\tframe_"
           "end\tcat_begin\tcat_end\tartic\n";
  textlm::TokenStream tokens;
  for (const auto& seq : seqs) {
    // per-utterance MELS file holds the unit slices back to back
    dsp::MelSpectrogram cat;
    cat.n_mels = dsp_cfg.mel_bins;
    cat.hop_seconds = dsp_cfg.hop_seconds();
    cat.config_id = dsp_cfg.id();
    size_t offset = 0;
    std::vector<std::string> utt_tokens;
    for (size_t u = 0; u < seq.units.size(); ++u) {
      const auto& unit = seq.units[u];
      index << seq.utt_id << '\t' << u << '\t' << corpus::unit_kind_name(unit.kind) << '\t'
            << unit.label << '\t' << join_phones(unit.onset) << '\t'
            << (unit.nucleus.empty() ? "-" : unit.nucleus) << '\t' << join_phones(unit.coda)
            << '\t' << unit.start << '\t' << unit.end << '\t' << unit.frame_begin << '\t'
            << unit.frame_end << '\t' << offset << '\t' << offset + unit.n_frames() << '\t'
            << artic_to_string(unit.artic) << '\n';
      cat.values.insert(cat.values.end(), unit.frames.values.begin(), unit.frames.values.end());
      offset += unit.n_frames();
      utt_tokens.push_back(unit.label);
      ++summary.n_units;
    }
    cat.n_frames = offset;
    if (cat.n_frames > 0) dsp::write_mels(cache_dir / "units" / (seq.utt_id + ".mels"), cat);
    if (!utt_tokens.empty()) tokens.push_back(std::move(utt_tokens));
  }
  for (const auto& d : drops) summary.drops += d;

  util::write_text_file(cache_dir / "index.tsv", index.str());
  textlm::write_token_stream(cache_dir / "tokens.txt", tokens);
  corpus::write_stats_csv(cache_dir / "stats.csv", corpus::corpus_stats(seqs));

  std::ostringstream droplog;
  droplog << "dropped_silence_events=" << summary.drops.silence_events << '\n'
          << "dropped_stop_words=" << summary.drops.stop_words << '\n'
          << "dropped_too_long=" << summary.drops.too_long << '\n'
          << "dropped_no_nucleus=" << summary.drops.no_nucleus << '\n'
          << "dropped_zero_frames=" << summary.drops.zero_frames << '\n';
  util::write_text_file(cache_dir / "drops.txt", droplog.str());

  write_run_stamp(cache_dir, cfg, {manifest_path, alignment_path});
  std::cout << "preprocess: " << summary.n_units << " units from " << summary.n_utts
            << " utterances\n"
            << droplog.str();
  return summary;
}

UnitCache load_unit_cache(const fs::path& cache_dir) {
  UnitCache cache;
  const auto lines = util::read_lines(cache_dir / "index.tsv");
  if (lines.empty()) throw IoError("empty cache index: " + (cache_dir / "index.tsv").string());

  std::map<std::string, dsp::MelSpectrogram> mels;
  std::map<std::string, size_t> seq_of;

  for (size_t i = 1; i < lines.size(); ++i) {
    if (lines[i].empty()) continue;
    const auto f = util::split(lines[i], '\t');
    if (f.size() != 14)
      throw IoError("bad cache index line " + std::to_string(i + 1) + " in " + cache_dir.string());
    const std::string& utt_id = f[0];
    auto [it, fresh] = seq_of.try_emplace(utt_id, cache.sequences.size());
    if (fresh) {
      cache.sequences.push_back({utt_id, "", {}});
      mels[utt_id] = dsp::read_mels(cache_dir / "units" / (utt_id + ".mels"));
    }

    corpus::Unit unit;
    unit.kind = corpus::parse_unit_kind(f[2]);
    unit.label = f[3];
    unit.onset = split_phones(f[4]);
    unit.nucleus = f[5] == "-" ? "" : f[5];
    unit.coda = split_phones(f[6]);
    unit.phones = unit.onset;
    if (!unit.nucleus.empty()) unit.phones.push_back(unit.nucleus);
    unit.phones.insert(unit.phones.end(), unit.coda.begin(), unit.coda.end());
    if (unit.kind == corpus::UnitKind::phoneme) unit.phones = {unit.label};
    unit.start = std::stod(f[7]);
    unit.end = std::stod(f[8]);
    unit.frame_begin = std::stoul(f[9]);
    unit.frame_end = std::stoul(f[10]);
    const size_t cat_begin = std::stoul(f[11]);
    const size_t cat_end = std::stoul(f[12]);
    unit.frames = mels[utt_id].slice_rows(cat_begin, cat_end);
    unit.artic = artic_from_string(f[13]);
    cache.kind = unit.kind;
    cache.sequences[it->second].units.push_back(std::move(unit));
  }
  return cache;
}

namespace {

speechlm::WindowData windows_from_cache(const UnitCache& cache,
                                        const speechlm::SpeechLmConfig& mc,
                                        const FrozenTextLm& text) {
  return speechlm::build_windows(cache.sequences, mc, text.present ? &text.model : nullptr,
                                 text.present ? &text.vocab : nullptr);
}

} // namespace

void cmd_train(const Config& cfg) {
  const fs::path cache_dir = cfg.get_path("paths.cache_dir");
  const fs::path out_dir = cfg.get_path("paths.out_dir");
  const auto cache = load_unit_cache(cache_dir);
  const auto mc = model_config_from(cfg, cache.kind);
  const auto text = load_frozen_textlm(cfg, mc.variant == speechlm::Variant::aux_textlm);

  const auto data = windows_from_cache(cache, mc, text);
  if (data.samples.empty())
    throw ValidationError("no training windows (corpus too small for n_ctx=" +
                          std::to_string(mc.n_ctx) + ")");

  speechlm::SpeechTrainOptions opts;
  opts.lr = cfg.get_double("train.lr");
  opts.batch = cfg.get_size("train.batch");
  opts.epochs = cfg.get_size("train.epochs");
  opts.max_steps = cfg.get_size("train.steps");
  opts.clip_norm = cfg.get_double("train.clip_norm");
  opts.val_fraction = cfg.get_double("train.val_fraction");
  opts.seed = cfg.get_u64("seed");
  opts.jobs = cfg.get_size("jobs");

  auto result = speechlm::train_speechlm(data.samples, mc, opts);

  fs::create_directories(out_dir);
  speechlm::write_loss_curve(out_dir / "loss_curve.csv", result.curve);
  write_run_stamp(out_dir, cfg, {cache_dir / "index.tsv"});

  if (result.diverged) {
    speechlm::save_speechlm(out_dir / "model_lastgood.sblm", result.model, opts.seed);
    throw NumericError("training diverged (" + result.divergence_message +
                       "); last good checkpoint written to " +
                       (out_dir / "model_lastgood.sblm").string());
  }
  speechlm::save_speechlm(out_dir / "model.sblm", result.model, opts.seed);
  std::cout << "train: " << result.steps_taken << " steps, " << data.samples.size()
            << " windows, final train loss "
            << (result.curve.empty() ? 0.0 : result.curve.back().train_loss) << "\n";
}

void cmd_train_textlm(const Config& cfg) {
  const fs::path out_dir = cfg.get_path("paths.out_dir");
  const fs::path tokens_path = cfg.has_value("paths.tokens")
                                   ? cfg.get_path("paths.tokens")
                                   : cfg.get_path("paths.cache_dir") / "tokens.txt";
  const auto stream = textlm::read_token_stream(tokens_path);
  if (stream.empty()) throw ValidationError("token stream is empty: " + tokens_path.string());

  auto vocab = textlm::SubwordVocab::build(stream, cfg.get_size("textlm.min_count"));
  const auto ids = vocab.encode_stream(stream);

  textlm::TextLmConfig lm_cfg;
  lm_cfg.embed_dim = cfg.get_size("textlm.embed_dim");

  const textlm::CbowParams* init = nullptr;
  textlm::CbowResult cbow;
  const std::string init_kind = cfg.get("textlm.init");
  if (init_kind == "cbow") {
    textlm::CbowOptions copts;
    copts.dim = lm_cfg.embed_dim;
    copts.window = cfg.get_size("cbow.window");
    copts.negatives = cfg.get_size("cbow.negatives");
    copts.epochs = cfg.get_size("cbow.epochs");
    copts.lr = cfg.get_double("cbow.lr");
    copts.seed = cfg.get_u64("seed");
    cbow = textlm::cbow_pretrain(ids, vocab.size(), copts);
    init = &cbow.params;
  } else if (init_kind != "random") {
    throw ValidationError("textlm.init must be cbow or random, got '" + init_kind + "'");
  }

  textlm::TextLmTrainOptions opts;
  opts.epochs = cfg.get_size("textlm.epochs");
  opts.bptt = cfg.get_size("textlm.bptt");
  opts.batch = cfg.get_size("textlm.batch");
  opts.lr = cfg.get_double("textlm.lr");
  opts.seed = cfg.get_u64("seed");

  auto result = textlm::lm_train(ids, vocab.size(), lm_cfg, init, opts, &ids);

  fs::create_directories(out_dir);
  vocab.save(out_dir / "vocab.txt");
  textlm::save_textlm(out_dir / "textlm.sblm", result.model, result.init_kind, opts.seed);
  std::ostringstream metrics;
  metrics << "epoch,train_ce,val_ppl,val_acc\n";
  for (const auto& row : result.epochs)
    metrics << row.epoch << ',' << row.train_ce << ',' << row.val_ppl << ',' << row.val_acc
            << '\n';
  util::write_text_file(out_dir / "metrics.csv", metrics.str());
  write_run_stamp(out_dir, cfg, {tokens_path});

  const auto eval = textlm::evaluate_lm(result.model, ids);
  std::cout << "train-textlm: vocab " << vocab.size() << ", train perplexity " << eval.perplexity
            << ", accuracy " << eval.accuracy << "\n";
}

void cmd_babble(const Config& cfg) {
  const fs::path out_dir = cfg.get_path("paths.out_dir");
  const fs::path ckpt = cfg.get_path("paths.checkpoint");
  const auto cache = load_unit_cache(cfg.get_path("paths.cache_dir"));
  auto model = speechlm::load_speechlm(ckpt);
  const auto text = load_frozen_textlm(cfg, model.cfg.variant == speechlm::Variant::aux_textlm);
  const auto dsp_cfg = dsp_config_from(cfg);

  speechlm::BabbleOptions opts;
  opts.n_units = cfg.get_size("babble.n_units");
  opts.seed = cfg.get_u64("seed");

  const auto result = speechlm::babble(model, cache.sequences, dsp_cfg, opts,
                                       text.present ? &text.model : nullptr,
                                       text.present ? &text.vocab : nullptr);

  fs::create_directories(out_dir);
  if (result.mel.n_frames > 0) {
    dsp::write_mels(out_dir / "babble.mels", result.mel);
    dsp::save_wav(out_dir / "babble.wav", result.audio);
  }

  // generation manifest: seed context and outputs, JSON-like
  std::ostringstream manifest;
  manifest << "{\n  \"checkpoint\": \"" << ckpt.string() << "\",\n";
  manifest << "  \"seed\": " << opts.seed << ",\n";
  manifest << "  \"seed_utt\": \"" << result.seed_utt_id << "\",\n";
  manifest << "  \"seed_units\": [";
  for (size_t i = 0; i < result.seed_unit_indices.size(); ++i)
    manifest << (i ? ", " : "") << "{\"index\": " << result.seed_unit_indices[i] << ", \"label\": \""
             << result.seed_labels[i] << "\"}";
  manifest << "],\n  \"generated\": [";
  for (size_t i = 0; i < result.unit_frame_counts.size(); ++i) {
    manifest << (i ? ", " : "") << "{\"frames\": " << result.unit_frame_counts[i];
    if (!result.generated_labels[i].empty())
      manifest << ", \"nearest_label\": \"" << result.generated_labels[i] << "\"";
    manifest << "}";
  }
  manifest << "],\n  \"outputs\": [\"babble.wav\", \"babble.mels\"]\n}\n";
  util::write_text_file(out_dir / "babble_manifest.json", manifest.str());
  write_run_stamp(out_dir, cfg, {ckpt});

  std::cout << "babble: " << result.unit_frame_counts.size() << " units, "
            << result.mel.n_frames << " frames, "
            << static_cast<double>(result.audio.samples.size()) / dsp_cfg.sample_rate
            << " s of audio\n";
}

void cmd_eval(const Config& cfg) {
  const fs::path out_dir = cfg.get_path("paths.out_dir");
  const auto cache = load_unit_cache(cfg.get_path("paths.cache_dir"));
  const auto dsp_cfg = dsp_config_from(cfg);

  std::vector<fs::path> checkpoints;
  for (const auto& p : util::split(cfg.get("paths.checkpoints"), ','))
    if (!p.empty()) checkpoints.push_back(p);
  if (checkpoints.empty())
    throw ValidationError("paths.checkpoints must list at least one checkpoint");

  bool any_aux = false;
  for (const auto& p : checkpoints)
    if (ndl::peek_checkpoint(p).field("variant") == "aux_textlm") any_aux = true;
  const auto text = load_frozen_textlm(cfg, any_aux);

  evalprobe::ReportOptions opts;
  opts.n_samples = cfg.get_size("eval.n_samples");
  opts.babble_units = cfg.get_size("eval.babble_units");
  opts.seed = cfg.get_u64("seed");
  opts.probe.steps = cfg.get_size("probe.steps");
  opts.probe.lr = cfg.get_double("probe.lr");
  opts.probe.l2 = cfg.get_double("probe.l2");

  const auto report = evalprobe::metric_report(checkpoints, cache.sequences, dsp_cfg, opts,
                                               text.present ? &text.model : nullptr,
                                               text.present ? &text.vocab : nullptr);
  fs::create_directories(out_dir);
  evalprobe::write_report_csv(out_dir / "report.csv", report);
  evalprobe::write_correlations_csv(out_dir / "correlations.csv", report);
  std::vector<fs::path> inputs = checkpoints;
  write_run_stamp(out_dir, cfg, inputs);

  for (const auto& row : report.rows)
    std::cout << "eval: " << row.variant << " val_mse " << row.val_mse << " mcd " << row.mcd_mean
              << " probe_acc " << row.probe_accuracy << "\n";
}

ProbeSummary cmd_probe(const Config& cfg) {
  const fs::path out_dir = cfg.get_path("paths.out_dir");
  const auto cache = load_unit_cache(cfg.get_path("paths.cache_dir"));
  const std::string source = cfg.get("probe.source");

  evalprobe::ProbeOptions popts;
  popts.steps = cfg.get_size("probe.steps");
  popts.lr = cfg.get_double("probe.lr");
  popts.l2 = cfg.get_double("probe.l2");
  popts.seed = cfg.get_u64("seed");

  // the feature source decides the dataset
  evalprobe::ProbeDataset dataset;
  std::string source_desc;
  if (source == "panphon") {
    speechlm::SpeechLmConfig mc = model_config_from(cfg, cache.kind);
    mc.variant = speechlm::Variant::synthesis_only;
    const auto data = speechlm::build_windows(cache.sequences, mc);
    dataset = evalprobe::artic_probe_dataset(data, cache.sequences);
    source_desc = "panphon";
  } else if (source == "latents") {
    speechlm::SpeechLmModel<float> model;
    if (cfg.has_value("paths.checkpoint")) {
      model = speechlm::load_speechlm(cfg.get_path("paths.checkpoint"));
      if (model.cfg.variant == speechlm::Variant::aux_textlm)
        throw ValidationError("probe on aux_textlm latents is not supported; use another variant");
      source_desc = std::string("latents:") + speechlm::variant_name(model.cfg.variant);
    } else {
      // untrained model at the configured dims
      auto mc = model_config_from(cfg, cache.kind);
      mc.variant = speechlm::Variant::synthesis_only;
      model = speechlm::SpeechLmModel<float>(mc);
      model.init(cfg.get_u64("seed"));
      source_desc = "latents:untrained";
    }
    const auto data = speechlm::build_windows(cache.sequences, model.cfg);
    dataset = evalprobe::latent_probe_dataset(model, data);
  } else {
    throw ValidationError("probe.source must be latents or panphon, got '" + source + "'");
  }

  const auto model = evalprobe::probe_train(dataset.features, dataset.labels, 16, popts);
  const auto cm = evalprobe::probe_eval(model, dataset.features, dataset.labels);

  fs::create_directories(out_dir);
  evalprobe::write_confusion_csv(out_dir / "confusion.csv", cm,
                                 corpus::PhoneInventory::english().vowel_order());
  std::ostringstream report;
  report << "source=" << source_desc << '\n'
         << "samples=" << dataset.features.rows << '\n'
         << "accuracy=" << cm.accuracy << '\n'
         << "majority_flag=" << (cm.majority_flag ? 1 : 0) << '\n';
  util::write_text_file(out_dir / "probe_report.txt", report.str());
  write_run_stamp(out_dir, cfg, {cfg.get_path("paths.cache_dir") / "index.tsv"});

  std::cout << "probe: source " << source_desc << " accuracy " << cm.accuracy
            << (cm.majority_flag ? " (majority classifier)" : "") << "\n";
  return {cm.accuracy, cm.majority_flag};
}

ndl::GradCheckResult cmd_gradcheck(const Config& cfg) {
  const auto variant = speechlm::parse_variant(cfg.get("model.variant"));
  const auto result = speechlm::gradcheck_variant(variant, cfg.get_u64("seed"));
  std::cout << "gradcheck " << speechlm::variant_name(variant) << ": max rel err "
            << result.max_rel_err << " over " << result.coords_checked << " coords (worst "
            << result.worst_tensor << "[" << result.worst_index << "])\n";
  return result;
}

} // namespace sublm::cli
