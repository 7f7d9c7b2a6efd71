#include "sublm/evalprobe/report.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <sstream>

#include "sublm/speechlm/data.hpp"
#include "sublm/textlm/train.hpp"
#include "sublm/util/io.hpp"
#include "sublm/util/rng.hpp"

namespace sublm::evalprobe {

namespace {

// concatenated unit frames per utterance, used for duration-matched references
dsp::MelSpectrogram concat_units(const corpus::UnitSequence& seq) {
  dsp::MelSpectrogram mel;
  size_t total = 0;
  for (const auto& u : seq.units) total += u.frames.n_frames;
  if (total == 0) return mel;
  mel.n_frames = total;
  mel.n_mels = seq.units.front().frames.n_mels;
  mel.hop_seconds = seq.units.front().frames.hop_seconds;
  mel.config_id = seq.units.front().frames.config_id;
  mel.values.reserve(total * mel.n_mels);
  for (const auto& u : seq.units)
    mel.values.insert(mel.values.end(), u.frames.values.begin(), u.frames.values.end());
  return mel;
}

} // namespace

std::vector<double> ranks(const std::vector<double>& values) {
  std::vector<size_t> order(values.size());
  std::iota(order.begin(), order.end(), size_t{0});
  std::sort(order.begin(), order.end(),
            [&](size_t a, size_t b) { return values[a] < values[b]; });
  std::vector<double> out(values.size(), 0.0);
  size_t i = 0;
  while (i < order.size()) {
    size_t j = i;
    while (j + 1 < order.size() && values[order[j + 1]] == values[order[i]]) ++j;
    const double avg_rank = (static_cast<double>(i) + static_cast<double>(j)) / 2.0 + 1.0;
    for (size_t k = i; k <= j; ++k) out[order[k]] = avg_rank;
    i = j + 1;
  }
  return out;
}

double pearson(const std::vector<double>& a, const std::vector<double>& b) {
  if (a.size() != b.size() || a.size() < 2)
    throw ValidationError("pearson: need two equal-length series of >= 2 points");
  const double n = static_cast<double>(a.size());
  double ma = 0.0, mb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    ma += a[i];
    mb += b[i];
  }
  ma /= n;
  mb /= n;
  double cov = 0.0, va = 0.0, vb = 0.0;
  for (size_t i = 0; i < a.size(); ++i) {
    cov += (a[i] - ma) * (b[i] - mb);
    va += (a[i] - ma) * (a[i] - ma);
    vb += (b[i] - mb) * (b[i] - mb);
  }
  if (va == 0.0 || vb == 0.0) return 0.0; // constant series carry no correlation
  return cov / std::sqrt(va * vb);
}

ProbeDataset latent_probe_dataset(const speechlm::SpeechLmModel<float>& model,
                                  const speechlm::WindowData& data) {
  ProbeDataset out;
  std::vector<size_t> keep;
  for (size_t i = 0; i < data.meta.size(); ++i)
    if (data.meta[i].target_vowel_id >= 0) keep.push_back(i);
  out.features = util::RealMatrix(keep.size(), model.cfg.z_dim());
  out.labels.reserve(keep.size());
  for (size_t row = 0; row < keep.size(); ++row) {
    const auto& sample = data.samples[keep[row]];
    ndl::Vec<float> z, z_aug;
    speechlm::build_context(model, sample.context, sample.aux, z, z_aug);
    for (size_t d = 0; d < z.size(); ++d) out.features.at(row, d) = z[d];
    out.labels.push_back(data.meta[keep[row]].target_vowel_id);
  }
  return out;
}

ProbeDataset artic_probe_dataset(const speechlm::WindowData& data,
                                 const std::vector<corpus::UnitSequence>& seqs) {
  // features = the target unit's own articulatory vector
  std::map<std::string, const corpus::UnitSequence*> by_id;
  for (const auto& s : seqs) by_id[s.utt_id] = &s;

  std::vector<size_t> keep;
  for (size_t i = 0; i < data.meta.size(); ++i)
    if (data.meta[i].target_vowel_id >= 0) keep.push_back(i);
  if (keep.empty()) throw ValidationError("artic_probe_dataset: no vowel-labelled windows");

  const auto& first_meta = data.meta[keep[0]];
  const size_t dim = by_id.at(first_meta.utt_id)->units[first_meta.target_index].artic.size();

  ProbeDataset out;
  out.features = util::RealMatrix(keep.size(), dim);
  for (size_t row = 0; row < keep.size(); ++row) {
    const auto& meta = data.meta[keep[row]];
    const auto& artic = by_id.at(meta.utt_id)->units[meta.target_index].artic;
    for (size_t d = 0; d < dim; ++d) out.features.at(row, d) = artic[d];
    out.labels.push_back(meta.target_vowel_id);
  }
  return out;
}

namespace {

double probe_heldout_accuracy(const ProbeDataset& dataset, const ReportOptions& opts) {
  const size_t n = dataset.features.rows;
  util::Rng rng(opts.seed ^ 0x70726f6265ull);
  std::vector<size_t> order(n);
  std::iota(order.begin(), order.end(), size_t{0});
  rng.shuffle(order);
  size_t n_eval = static_cast<size_t>(std::llround(opts.probe_eval_fraction * n));
  if (n - n_eval < 16) n_eval = n > 16 ? n - 16 : 0;

  auto subset = [&](size_t lo, size_t hi) {
    ProbeDataset out;
    out.features = util::RealMatrix(hi - lo, dataset.features.cols);
    for (size_t i = lo; i < hi; ++i) {
      for (size_t d = 0; d < dataset.features.cols; ++d)
        out.features.at(i - lo, d) = dataset.features.at(order[i], d);
      out.labels.push_back(dataset.labels[order[i]]);
    }
    return out;
  };
  const auto eval_set = subset(0, n_eval);
  const auto train_set = subset(n_eval, n);
  const auto model = probe_train(train_set.features, train_set.labels, 16, opts.probe);
  const auto& target = n_eval > 0 ? eval_set : train_set;
  return probe_eval(model, target.features, target.labels).accuracy;
}

} // namespace

MetricReport metric_report(const std::vector<std::filesystem::path>& checkpoints,
                           const std::vector<corpus::UnitSequence>& seqs,
                           const dsp::DspConfig& dsp_cfg, const ReportOptions& opts,
                           const textlm::TextLm<float>* text_model,
                           const textlm::SubwordVocab* vocab) {
  if (checkpoints.empty()) throw ValidationError("metric_report: no checkpoints");

  // reference material for duration-matched MCD
  std::vector<dsp::MelSpectrogram> reference_mels;
  for (const auto& s : seqs) {
    auto mel = concat_units(s);
    if (mel.n_frames > 0) reference_mels.push_back(std::move(mel));
  }
  if (reference_mels.empty()) throw ValidationError("metric_report: empty corpus");

  MetricReport report;
  for (const auto& ckpt : checkpoints) {
    auto model = speechlm::load_speechlm(ckpt);
    VariantMetrics row;
    row.variant = speechlm::variant_name(model.cfg.variant);
    row.checkpoint = ckpt.string();

    const auto data = speechlm::build_windows(seqs, model.cfg, text_model, vocab);
    if (data.samples.empty()) throw ValidationError("metric_report: no evaluation windows");
    row.val_mse = speechlm::evaluate_speechlm(model, data.samples).mse;

    // MCD of generated babble vs duration-matched reference spans
    util::Rng rng(opts.seed ^ 0x6d6364ull);
    double mcd_sum = 0.0;
    size_t mcd_count = 0;
    for (size_t s = 0; s < opts.n_samples; ++s) {
      speechlm::BabbleOptions bopts;
      bopts.n_units = opts.babble_units;
      bopts.seed = opts.seed * 1000 + s;
      const auto gen = speechlm::babble(model, seqs, dsp_cfg, bopts, text_model, vocab);
      if (gen.mel.n_frames == 0) continue;
      for (size_t draw = 0; draw < opts.reference_draws; ++draw) {
        // random utterance span with the same frame count, when available
        const auto& ref = reference_mels[rng.uniform_int(reference_mels.size())];
        const size_t want = std::min(gen.mel.n_frames, ref.n_frames);
        const size_t start = ref.n_frames > want ? rng.uniform_int(ref.n_frames - want + 1) : 0;
        const auto span = ref.slice_rows(start, start + want);
        mcd_sum += mcd(span, gen.mel).value;
        ++mcd_count;
      }
    }
    row.mcd_mean = mcd_count ? mcd_sum / static_cast<double>(mcd_count) : 0.0;

    row.probe_accuracy = probe_heldout_accuracy(latent_probe_dataset(model, data), opts);

    if (model.cfg.variant == speechlm::Variant::aux_textlm && text_model && vocab) {
      textlm::TokenStream labels;
      for (const auto& s : seqs) {
        std::vector<std::string> utt;
        for (const auto& u : s.units) utt.push_back(u.label);
        if (!utt.empty()) labels.push_back(std::move(utt));
      }
      row.textlm_ppl = textlm::evaluate_lm(*text_model, vocab->encode_stream(labels)).perplexity;
    }
    report.rows.push_back(std::move(row));
  }

  if (report.rows.size() >= 3) {
    std::vector<std::pair<std::string, std::vector<double>>> series = {
        {"val_mse", {}}, {"mcd_mean", {}}, {"probe_accuracy", {}}};
    for (const auto& row : report.rows) {
      series[0].second.push_back(row.val_mse);
      series[1].second.push_back(row.mcd_mean);
      series[2].second.push_back(row.probe_accuracy);
    }
    for (size_t a = 0; a < series.size(); ++a)
      for (size_t b = a + 1; b < series.size(); ++b) {
        MetricCorrelation corr;
        corr.metric_a = series[a].first;
        corr.metric_b = series[b].first;
        corr.pearson = pearson(series[a].second, series[b].second);
        corr.rank_pearson = pearson(ranks(series[a].second), ranks(series[b].second));
        report.correlations.push_back(corr);
      }
  }
  return report;
}

void write_report_csv(const std::filesystem::path& path, const MetricReport& report) {
  std::ostringstream os;
  os << "variant,val_mse,mcd_mean,probe_accuracy,textlm_ppl\n";
  for (const auto& row : report.rows) {
    os << row.variant << ',' << row.val_mse << ',' << row.mcd_mean << ',' << row.probe_accuracy
       << ',';
    if (row.textlm_ppl) os << *row.textlm_ppl;
    os << '\n';
  }
  util::write_text_file(path, os.str());
}

void write_correlations_csv(const std::filesystem::path& path, const MetricReport& report) {
  std::ostringstream os;
  os << "metric_a,metric_b,pearson,rank_pearson\n";
  for (const auto& c : report.correlations)
    os << c.metric_a << ',' << c.metric_b << ',' << c.pearson << ',' << c.rank_pearson << '\n';
  util::write_text_file(path, os.str());
}

} // namespace sublm::evalprobe
