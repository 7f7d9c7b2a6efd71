#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sublm/corpus/units.hpp"
#include "sublm/evalprobe/mcd.hpp"
#include "sublm/evalprobe/probe.hpp"
#include "sublm/speechlm/babble.hpp"
#include "sublm/speechlm/train.hpp"

namespace sublm::evalprobe {

struct ReportOptions {
  size_t n_samples = 10;   // generated samples per variant
  size_t babble_units = 10; // units per generated sample
  size_t reference_draws = 10; // duration-matched reference spans per sample
  uint64_t seed = 1;
  ProbeOptions probe;
  double probe_eval_fraction = 0.2; // held-out share for probe accuracy
};

struct VariantMetrics {
  std::string variant;
  std::string checkpoint;
  double val_mse = 0.0;
  double mcd_mean = 0.0;
  double probe_accuracy = 0.0;
  std::optional<double> textlm_ppl; // aux_textlm rows only
};

struct MetricCorrelation {
  std::string metric_a;
  std::string metric_b;
  double pearson = 0.0;
  double rank_pearson = 0.0; // Pearson on ranks
};

struct MetricReport {
  std::vector<VariantMetrics> rows;
  std::vector<MetricCorrelation> correlations; // filled when >= 3 rows
};

// Evaluates trained checkpoints on a preprocessed corpus: teacher-forced MSE,
// MCD of generated babble against duration-matched reference spans, and the
// post-hoc vowel probe on the model's context latents.
MetricReport metric_report(const std::vector<std::filesystem::path>& checkpoints,
                           const std::vector<corpus::UnitSequence>& seqs,
                           const dsp::DspConfig& dsp_cfg, const ReportOptions& opts,
                           const textlm::TextLm<float>* text_model = nullptr,
                           const textlm::SubwordVocab* vocab = nullptr);

void write_report_csv(const std::filesystem::path& path, const MetricReport& report);
void write_correlations_csv(const std::filesystem::path& path, const MetricReport& report);

double pearson(const std::vector<double>& a, const std::vector<double>& b);
std::vector<double> ranks(const std::vector<double>& values); // average ranks for ties

// Probe features from a model's context latents: one row per window, labelled
// by the target unit's vowel. Windows without a vowel nucleus are skipped.
struct ProbeDataset {
  util::RealMatrix features;
  std::vector<int> labels;
};
ProbeDataset latent_probe_dataset(const speechlm::SpeechLmModel<float>& model,
                                  const speechlm::WindowData& data);
ProbeDataset artic_probe_dataset(const speechlm::WindowData& data,
                                 const std::vector<corpus::UnitSequence>& seqs);

} // namespace sublm::evalprobe
