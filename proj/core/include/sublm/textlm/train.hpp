#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <vector>

#include "sublm/textlm/lm.hpp"
#include "sublm/textlm/vocab.hpp"

namespace sublm::textlm {

struct TextLmTrainOptions {
  size_t epochs = 30;
  size_t bptt = 32;
  size_t batch = 16;
  double lr = 1e-3;
  double clip_norm = 5.0;
  uint64_t seed = 1;
};

struct TextLmEpoch {
  size_t epoch = 0;
  double train_ce = 0.0; // mean per-token cross entropy
  double val_ppl = 0.0;  // 0 when no validation stream was given
  double val_acc = 0.0;
};

struct TextLmTrainResult {
  TextLm<float> model;
  std::vector<TextLmEpoch> epochs;
  std::string init_kind; // "cbow" or "random", recorded in the checkpoint
};

// Trains the LM on encoded utterances; the embedding starts from CBOW input
// vectors when `init` is given. Deterministic for a fixed seed.
TextLmTrainResult lm_train(const std::vector<std::vector<size_t>>& train_utts, size_t vocab_size,
                           const TextLmConfig& cfg, const CbowParams* init,
                           const TextLmTrainOptions& opts,
                           const std::vector<std::vector<size_t>>* val_utts = nullptr);

struct LmEvaluation {
  double perplexity = 0.0;
  double accuracy = 0.0;
  size_t n_tokens = 0;
};

// Per-utterance teacher-forced evaluation, starting each utterance from BOS.
LmEvaluation evaluate_lm(const TextLm<float>& model,
                         const std::vector<std::vector<size_t>>& utts);

// Add-one-smoothed unigram baseline perplexity (counting oracle).
double unigram_perplexity(const std::vector<std::vector<size_t>>& train_utts,
                          const std::vector<std::vector<size_t>>& eval_utts, size_t vocab_size);

// Checkpoint I/O (ndl format, header field component=textlm).
void save_textlm(const std::filesystem::path& path, TextLm<float>& model,
                 const std::string& init_kind, uint64_t seed);
TextLm<float> load_textlm(const std::filesystem::path& path);

} // namespace sublm::textlm
