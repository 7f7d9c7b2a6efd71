#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublm/cli/config.hpp"
#include "sublm/corpus/units.hpp"
#include "sublm/ndl/gradcheck.hpp"

namespace sublm::cli {

// Subcommand entry points. Each artifact-producing command writes its
// effective config, seed and input hashes into the output directory.

// synth-corpus: deterministic synthetic corpus under paths.corpus_dir.
void cmd_synth_corpus(const Config& cfg, bool force = false);

// preprocess: slice melspectrograms into filtered units under paths.cache_dir.
struct PreprocessSummary {
  size_t n_utts = 0;
  size_t n_units = 0;
  corpus::DropCounts drops;
};
PreprocessSummary cmd_preprocess(const Config& cfg);

// Cache access shared by the training/eval commands.
struct UnitCache {
  corpus::UnitKind kind = corpus::UnitKind::syllable;
  std::vector<corpus::UnitSequence> sequences;
};
UnitCache load_unit_cache(const std::filesystem::path& cache_dir);

// train: speech LM variant on a preprocessed cache, into paths.out_dir.
void cmd_train(const Config& cfg);

// train-textlm: CBOW pretraining + LSTM LM on the cache's token stream.
void cmd_train_textlm(const Config& cfg);

// babble: free-running generation from a trained checkpoint.
void cmd_babble(const Config& cfg);

// eval: metric report over one or more checkpoints.
void cmd_eval(const Config& cfg);

// probe: post-hoc vowel classifier on a chosen feature source.
struct ProbeSummary {
  double accuracy = 0.0;
  bool majority_flag = false;
};
ProbeSummary cmd_probe(const Config& cfg);

// gradcheck: finite-difference check of one variant at tiny dims.
ndl::GradCheckResult cmd_gradcheck(const Config& cfg);

} // namespace sublm::cli
