#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublm/speechlm/data.hpp"
#include "sublm/speechlm/model.hpp"

namespace sublm::speechlm {

struct SpeechTrainOptions {
  double lr = 1e-3;
  size_t batch = 32;
  size_t epochs = 50;    // ignored when max_steps is set
  size_t max_steps = 0;  // total optimizer steps; 0 = run all epochs
  double clip_norm = 5.0;
  double val_fraction = 0.1;
  uint64_t seed = 1;
  // Batch gradient accumulation fans out over this many workers with fixed
  // sample slices and an order-fixed reduction; runs are deterministic for a
  // given (seed, jobs) pair.
  size_t jobs = 1;
};

struct EpochRow {
  size_t epoch = 0;
  double train_loss = 0.0;
  double val_loss = 0.0;
  double val_mse = 0.0;
  double val_bce = 0.0;
};

struct SpeechTrainResult {
  SpeechLmModel<float> model; // last good parameters
  std::vector<EpochRow> curve;
  size_t steps_taken = 0;
  double initial_train_mse = 0.0; // before the first update
  bool diverged = false;
  std::string divergence_message;
};

// Deterministic mini-batch Adam training with teacher forcing. On divergence
// (non-finite loss) the model from the last completed epoch is returned with
// `diverged` set.
SpeechTrainResult train_speechlm(const std::vector<WindowSample<float>>& windows,
                                 const SpeechLmConfig& cfg, const SpeechTrainOptions& opts);

// Loss over a window set without updating anything.
LossBreakdown evaluate_speechlm(const SpeechLmModel<float>& model,
                                const std::vector<WindowSample<float>>& windows);

// Loss curve CSV: epoch,train_loss,val_loss,val_mse,val_bce.
void write_loss_curve(const std::filesystem::path& path, const std::vector<EpochRow>& curve);

// Checkpoint I/O; the header carries the full config so load reconstructs it.
void save_speechlm(const std::filesystem::path& path, SpeechLmModel<float>& model, uint64_t seed);
SpeechLmModel<float> load_speechlm(const std::filesystem::path& path);

} // namespace sublm::speechlm
