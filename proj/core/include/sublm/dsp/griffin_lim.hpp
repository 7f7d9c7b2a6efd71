#pragma once

#include <vector>

#include "sublm/dsp/audio.hpp"
#include "sublm/dsp/mel.hpp"

namespace sublm::dsp {

struct GriffinLimOptions {
  size_t iters = 0;          // 0 = use cfg.griffin_lim_iters
  bool peak_normalize = true; // scale output peak to 0.95
  std::vector<double>* error_trace = nullptr; // per-iteration |M - |STFT(x)|| Frobenius error
};

// Renders a log-mel spectrogram to audio: pseudo-inverse filterbank projection
// (clamped at zero), then iterative phase recovery against the estimated
// magnitude spectrogram. Output length is fft_size + (T-1)*hop samples.
AudioBuffer griffin_lim(const MelSpectrogram& mel, const DspConfig& cfg,
                        const GriffinLimOptions& opts = {});

} // namespace sublm::dsp
