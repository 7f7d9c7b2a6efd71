#pragma once

#include <filesystem>
#include <vector>

namespace sublm::dsp {

struct AudioBuffer {
  std::vector<double> samples; // amplitudes in [-1, 1]
  int sample_rate = 22050;

  double duration_seconds() const {
    return sample_rate > 0 ? static_cast<double>(samples.size()) / sample_rate : 0.0;
  }
};

// RIFF/WAVE PCM 16-bit mono. Samples are scaled to [-1, 1] by /32768.
AudioBuffer load_wav(const std::filesystem::path& path);

// Writes PCM16 mono; samples are clamped to [-1, 1].
void save_wav(const std::filesystem::path& path, const AudioBuffer& audio);

} // namespace sublm::dsp
