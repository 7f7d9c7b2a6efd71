#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "sublm/dsp/audio.hpp"
#include "sublm/util/matrix.hpp"

namespace sublm::dsp {

struct DspConfig {
  int sample_rate = 22050;
  size_t fft_size = 1024;
  size_t hop = 128;
  size_t mel_bins = 80;
  double fmin = 0.0;
  double fmax = 8000.0;
  double log_floor = 1e-5; // floor on filterbank power before the log
  size_t griffin_lim_iters = 60;

  double hop_seconds() const { return static_cast<double>(hop) / sample_rate; }
  size_t freq_bins() const { return fft_size / 2 + 1; }
  double log_floor_value() const; // ln(log_floor)

  void validate() const;
  std::string id() const;
};

// Time-major log-mel matrix (T × M, natural log of filterbank power).
struct MelSpectrogram {
  size_t n_frames = 0;
  size_t n_mels = 0;
  std::vector<double> values; // row-major
  double hop_seconds = 0.0;
  std::string config_id;

  double& at(size_t t, size_t m) { return values[t * n_mels + m]; }
  double at(size_t t, size_t m) const { return values[t * n_mels + m]; }
  const double* frame(size_t t) const { return values.data() + t * n_mels; }
  double* frame(size_t t) { return values.data() + t * n_mels; }

  MelSpectrogram slice_rows(size_t begin, size_t end) const;
};

// HTK mel scale, m = 2595 log10(1 + f/700). f must be >= 0.
double mel_scale(double f_hz);
double mel_to_hz(double mel);

// Triangular mel filterbank, rows mel_bins × (fft_size/2+1), unnormalized.
struct MelFilterbank {
  size_t mel_bins = 0;
  size_t freq_bins = 0;
  util::RealMatrix weights;              // mel_bins × freq_bins
  std::vector<double> center_freqs_mel;  // triangle peaks, in mel

  static MelFilterbank build(const DspConfig& cfg);

  // out[m] = sum_k w[m][k] power[k]
  void apply(const double* power, double* out) const;
};

// Number of analysis frames for a given sample count: floor((len-fft)/hop)+1.
size_t frame_count(size_t n_samples, const DspConfig& cfg);

// Hann-windowed STFT power -> mel filterbank -> ln(max(power, log_floor)).
MelSpectrogram melspectrogram(const AudioBuffer& audio, const DspConfig& cfg);

// Per-frame STFT magnitudes (T × fft/2+1); shared by melspectrogram and the
// Griffin-Lim loop.
util::RealMatrix stft_magnitudes(const std::vector<double>& samples, const DspConfig& cfg);

// "MELS" cache file: magic, u32 version=1, u32 T, u32 M, f64 hop_seconds,
// then T*M little-endian f32 values frame-major.
void write_mels(const std::filesystem::path& path, const MelSpectrogram& mel);
MelSpectrogram read_mels(const std::filesystem::path& path);

} // namespace sublm::dsp
