#include "sublm/dsp/mel.hpp"

#include <cmath>
#include <fstream>
#include <sstream>

#include "sublm/dsp/fft.hpp"
#include "sublm/error.hpp"
#include "sublm/util/io.hpp"

namespace sublm::dsp {

double DspConfig::log_floor_value() const { return std::log(log_floor); }

void DspConfig::validate() const {
  if (sample_rate <= 0) throw ValidationError("dsp: sample_rate must be positive");
  if (fft_size == 0 || (fft_size & (fft_size - 1)) != 0)
    throw ValidationError("dsp: fft_size must be a power of two");
  if (hop == 0 || hop > fft_size) throw ValidationError("dsp: need 0 < hop <= fft_size");
  if (mel_bins < 2) throw ValidationError("dsp: mel_bins must be >= 2");
  if (fmax > sample_rate / 2.0) throw ValidationError("dsp: fmax above Nyquist");
  if (fmin < 0.0 || fmin >= fmax) throw ValidationError("dsp: need 0 <= fmin < fmax");
  if (log_floor <= 0.0) throw ValidationError("dsp: log_floor must be positive");
}

std::string DspConfig::id() const {
  std::ostringstream os;
  os << "sr" << sample_rate << "_fft" << fft_size << "_hop" << hop << "_mel" << mel_bins << "_f"
     << fmin << "-" << fmax;
  return os.str();
}

MelSpectrogram MelSpectrogram::slice_rows(size_t begin, size_t end) const {
  if (begin > end || end > n_frames) throw ValidationError("mel slice out of range");
  MelSpectrogram out;
  out.n_frames = end - begin;
  out.n_mels = n_mels;
  out.hop_seconds = hop_seconds;
  out.config_id = config_id;
  out.values.assign(values.begin() + static_cast<ptrdiff_t>(begin * n_mels),
                    values.begin() + static_cast<ptrdiff_t>(end * n_mels));
  return out;
}

double mel_scale(double f_hz) {
  if (f_hz < 0.0) throw ValidationError("mel_scale: negative frequency");
  return 2595.0 * std::log10(1.0 + f_hz / 700.0);
}

double mel_to_hz(double mel) { return 700.0 * (std::pow(10.0, mel / 2595.0) - 1.0); }

MelFilterbank MelFilterbank::build(const DspConfig& cfg) {
  cfg.validate();
  MelFilterbank fb;
  fb.mel_bins = cfg.mel_bins;
  fb.freq_bins = cfg.freq_bins();
  fb.weights = util::RealMatrix(fb.mel_bins, fb.freq_bins);

  const double mel_min = mel_scale(cfg.fmin);
  const double mel_max = mel_scale(cfg.fmax);
  std::vector<double> hz_pts(cfg.mel_bins + 2);
  fb.center_freqs_mel.resize(cfg.mel_bins);
  for (size_t i = 0; i < hz_pts.size(); ++i) {
    const double mel = mel_min + (mel_max - mel_min) * static_cast<double>(i) /
                                     static_cast<double>(cfg.mel_bins + 1);
    hz_pts[i] = mel_to_hz(mel);
    if (i >= 1 && i <= cfg.mel_bins) fb.center_freqs_mel[i - 1] = mel;
  }

  const double bin_hz = static_cast<double>(cfg.sample_rate) / static_cast<double>(cfg.fft_size);
  for (size_t m = 0; m < cfg.mel_bins; ++m) {
    const double left = hz_pts[m], center = hz_pts[m + 1], right = hz_pts[m + 2];
    for (size_t k = 0; k < fb.freq_bins; ++k) {
      const double f = static_cast<double>(k) * bin_hz;
      double w = 0.0;
      if (f > left && f <= center && center > left) {
        w = (f - left) / (center - left);
      } else if (f > center && f < right && right > center) {
        w = (right - f) / (right - center);
      }
      fb.weights.at(m, k) = w;
    }
  }
  return fb;
}

void MelFilterbank::apply(const double* power, double* out) const {
  for (size_t m = 0; m < mel_bins; ++m) {
    const double* row = weights.row(m);
    double acc = 0.0;
    for (size_t k = 0; k < freq_bins; ++k) acc += row[k] * power[k];
    out[m] = acc;
  }
}

size_t frame_count(size_t n_samples, const DspConfig& cfg) {
  if (n_samples < cfg.fft_size) return 0;
  return (n_samples - cfg.fft_size) / cfg.hop + 1;
}

namespace {

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

} // namespace

util::RealMatrix stft_magnitudes(const std::vector<double>& samples, const DspConfig& cfg) {
  const size_t n_frames = frame_count(samples.size(), cfg);
  const size_t n_bins = cfg.freq_bins();
  const std::vector<double> window = hann_window(cfg.fft_size);
  util::RealMatrix mags(n_frames, n_bins);
  std::vector<double> frame(cfg.fft_size);
  for (size_t t = 0; t < n_frames; ++t) {
    const size_t off = t * cfg.hop;
    for (size_t i = 0; i < cfg.fft_size; ++i) frame[i] = samples[off + i] * window[i];
    const auto spec = rfft(frame);
    for (size_t k = 0; k < n_bins; ++k) mags.at(t, k) = std::abs(spec[k]);
  }
  return mags;
}

MelSpectrogram melspectrogram(const AudioBuffer& audio, const DspConfig& cfg) {
  cfg.validate();
  if (audio.sample_rate != cfg.sample_rate)
    throw ValidationError("melspectrogram: audio sample rate " +
                          std::to_string(audio.sample_rate) + " does not match config " +
                          std::to_string(cfg.sample_rate));
  if (audio.samples.size() < cfg.fft_size)
    throw ValidationError("melspectrogram: audio shorter than one analysis window");

  const MelFilterbank fb = MelFilterbank::build(cfg);
  const util::RealMatrix mags = stft_magnitudes(audio.samples, cfg);

  MelSpectrogram mel;
  mel.n_frames = mags.rows;
  mel.n_mels = cfg.mel_bins;
  mel.hop_seconds = cfg.hop_seconds();
  mel.config_id = cfg.id();
  mel.values.resize(mel.n_frames * mel.n_mels);

  std::vector<double> power(fb.freq_bins);
  for (size_t t = 0; t < mel.n_frames; ++t) {
    const double* mrow = mags.row(t);
    for (size_t k = 0; k < fb.freq_bins; ++k) power[k] = mrow[k] * mrow[k];
    fb.apply(power.data(), mel.frame(t));
    for (size_t m = 0; m < mel.n_mels; ++m)
      mel.at(t, m) = std::log(std::max(mel.at(t, m), cfg.log_floor));
  }
  return mel;
}

void write_mels(const std::filesystem::path& path, const MelSpectrogram& mel) {
  std::ofstream os(path, std::ios::binary);
  if (!os) throw IoError("cannot write mels file: " + path.string());
  os.write("MELS", 4);
  util::write_u32(os, 1);
  util::write_u32(os, static_cast<uint32_t>(mel.n_frames));
  util::write_u32(os, static_cast<uint32_t>(mel.n_mels));
  util::write_f64(os, mel.hop_seconds);
  std::vector<float> buf(mel.values.size());
  for (size_t i = 0; i < buf.size(); ++i) buf[i] = static_cast<float>(mel.values[i]);
  util::write_f32_array(os, buf.data(), buf.size());
  if (!os) throw IoError("write failed: " + path.string());
}

MelSpectrogram read_mels(const std::filesystem::path& path) {
  std::ifstream is(path, std::ios::binary);
  if (!is) throw IoError("cannot open mels file: " + path.string());
  char magic[4];
  is.read(magic, 4);
  if (is.gcount() != 4 || std::string(magic, 4) != "MELS")
    throw IoError("bad mels magic: " + path.string());
  const uint32_t version = util::read_u32(is, "mels version");
  if (version != 1) throw IoError("unsupported mels version: " + path.string());
  MelSpectrogram mel;
  mel.n_frames = util::read_u32(is, "mels frame count");
  mel.n_mels = util::read_u32(is, "mels bin count");
  mel.hop_seconds = util::read_f64(is, "mels hop");
  std::vector<float> buf(mel.n_frames * mel.n_mels);
  util::read_f32_array(is, buf.data(), buf.size(), "mels data");
  mel.values.assign(buf.begin(), buf.end());
  return mel;
}

} // namespace sublm::dsp
