#include "sublm/dsp/griffin_lim.hpp"

#include <cmath>
#include <complex>

#include "sublm/dsp/fft.hpp"
#include "sublm/error.hpp"
#include "sublm/util/matrix.hpp"

namespace sublm::dsp {

namespace {

// Solve (A + ridge I) X = B for SPD A via Cholesky; A is n×n, B n×m, X n×m.
util::RealMatrix cholesky_solve(util::RealMatrix a, util::RealMatrix b, double ridge) {
  const size_t n = a.rows;
  for (size_t i = 0; i < n; ++i) a.at(i, i) += ridge;

  // in-place lower Cholesky
  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j <= i; ++j) {
      double sum = a.at(i, j);
      for (size_t k = 0; k < j; ++k) sum -= a.at(i, k) * a.at(j, k);
      if (i == j) {
        if (sum <= 0.0) throw NumericError("filterbank normal matrix not positive definite");
        a.at(i, i) = std::sqrt(sum);
      } else {
        a.at(i, j) = sum / a.at(j, j);
      }
    }
  }

  const size_t m = b.cols;
  // forward substitution L y = b
  for (size_t col = 0; col < m; ++col) {
    for (size_t i = 0; i < n; ++i) {
      double sum = b.at(i, col);
      for (size_t k = 0; k < i; ++k) sum -= a.at(i, k) * b.at(k, col);
      b.at(i, col) = sum / a.at(i, i);
    }
    // back substitution L^T x = y
    for (size_t i = n; i-- > 0;) {
      double sum = b.at(i, col);
      for (size_t k = i + 1; k < n; ++k) sum -= a.at(k, i) * b.at(k, col);
      b.at(i, col) = sum / a.at(i, i);
    }
  }
  return b;
}

std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) / static_cast<double>(n)));
  return w;
}

using ComplexFrame = std::vector<std::complex<double>>;

std::vector<ComplexFrame> stft_complex(const std::vector<double>& samples, const DspConfig& cfg,
                                       const std::vector<double>& window) {
  const size_t n_frames = frame_count(samples.size(), cfg);
  std::vector<ComplexFrame> frames(n_frames);
  std::vector<double> buf(cfg.fft_size);
  for (size_t t = 0; t < n_frames; ++t) {
    const size_t off = t * cfg.hop;
    for (size_t i = 0; i < cfg.fft_size; ++i) buf[i] = samples[off + i] * window[i];
    frames[t] = rfft(buf);
  }
  return frames;
}

// Least-squares inverse STFT: windowed overlap-add divided by the summed
// squared window.
std::vector<double> istft(const std::vector<ComplexFrame>& frames, const DspConfig& cfg,
                          const std::vector<double>& window) {
  const size_t n_frames = frames.size();
  const size_t out_len = cfg.fft_size + (n_frames - 1) * cfg.hop;
  std::vector<double> num(out_len, 0.0), den(out_len, 0.0);
  std::vector<std::complex<double>> full(cfg.fft_size);
  for (size_t t = 0; t < n_frames; ++t) {
    for (size_t k = 0; k < cfg.freq_bins(); ++k) full[k] = frames[t][k];
    for (size_t k = cfg.freq_bins(); k < cfg.fft_size; ++k)
      full[k] = std::conj(frames[t][cfg.fft_size - k]);
    fft_inplace(full, /*inverse=*/true);
    const size_t off = t * cfg.hop;
    for (size_t i = 0; i < cfg.fft_size; ++i) {
      num[off + i] += window[i] * full[i].real();
      den[off + i] += window[i] * window[i];
    }
  }
  // Edge samples are covered by almost no window mass; flooring the
  // denominator attenuates them instead of amplifying ringing.
  double den_max = 0.0;
  for (double d : den) den_max = std::max(den_max, d);
  const double den_floor = std::max(1e-3 * den_max, 1e-12);
  for (size_t i = 0; i < out_len; ++i) num[i] /= std::max(den[i], den_floor);
  return num;
}

} // namespace

AudioBuffer griffin_lim(const MelSpectrogram& mel, const DspConfig& cfg,
                        const GriffinLimOptions& opts) {
  cfg.validate();
  if (mel.n_mels != cfg.mel_bins)
    throw ValidationError("griffin_lim: mel bin count does not match config");
  if (mel.n_frames == 0) return AudioBuffer{{}, cfg.sample_rate};

  const MelFilterbank fb = MelFilterbank::build(cfg);
  const size_t n_bins = fb.freq_bins;

  // Pseudo-inverse projection: W^T (W W^T)^-1, applied to mel power.
  util::RealMatrix wwt(cfg.mel_bins, cfg.mel_bins);
  for (size_t i = 0; i < cfg.mel_bins; ++i)
    for (size_t j = 0; j <= i; ++j) {
      double acc = 0.0;
      for (size_t k = 0; k < n_bins; ++k) acc += fb.weights.at(i, k) * fb.weights.at(j, k);
      wwt.at(i, j) = acc;
      wwt.at(j, i) = acc;
    }
  // Solve (W W^T) C = W, then spectral power = C^T melpower.
  const util::RealMatrix coeff = cholesky_solve(wwt, fb.weights, 1e-10);

  const size_t n_frames = mel.n_frames;
  util::RealMatrix target_mag(n_frames, n_bins);
  std::vector<double> mel_power(cfg.mel_bins);
  for (size_t t = 0; t < n_frames; ++t) {
    for (size_t m = 0; m < cfg.mel_bins; ++m) mel_power[m] = std::exp(mel.at(t, m));
    for (size_t k = 0; k < n_bins; ++k) {
      double acc = 0.0;
      for (size_t m = 0; m < cfg.mel_bins; ++m) acc += coeff.at(m, k) * mel_power[m];
      target_mag.at(t, k) = std::sqrt(std::max(acc, 0.0));
    }
  }

  const std::vector<double> window = hann_window(cfg.fft_size);
  const size_t iters = opts.iters ? opts.iters : cfg.griffin_lim_iters;

  // Zero-phase start keeps the reconstruction deterministic.
  std::vector<ComplexFrame> spec(n_frames, ComplexFrame(n_bins));
  for (size_t t = 0; t < n_frames; ++t)
    for (size_t k = 0; k < n_bins; ++k) spec[t][k] = {target_mag.at(t, k), 0.0};
  std::vector<double> x = istft(spec, cfg, window);

  for (size_t it = 0; it < iters; ++it) {
    const auto analyzed = stft_complex(x, cfg, window);
    if (opts.error_trace) {
      double err = 0.0;
      for (size_t t = 0; t < n_frames; ++t)
        for (size_t k = 0; k < n_bins; ++k) {
          const double d = std::abs(analyzed[t][k]) - target_mag.at(t, k);
          err += d * d;
        }
      opts.error_trace->push_back(std::sqrt(err));
    }
    for (size_t t = 0; t < n_frames; ++t)
      for (size_t k = 0; k < n_bins; ++k) {
        const double mag = std::abs(analyzed[t][k]);
        spec[t][k] = mag > 1e-300 ? analyzed[t][k] * (target_mag.at(t, k) / mag)
                                  : std::complex<double>(target_mag.at(t, k), 0.0);
      }
    x = istft(spec, cfg, window);
  }

  AudioBuffer out;
  out.sample_rate = cfg.sample_rate;
  out.samples = std::move(x);
  if (opts.peak_normalize) {
    double peak = 0.0;
    for (double s : out.samples) peak = std::max(peak, std::abs(s));
    if (peak > 0.0) {
      const double scale = 0.95 / peak;
      for (double& s : out.samples) s *= scale;
    }
  }
  return out;
}

} // namespace sublm::dsp
