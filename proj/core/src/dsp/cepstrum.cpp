#include "sublm/dsp/cepstrum.hpp"

#include <cmath>

#include "sublm/error.hpp"

namespace sublm::dsp {

std::vector<double> dct_ii_ortho(const std::vector<double>& x) {
  const size_t n = x.size();
  if (n == 0) throw ValidationError("dct: empty input");
  std::vector<double> out(n, 0.0);
  const double s0 = std::sqrt(1.0 / static_cast<double>(n));
  const double sk = std::sqrt(2.0 / static_cast<double>(n));
  for (size_t k = 0; k < n; ++k) {
    double acc = 0.0;
    for (size_t m = 0; m < n; ++m)
      acc += x[m] * std::cos(M_PI * static_cast<double>(k) * (static_cast<double>(m) + 0.5) /
                             static_cast<double>(n));
    out[k] = (k == 0 ? s0 : sk) * acc;
  }
  return out;
}

util::RealMatrix mel_cepstrum(const MelSpectrogram& mel, size_t n_coeffs) {
  if (n_coeffs == 0 || n_coeffs >= mel.n_mels)
    throw ValidationError("mel_cepstrum: need 0 < n_coeffs < mel_bins");
  util::RealMatrix out(mel.n_frames, n_coeffs);
  std::vector<double> frame(mel.n_mels);
  for (size_t t = 0; t < mel.n_frames; ++t) {
    for (size_t m = 0; m < mel.n_mels; ++m) frame[m] = mel.at(t, m);
    const std::vector<double> coeffs = dct_ii_ortho(frame);
    for (size_t k = 0; k < n_coeffs; ++k) out.at(t, k) = coeffs[k + 1];
  }
  return out;
}

} // namespace sublm::dsp
