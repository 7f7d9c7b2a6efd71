#pragma once

#include "sublm/dsp/cepstrum.hpp"
#include "sublm/dsp/mel.hpp"

namespace sublm::evalprobe {

// 10*sqrt(2)/ln(10), the usual mel-cepstral-distortion scaling.
inline constexpr double kMcdConstant = 6.141851463713754;

struct McdResult {
  enum class Alignment { plain, dtw };
  double value = 0.0;        // kMcdConstant * mean ||delta c|| over the path
  size_t frames_compared = 0; // aligned frame pairs (path nodes)
  Alignment alignment = Alignment::dtw;
};

// DTW-aligned MCD over cepstra c1..c13. Among minimum-cost monotone paths the
// shortest is used, which keeps mcd(a,b) == mcd(b,a) exactly.
McdResult mcd(const dsp::MelSpectrogram& ref, const dsp::MelSpectrogram& gen,
              size_t n_coeffs = 13);

// Frame-by-frame MCD for equal-length spectrograms (the diagonal alignment).
McdResult mcd_plain(const dsp::MelSpectrogram& ref, const dsp::MelSpectrogram& gen,
                    size_t n_coeffs = 13);

// DTW over raw cepstra matrices; exposed for the path-enumeration oracle.
McdResult mcd_from_cepstra(const util::RealMatrix& ref, const util::RealMatrix& gen);

} // namespace sublm::evalprobe
