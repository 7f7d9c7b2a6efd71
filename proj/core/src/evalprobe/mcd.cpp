#include "sublm/evalprobe/mcd.hpp"

#include <cmath>
#include <limits>

#include "sublm/error.hpp"

namespace sublm::evalprobe {

namespace {

double local_cost(const util::RealMatrix& a, size_t i, const util::RealMatrix& b, size_t j) {
  double acc = 0.0;
  for (size_t k = 0; k < a.cols; ++k) {
    const double d = a.at(i, k) - b.at(j, k);
    acc += d * d;
  }
  return std::sqrt(acc);
}

void check_compatible(const dsp::MelSpectrogram& ref, const dsp::MelSpectrogram& gen) {
  if (ref.n_frames == 0 || gen.n_frames == 0)
    throw ValidationError("mcd: empty spectrogram");
  if (ref.n_mels != gen.n_mels) throw ValidationError("mcd: mel bin mismatch");
  if (!ref.config_id.empty() && !gen.config_id.empty() && ref.config_id != gen.config_id)
    throw ValidationError("mcd: spectrograms come from different DSP configs");
}

} // namespace

McdResult mcd_from_cepstra(const util::RealMatrix& ref, const util::RealMatrix& gen) {
  if (ref.rows == 0 || gen.rows == 0) throw ValidationError("mcd: empty cepstra");
  if (ref.cols != gen.cols) throw ValidationError("mcd: coefficient count mismatch");

  const size_t n = ref.rows, m = gen.rows;
  std::vector<double> cost(n * m, 0.0);
  std::vector<size_t> length(n * m, 0); // path nodes of the best path into the cell

  for (size_t i = 0; i < n; ++i) {
    for (size_t j = 0; j < m; ++j) {
      const double local = local_cost(ref, i, gen, j);
      double best_cost;
      size_t best_len;
      if (i == 0 && j == 0) {
        best_cost = 0.0;
        best_len = 0;
      } else {
        best_cost = std::numeric_limits<double>::infinity();
        best_len = 0;
        auto consider = [&](size_t pi, size_t pj) {
          const double c = cost[pi * m + pj];
          const size_t l = length[pi * m + pj];
          if (c < best_cost || (c == best_cost && l < best_len)) {
            best_cost = c;
            best_len = l;
          }
        };
        if (i > 0 && j > 0) consider(i - 1, j - 1);
        if (i > 0) consider(i - 1, j);
        if (j > 0) consider(i, j - 1);
      }
      cost[i * m + j] = best_cost + local;
      length[i * m + j] = best_len + 1;
    }
  }

  McdResult out;
  out.alignment = McdResult::Alignment::dtw;
  out.frames_compared = length[n * m - 1];
  out.value = kMcdConstant * cost[n * m - 1] / static_cast<double>(out.frames_compared);
  return out;
}

McdResult mcd(const dsp::MelSpectrogram& ref, const dsp::MelSpectrogram& gen, size_t n_coeffs) {
  check_compatible(ref, gen);
  return mcd_from_cepstra(dsp::mel_cepstrum(ref, n_coeffs), dsp::mel_cepstrum(gen, n_coeffs));
}

McdResult mcd_plain(const dsp::MelSpectrogram& ref, const dsp::MelSpectrogram& gen,
                    size_t n_coeffs) {
  check_compatible(ref, gen);
  if (ref.n_frames != gen.n_frames)
    throw ValidationError("mcd_plain: needs equal-length spectrograms");
  const auto a = dsp::mel_cepstrum(ref, n_coeffs);
  const auto b = dsp::mel_cepstrum(gen, n_coeffs);
  double acc = 0.0;
  for (size_t t = 0; t < a.rows; ++t) acc += local_cost(a, t, b, t);
  McdResult out;
  out.alignment = McdResult::Alignment::plain;
  out.frames_compared = a.rows;
  out.value = kMcdConstant * acc / static_cast<double>(a.rows);
  return out;
}

} // namespace sublm::evalprobe
