#pragma once

#include <vector>

#include "sublm/dsp/mel.hpp"
#include "sublm/util/matrix.hpp"

namespace sublm::dsp {

// Orthonormal DCT-II of a real vector.
std::vector<double> dct_ii_ortho(const std::vector<double>& x);

// Per-frame mel cepstra c1..c{n_coeffs} (c0 excluded); returns T × n_coeffs.
util::RealMatrix mel_cepstrum(const MelSpectrogram& mel, size_t n_coeffs = 13);

} // namespace sublm::dsp
