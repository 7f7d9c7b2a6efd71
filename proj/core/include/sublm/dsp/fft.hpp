#pragma once

#include <complex>
#include <vector>

namespace sublm::dsp {

// In-place radix-2 Cooley-Tukey. Size must be a power of two.
void fft_inplace(std::vector<std::complex<double>>& a, bool inverse = false);

// DFT of a real frame; returns the fft_size/2+1 one-sided spectrum.
std::vector<std::complex<double>> rfft(const std::vector<double>& frame);

} // namespace sublm::dsp
