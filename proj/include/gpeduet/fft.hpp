#pragma once

#include <complex>
#include <span>

namespace gpeduet::fft {

// In-place unnormalized DFTs backed by FFTW. Plans are cached per length and
// shared across threads; a given length always runs the same plan, so results
// are bit-reproducible.
void forward(std::span<std::complex<double>> data);
void backward(std::span<std::complex<double>> data);

}  // namespace gpeduet::fft
