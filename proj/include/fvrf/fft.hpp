#pragma once

#include <complex>
#include <vector>

namespace fvrf::fft {

// Thin wrappers over FFTW with a process-wide plan cache. Planning uses
// FFTW_ESTIMATE so results are reproducible run to run; execution is
// thread-safe on distinct buffers.

// Forward real DFT of length n; returns the n/2+1 half-complex spectrum,
// unnormalized: X_k = sum_j x_j exp(-2*pi*i*j*k/n).
std::vector<std::complex<double>> rfft(const std::vector<double>& x);

// Inverse of rfft without any normalization: x_j = sum_k X_k exp(+2*pi*i*j*k/n)
// over the full Hermitian spectrum. Placing continuum Fourier coefficients in
// `spec` therefore synthesizes the field directly.
std::vector<double> irfft(const std::vector<std::complex<double>>& spec, int n);

// 2D DST-I (FFTW RODFT00) of an n-by-n block, row-major, unnormalized.
// Applying it twice multiplies by (2*(n+1))^2.
std::vector<double> dst2d(const std::vector<double>& v, int n);

// 2D DCT-I (FFTW REDFT00) of an r-by-r array, row-major, unnormalized.
std::vector<double> dct2d(const std::vector<double>& v, int r);

}  // namespace fvrf::fft
