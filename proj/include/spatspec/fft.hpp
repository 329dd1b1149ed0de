#pragma once

/// @file fft.hpp
/// Thin FFTW wrapper. Arrays are stored with the first index fastest
/// (index i1 * n0 + i0), matching Region and GridNodes.

#include <complex>
#include <vector>

namespace spatspec {

/// In-place unnormalized DFT of an n0 x n1 array.
/// sign = -1: X(k) = sum x(n) exp(-2 pi i k n / N); sign = +1 the inverse kernel.
void fft_inplace(std::vector<std::complex<double>>& data, int n0, int n1, int sign);

/// Smallest 2^a 3^b 5^c 7^d >= n.
int good_fft_size(int n);

}  // namespace spatspec
