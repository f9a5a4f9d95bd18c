#pragma once

#include <complex>
#include <span>
#include <vector>

namespace radarmon {

/// Unnormalized forward DFT: X[k] = sum_n x[n] exp(-2 pi j k n / N).
void fft_forward(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

/// Unnormalized inverse DFT: x[n] = sum_k X[k] exp(+2 pi j k n / N).
void fft_inverse(std::span<const std::complex<double>> in, std::span<std::complex<double>> out);

std::vector<std::complex<double>> fft_forward(std::span<const std::complex<double>> in);
std::vector<std::complex<double>> fft_inverse(std::span<const std::complex<double>> in);

/// Moves the zero-frequency bin to index N/2.
template <class T>
void fft_shift(std::span<T> v) {
  const auto half = v.size() / 2;
  std::vector<T> tmp(v.begin(), v.end());
  for (std::size_t i = 0; i < v.size(); ++i) v[(i + half) % v.size()] = tmp[i];
}

}  // namespace radarmon
