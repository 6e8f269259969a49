/**
 * Copyright 2026 The ambiloc Authors
 *
 * Licensed under the Apache License, Version 2.0 (the "License");
 * you may not use this file except in compliance with the License.
 * You may obtain a copy of the License at
 *
 * http://www.apache.org/licenses/LICENSE-2.0
 *
 * Unless required by applicable law or agreed to in writing, software
 * distributed under the License is distributed on an "AS IS" BASIS,
 * WITHOUT WARRANTIES OR CONDITIONS OF ANY KIND, either express or implied.
 * See the License for the specific language governing permissions and
 * limitations under the License.
 */

#include "ambiloc/fft.hpp"

#include <stdexcept>
#include <unsupported/Eigen/FFT>

namespace ambiloc::fft {

namespace {

// Eigen::FFT caches twiddle tables per instance and is not thread-safe.
Eigen::FFT<double>& engine() {
  thread_local Eigen::FFT<double> instance = [] {
    Eigen::FFT<double> f;
    f.SetFlag(Eigen::FFT<double>::HalfSpectrum);
    return f;
  }();
  return instance;
}

}  // namespace

std::vector<Complex> rfft(std::span<const double> x, std::size_t n) {
  if (n == 0 || n % 2 != 0) throw std::invalid_argument("fft: size must be even and positive");
  std::vector<double> padded(n, 0.0);
  std::copy_n(x.begin(), std::min(n, x.size()), padded.begin());
  std::vector<Complex> out;
  engine().fwd(out, padded);
  out.resize(n / 2 + 1);
  return out;
}

std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n) {
  if (spectrum.size() != n / 2 + 1) throw std::invalid_argument("fft: spectrum size mismatch");
  std::vector<Complex> half(spectrum.begin(), spectrum.end());
  std::vector<double> out;
  engine().inv(out, half, static_cast<Eigen::Index>(n));
  return out;
}

std::size_t next_pow2(std::size_t n) {
  std::size_t p = 1;
  while (p < n) p <<= 1;
  return p;
}

}  // namespace ambiloc::fft
