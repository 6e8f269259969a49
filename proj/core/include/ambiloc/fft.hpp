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

#pragma once

#include <complex>
#include <cstddef>
#include <span>
#include <vector>

namespace ambiloc::fft {

using Complex = std::complex<double>;

/// Forward real DFT of x zero-padded (or truncated) to n points; returns the
/// n/2 + 1 non-negative-frequency bins, unscaled.
std::vector<Complex> rfft(std::span<const double> x, std::size_t n);

/// Inverse of rfft for an n-point transform, scaled by 1/n.
std::vector<double> irfft(std::span<const Complex> spectrum, std::size_t n);

std::size_t next_pow2(std::size_t n);

}  // namespace ambiloc::fft
