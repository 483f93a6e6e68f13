#pragma once

#include <complex>
#include <cstddef>
#include <numbers>
#include <vector>

namespace torimem::fft {

using cdouble = std::complex<double>;

inline bool is_power_of_two(std::size_t n) { return n && (n & (n - 1)) == 0; }

// In-place DFT with kernel e^{+2*pi*i*j*k/n}: iterative radix-2 for
// power-of-two lengths, plain O(n^2) evaluation otherwise. Lengths here are
// lattice sizes (<= a few hundred), so the naive fallback is cheap.
inline void transform(std::vector<cdouble>& a) {
  const std::size_t n = a.size();
  if (n < 2) return;

  if (!is_power_of_two(n)) {
    std::vector<cdouble> out(n);
    const double step = 2.0 * std::numbers::pi / static_cast<double>(n);
    for (std::size_t k = 0; k < n; ++k) {
      cdouble acc{0.0, 0.0};
      for (std::size_t j = 0; j < n; ++j) {
        const double ang = step * static_cast<double>((j * k) % n);
        acc += a[j] * cdouble{std::cos(ang), std::sin(ang)};
      }
      out[k] = acc;
    }
    a = std::move(out);
    return;
  }

  // bit-reversal permutation
  for (std::size_t i = 1, j = 0; i < n; ++i) {
    std::size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (std::size_t len = 2; len <= n; len <<= 1) {
    const double ang = 2.0 * std::numbers::pi / static_cast<double>(len);
    const cdouble wlen{std::cos(ang), std::sin(ang)};
    for (std::size_t i = 0; i < n; i += len) {
      cdouble w{1.0, 0.0};
      for (std::size_t j = 0; j < len / 2; ++j) {
        const cdouble u = a[i + j];
        const cdouble v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wlen;
      }
    }
  }
}

// 2D transform of an n x n array stored row-major (index = row * n + col),
// by transforming rows then columns.
inline void transform_2d(std::vector<cdouble>& a, std::size_t n) {
  std::vector<cdouble> line(n);
  for (std::size_t r = 0; r < n; ++r) {
    for (std::size_t c = 0; c < n; ++c) line[c] = a[r * n + c];
    transform(line);
    for (std::size_t c = 0; c < n; ++c) a[r * n + c] = line[c];
  }
  for (std::size_t c = 0; c < n; ++c) {
    for (std::size_t r = 0; r < n; ++r) line[r] = a[r * n + c];
    transform(line);
    for (std::size_t r = 0; r < n; ++r) a[r * n + c] = line[r];
  }
}

}  // namespace torimem::fft
