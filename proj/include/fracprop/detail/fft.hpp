#ifndef FRACPROP_DETAIL_FFT_HPP
#define FRACPROP_DETAIL_FFT_HPP

#include <complex>
#include <numbers>
#include <stdexcept>
#include <vector>

namespace fracprop::detail {

// In-place unitary radix-2 FFT (1/sqrt(N) both directions).
inline void fft_unitary(std::vector<std::complex<double>>& a, bool inverse) {
  const size_t n = a.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw std::domain_error("fft: length must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(a[i], a[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang =
        2.0 * std::numbers::pi / static_cast<double>(len) * (inverse ? 1.0 : -1.0);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0);
      for (size_t j = 0; j < len / 2; ++j) {
        const auto u = a[i + j];
        const auto v = a[i + j + len / 2] * w;
        a[i + j] = u + v;
        a[i + j + len / 2] = u - v;
        w *= wl;
      }
    }
  }
  const double s = 1.0 / std::sqrt(static_cast<double>(n));
  for (auto& x : a) x *= s;
}

}  // namespace fracprop::detail

#endif
