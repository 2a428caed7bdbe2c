// Copyright 2026 The windnr Authors
// License: Apache 2.0 (http://www.apache.org/licenses/LICENSE-2.0)

// Reference implementations written independently of the library: direct
// sums and loops with no shared helpers, used as ground truth in tests.

#pragma once

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <cstring>
#include <numbers>
#include <random>
#include <string>
#include <vector>

namespace oracle {

inline std::vector<double> randn(std::size_t n, std::uint64_t seed, double sd = 1.0) {
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> g(0.0, sd);
  std::vector<double> v(n);
  for (double& x : v) x = g(rng);
  return v;
}

inline std::vector<double> periodic_hann(int n) {
  std::vector<double> w(static_cast<std::size_t>(n));
  for (int i = 0; i < n; ++i) w[i] = 0.5 - 0.5 * std::cos(2.0 * std::numbers::pi * i / n);
  return w;
}

// X[f] = sum_n w[n] x[n] exp(-j 2 pi f n / N), f = 0..N/2.
inline std::vector<std::complex<double>> dft_frame(const double* x, int n) {
  const auto w = periodic_hann(n);
  std::vector<std::complex<double>> out(static_cast<std::size_t>(n / 2 + 1));
  for (int f = 0; f <= n / 2; ++f) {
    long double re = 0, im = 0;
    for (int i = 0; i < n; ++i) {
      const long double ang = -2.0L * std::numbers::pi_v<long double> * f * i / n;
      re += w[i] * x[i] * std::cos(ang);
      im += w[i] * x[i] * std::sin(ang);
    }
    out[f] = {static_cast<double>(re), static_cast<double>(im)};
  }
  return out;
}

inline double snr_db(const std::vector<double>& ref, const std::vector<double>& est,
                     std::size_t begin, std::size_t end) {
  double s = 0, e = 0;
  for (std::size_t i = begin; i < end; ++i) {
    s += ref[i] * ref[i];
    e += (ref[i] - est[i]) * (ref[i] - est[i]);
  }
  return 10.0 * std::log10(s / e);
}

// Same-ceil padded conv along frequency of a {N, F, Cin} tensor with kernel
// {k, Cin, Cout}; returns {N, ceil(F / s), Cout}.
inline std::vector<double> conv(const std::vector<double>& x, int n, int f, int cin,
                                const std::vector<double>& kernel, const std::vector<double>& bias,
                                int k, int cout, int stride) {
  const int fo = (f + stride - 1) / stride;
  const int pad_total = std::max(0, (fo - 1) * stride + k - f);
  const int left = pad_total / 2;
  std::vector<double> y(static_cast<std::size_t>(n) * fo * cout);
  for (int p = 0; p < n; ++p)
    for (int o = 0; o < fo; ++o)
      for (int co = 0; co < cout; ++co) {
        double acc = bias[co];
        for (int t = 0; t < k; ++t) {
          const int fi = o * stride + t - left;
          if (fi < 0 || fi >= f) continue;
          for (int ci = 0; ci < cin; ++ci) {
            acc += x[(static_cast<std::size_t>(p) * f + fi) * cin + ci] *
                   kernel[(static_cast<std::size_t>(t) * cin + ci) * cout + co];
          }
        }
        y[(static_cast<std::size_t>(p) * fo + o) * cout + co] = acc;
      }
  return y;
}

// -sqrt(mean((log10 max(|d|,1e-8) - log10 max(|w|,1e-8))^2))
inline double leakage(const std::vector<std::complex<double>>& d,
                      const std::vector<std::complex<double>>& w, int frames, int bins) {
  double acc = 0.0;
  for (int t = 0; t < frames; ++t) {
    for (int f = 0; f < bins; ++f) {
      const std::size_t i = static_cast<std::size_t>(t) * bins + f;
      const double a = std::log10(std::max(std::abs(d[i]), 1e-8));
      const double b = std::log10(std::max(std::abs(w[i]), 1e-8));
      acc += (a - b) * (a - b);
    }
  }
  return -std::sqrt(acc / (static_cast<double>(frames) * bins));
}

// Central difference of loss() with respect to `param`.
template <typename F>
double central_diff(F&& loss, double& param, double h = 1e-5) {
  const double keep = param;
  param = keep + h;
  const double up = loss();
  param = keep - h;
  const double down = loss();
  param = keep;
  return (up - down) / (2.0 * h);
}

inline double rel_err(double a, double b) {
  return std::abs(a - b) / std::max({std::abs(a), std::abs(b), 1e-6});
}

// RIFF/WAVE bytes with an arbitrary fmt chunk; payload is raw bytes.
inline std::vector<std::uint8_t> wav_bytes(int format_tag, int channels, int rate, int bits,
                                           const std::vector<std::uint8_t>& payload) {
  std::vector<std::uint8_t> b;
  auto u32 = [&](std::uint32_t v) {
    for (int i = 0; i < 4; ++i) b.push_back(static_cast<std::uint8_t>(v >> (8 * i)));
  };
  auto u16 = [&](std::uint16_t v) {
    b.push_back(static_cast<std::uint8_t>(v));
    b.push_back(static_cast<std::uint8_t>(v >> 8));
  };
  auto tag = [&](const char* s) { b.insert(b.end(), s, s + 4); };
  tag("RIFF");
  u32(static_cast<std::uint32_t>(36 + payload.size()));
  tag("WAVE");
  tag("fmt ");
  u32(16);
  u16(static_cast<std::uint16_t>(format_tag));
  u16(static_cast<std::uint16_t>(channels));
  u32(static_cast<std::uint32_t>(rate));
  u32(static_cast<std::uint32_t>(rate * channels * bits / 8));
  u16(static_cast<std::uint16_t>(channels * bits / 8));
  u16(static_cast<std::uint16_t>(bits));
  tag("data");
  u32(static_cast<std::uint32_t>(payload.size()));
  b.insert(b.end(), payload.begin(), payload.end());
  return b;
}

}  // namespace oracle
