#pragma once

#include <cmath>
#include <complex>
#include <vector>

#include "mvip/errors.hpp"

namespace mvip {

/// In-place iterative radix-2 FFT. Length must be a power of two.
inline void fft_radix2(std::vector<std::complex<double>>& data) {
  const size_t n = data.size();
  if (n == 0 || (n & (n - 1)) != 0)
    throw Config("fft length must be a power of two");
  for (size_t i = 1, j = 0; i < n; ++i) {
    size_t bit = n >> 1;
    for (; j & bit; bit >>= 1) j ^= bit;
    j ^= bit;
    if (i < j) std::swap(data[i], data[j]);
  }
  for (size_t len = 2; len <= n; len <<= 1) {
    const double ang = -2.0 * M_PI / static_cast<double>(len);
    const std::complex<double> wl(std::cos(ang), std::sin(ang));
    for (size_t i = 0; i < n; i += len) {
      std::complex<double> w(1.0, 0.0);
      for (size_t k = 0; k < len / 2; ++k) {
        const std::complex<double> u = data[i + k];
        const std::complex<double> v = data[i + k + len / 2] * w;
        data[i + k] = u + v;
        data[i + k + len / 2] = u - v;
        w *= wl;
      }
    }
  }
}

inline std::vector<double> hann_window(size_t n) {
  std::vector<double> w(n);
  for (size_t i = 0; i < n; ++i)
    w[i] = 0.5 * (1.0 - std::cos(2.0 * M_PI * static_cast<double>(i) /
                                 static_cast<double>(n - 1)));
  return w;
}

/// Transfer estimate between two equally sampled records.
struct TransmissibilityCurve {
  std::vector<double> freq_hz;
  std::vector<std::complex<double>> response;

  double magnitude_db(size_t i) const {
    return 20.0 * std::log10(std::abs(response[i]));
  }
};

/// Welch cross-spectral transfer estimate H = Sxy / Sxx with Hann windows
/// and 50% overlap. Needs at least eight segments.
inline TransmissibilityCurve transmissibility(const std::vector<double>& input,
                                              const std::vector<double>& output,
                                              double sample_rate_hz,
                                              size_t segment_length = 0) {
  if (input.size() != output.size())
    throw Config("input/output records must have equal length");
  const size_t n = input.size();
  if (segment_length == 0) {
    // Largest power of two giving at least eight 50%-overlapped segments.
    segment_length = 1;
    while (segment_length * 2 <= 2 * n / 9) segment_length *= 2;
    segment_length = std::min<size_t>(segment_length, 65536);
  }
  if ((segment_length & (segment_length - 1)) != 0)
    throw Config("segment length must be a power of two");
  const size_t hop = segment_length / 2;
  const size_t segments = n >= segment_length ? (n - segment_length) / hop + 1 : 0;
  if (segments < 8)
    throw InsufficientData("fewer than eight Welch segments");

  const std::vector<double> window = hann_window(segment_length);
  const size_t bins = segment_length / 2 + 1;
  std::vector<std::complex<double>> sxy(bins, 0.0);
  std::vector<double> sxx(bins, 0.0);
  std::vector<std::complex<double>> bx(segment_length), by(segment_length);

  for (size_t s = 0; s < segments; ++s) {
    const size_t off = s * hop;
    for (size_t i = 0; i < segment_length; ++i) {
      bx[i] = input[off + i] * window[i];
      by[i] = output[off + i] * window[i];
    }
    fft_radix2(bx);
    fft_radix2(by);
    for (size_t k = 0; k < bins; ++k) {
      sxy[k] += std::conj(bx[k]) * by[k];
      sxx[k] += std::norm(bx[k]);
    }
  }

  TransmissibilityCurve curve;
  curve.freq_hz.reserve(bins - 1);
  curve.response.reserve(bins - 1);
  for (size_t k = 1; k < bins; ++k) {  // skip the d.c. bin
    if (sxx[k] <= 0.0) continue;
    curve.freq_hz.push_back(sample_rate_hz * static_cast<double>(k) /
                            static_cast<double>(segment_length));
    curve.response.push_back(sxy[k] / sxx[k]);
  }
  return curve;
}

/// Least-squares log-log slope of |H| in dB per decade over [f_lo, f_hi].
inline double fitted_slope_db_per_decade(const TransmissibilityCurve& curve,
                                         double f_lo, double f_hi) {
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  int n = 0;
  for (size_t i = 0; i < curve.freq_hz.size(); ++i) {
    const double f = curve.freq_hz[i];
    if (f < f_lo || f > f_hi) continue;
    const double x = std::log10(f);
    const double y = curve.magnitude_db(i);
    sx += x; sy += y; sxx += x * x; sxy += x * y;
    ++n;
  }
  if (n < 2) throw InsufficientData("fewer than two points in the fit band");
  return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

/// First downward -3 dB crossing above f_min, log-interpolated.
inline double cutoff_frequency_hz(const TransmissibilityCurve& curve,
                                  double f_min = 0.0) {
  double prev_f = 0.0, prev_m = 0.0;
  bool have_prev = false;
  for (size_t i = 0; i < curve.freq_hz.size(); ++i) {
    const double f = curve.freq_hz[i];
    if (f < f_min) continue;
    const double m = curve.magnitude_db(i);
    if (have_prev && prev_m >= -3.0 && m < -3.0) {
      const double t = (-3.0 - prev_m) / (m - prev_m);
      return std::pow(10.0, std::log10(prev_f) + t * (std::log10(f) - std::log10(prev_f)));
    }
    prev_f = f;
    prev_m = m;
    have_prev = true;
  }
  throw InsufficientData("no -3 dB crossing in the resolved band");
}

/// Single-record amplitude spectrum with a Hann window and coherent-gain
/// correction: a pure tone of amplitude A shows a peak of height ~A.
struct AmplitudeSpectrum {
  std::vector<double> freq_hz;
  std::vector<double> amplitude;
  double window_sum = 0.0;          // sum of window samples
  double window_power_sum = 0.0;    // sum of squared window samples

  /// Equivalent noise bandwidth in bins; divides band-integrated A^2/2 for
  /// Parseval-style power accounting.
  double enbw_bins() const {
    const double n = static_cast<double>(2 * (freq_hz.size()));
    return n * window_power_sum / (window_sum * window_sum);
  }
};

inline AmplitudeSpectrum spectrum(const std::vector<double>& series,
                                  double sample_rate_hz) {
  if (series.size() < 1024)
    throw InsufficientData("spectrum needs at least 1024 samples");
  size_t n = 1;
  while (n * 2 <= series.size()) n *= 2;

  const std::vector<double> window = hann_window(n);
  std::vector<std::complex<double>> buf(n);
  double wsum = 0.0, wsq = 0.0;
  for (size_t i = 0; i < n; ++i) {
    buf[i] = series[i] * window[i];
    wsum += window[i];
    wsq += window[i] * window[i];
  }
  fft_radix2(buf);

  AmplitudeSpectrum sp;
  sp.window_sum = wsum;
  sp.window_power_sum = wsq;
  const size_t bins = n / 2;
  sp.freq_hz.reserve(bins);
  sp.amplitude.reserve(bins);
  for (size_t k = 1; k <= bins; ++k) {
    sp.freq_hz.push_back(sample_rate_hz * static_cast<double>(k) /
                         static_cast<double>(n));
    sp.amplitude.push_back(2.0 * std::abs(buf[k]) / wsum);
  }
  return sp;
}

}  // namespace mvip
