#pragma once

#include "losmimo/numerics.hpp"
#include "losmimo/phasenoise.hpp"

#include <cmath>
#include <fstream>
#include <string>
#include <vector>

namespace losmimo {

struct PsdEstimate {
  std::vector<double> freq_hz;  // bin centres in [0, fs/2]
  std::vector<double> density;  // two-sided density, units^2/Hz
  std::size_t segments = 0;
};

/// Welch estimate with Hann windows, 50 % overlap and per-segment mean removal.
inline PsdEstimate welch_psd(const std::vector<double>& x, double f_sample, std::size_t segment_len) {
  if (segment_len < 16 || x.size() < segment_len) throw std::invalid_argument("welch_psd: not enough samples");
  std::vector<double> window(segment_len);
  double wpow = 0.0;
  for (std::size_t i = 0; i < segment_len; ++i) {
    window[i] = 0.5 - 0.5 * std::cos(2.0 * kPi * static_cast<double>(i) / static_cast<double>(segment_len));
    wpow += window[i] * window[i];
  }
  const std::size_t hop = segment_len / 2;
  const std::size_t bins = segment_len / 2 + 1;
  PsdEstimate est;
  est.density.assign(bins, 0.0);
  Eigen::FFT<double> engine;
  std::vector<double> seg(segment_len);
  std::vector<cplx> spec;
  for (std::size_t start = 0; start + segment_len <= x.size(); start += hop) {
    double mean = 0.0;
    for (std::size_t i = 0; i < segment_len; ++i) mean += x[start + i];
    mean /= static_cast<double>(segment_len);
    for (std::size_t i = 0; i < segment_len; ++i) seg[i] = (x[start + i] - mean) * window[i];
    engine.fwd(spec, seg);
    for (std::size_t k = 0; k < bins; ++k) est.density[k] += std::norm(spec[k]);
    ++est.segments;
  }
  const double scale = 1.0 / (static_cast<double>(est.segments) * f_sample * wpow);
  est.freq_hz.resize(bins);
  for (std::size_t k = 0; k < bins; ++k) {
    est.density[k] *= scale;
    est.freq_hz[k] = static_cast<double>(k) * f_sample / static_cast<double>(segment_len);
  }
  return est;
}

/// Mean of the estimate over bins within a factor `spread` of f (at least the nearest bin).
inline double band_average(const PsdEstimate& est, double f, double spread = 1.12) {
  double acc = 0.0;
  int count = 0;
  for (std::size_t k = 1; k < est.freq_hz.size(); ++k) {
    if (est.freq_hz[k] >= f / spread && est.freq_hz[k] <= f * spread) {
      acc += est.density[k];
      ++count;
    }
  }
  if (count == 0) {
    const double df = est.freq_hz[1];
    const std::size_t k = std::min(est.freq_hz.size() - 1, std::max<std::size_t>(1, static_cast<std::size_t>(std::lround(f / df))));
    return est.density[k];
  }
  return acc / count;
}

}  // namespace losmimo
