#pragma once

#include <cmath>
#include <cstdint>
#include <optional>
#include <stdexcept>

namespace losmimo {

/// Per-frame (or merged) accumulators. Merge is field-wise addition.
struct TrialResult {
  std::uint64_t symbol_errors = 0;
  std::uint64_t symbols = 0;
  double err_energy = 0.0;  // sum |x - x_hat|^2
  double ref_energy = 0.0;  // sum |x|^2
  std::uint64_t frames = 0;
  double frame_evm_sum = 0.0;  // sum over frames of that frame's RMS EVM

  TrialResult& operator+=(const TrialResult& o) {
    symbol_errors += o.symbol_errors;
    symbols += o.symbols;
    err_energy += o.err_energy;
    ref_energy += o.ref_energy;
    frames += o.frames;
    frame_evm_sum += o.frame_evm_sum;
    return *this;
  }

  friend TrialResult operator+(TrialResult a, const TrialResult& b) { return a += b; }
  bool operator==(const TrialResult&) const = default;
};

/// sigma_w^2 = N / SNR_lin.
inline double noise_variance(double snr_db, int n) {
  if (n < 1) throw std::invalid_argument("noise_variance: N must be >= 1");
  return static_cast<double>(n) / std::pow(10.0, snr_db / 10.0);
}

/// Pooled RMS EVM: sqrt(sum |e|^2 / sum |x|^2).
inline double evm_pooled(const TrialResult& acc) {
  if (!(acc.ref_energy > 0.0)) throw std::invalid_argument("evm: empty accumulator");
  return std::sqrt(acc.err_energy / acc.ref_energy);
}

/// EVM as the expectation over frames of each frame's RMS EVM; falls back
/// to the pooled RMS value for accumulators that carry no frame records.
inline double evm(const TrialResult& acc) {
  if (acc.frames == 0) return evm_pooled(acc);
  return acc.frame_evm_sum / static_cast<double>(acc.frames);
}

inline double ser(const TrialResult& acc) {
  if (acc.symbols == 0) throw std::invalid_argument("ser: no symbols");
  return static_cast<double>(acc.symbol_errors) / static_cast<double>(acc.symbols);
}

/// 1 - SER_comp / SER_plain; nullopt when the uncompensated SER is zero.
inline std::optional<double> rel_improvement(double ser_plain, double ser_comp) {
  if (!(ser_plain > 0.0)) return std::nullopt;
  return 1.0 - ser_comp / ser_plain;
}

}  // namespace losmimo
