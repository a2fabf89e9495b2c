#pragma once

#include "losmimo/numerics.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <variant>
#include <vector>

namespace losmimo {

/// 3-dB linewidth of a Wiener oscillator: beta = sigma2_delta / (4 pi Ts).
inline double beta_from_sigma(double sigma2_delta, double ts) {
  if (!(sigma2_delta > 0.0) || !(ts > 0.0)) throw std::invalid_argument("beta_from_sigma: arguments must be positive");
  return sigma2_delta / (4.0 * kPi * ts);
}

inline double sigma_from_beta(double beta, double ts) {
  if (!(beta > 0.0) || !(ts > 0.0)) throw std::invalid_argument("sigma_from_beta: arguments must be positive");
  return 4.0 * kPi * beta * ts;
}

/// Lorentzian phase-noise level in dBc/Hz at offset f for linewidth beta.
inline double lorentzian_level(double beta, double f_offset) {
  if (!(beta > 0.0) || !(f_offset > 0.0)) throw std::invalid_argument("lorentzian_level: arguments must be positive");
  return 10.0 * std::log10(beta / (kPi * (beta * beta + f_offset * f_offset)));
}

struct WienerModel {
  double sigma2_delta = 0.0;  // rad^2 per sample
  double ts = 1e-9;
  double theta0 = 0.0;

  double beta() const { return beta_from_sigma(sigma2_delta, ts); }
};

struct MaskPoint {
  double offset_hz;
  double level_dbc;
};

using PhaseMask = std::vector<MaskPoint>;

inline void validate_mask(const PhaseMask& mask) {
  if (mask.empty()) throw std::invalid_argument("phase-noise mask is empty");
  for (std::size_t i = 0; i < mask.size(); ++i) {
    if (!(mask[i].offset_hz > 0.0) || !std::isfinite(mask[i].level_dbc))
      throw std::invalid_argument("phase-noise mask: offsets must be positive and levels finite");
    if (i > 0 && !(mask[i].offset_hz > mask[i - 1].offset_hz))
      throw std::invalid_argument("phase-noise mask: offsets must be strictly increasing");
  }
}

/// Mask level at offset f: straight lines in (log10 f, dB), held flat outside the mask range.
inline double mask_level_dbc(const PhaseMask& mask, double f) {
  f = std::abs(f);
  if (f <= mask.front().offset_hz) return mask.front().level_dbc;
  if (f >= mask.back().offset_hz) return mask.back().level_dbc;
  auto hi = std::upper_bound(mask.begin(), mask.end(), f,
                             [](double v, const MaskPoint& p) { return v < p.offset_hz; });
  auto lo = hi - 1;
  const double t = (std::log10(f) - std::log10(lo->offset_hz)) / (std::log10(hi->offset_hz) - std::log10(lo->offset_hz));
  return lo->level_dbc + t * (hi->level_dbc - lo->level_dbc);
}

/// Plain-text mask: one "offset_hz level_dbc" pair per line, ascending offsets.
/// Blank lines and '#' comments are ignored.
inline PhaseMask parse_mask(std::istream& in) {
  PhaseMask mask;
  std::string line;
  int lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    std::istringstream fields(line);
    double f = 0.0, level = 0.0;
    if (!(fields >> f)) continue;
    std::string extra;
    if (!(fields >> level) || (fields >> extra))
      throw std::invalid_argument("mask line " + std::to_string(lineno) + ": expected 'offset_hz level_dbc'");
    mask.push_back({f, level});
  }
  validate_mask(mask);
  return mask;
}

inline PhaseMask load_mask_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open mask file: " + path);
  return parse_mask(in);
}

/// Built-in approximations of the two reference PLL oscillators. Only the
/// 1 MHz levels are anchored to measurements; the shape is a flat in-band
/// region out to 1 MHz, -20 dB/dec to 100 MHz, then a white floor.
inline std::optional<PhaseMask> builtin_mask(const std::string& name) {
  auto shaped = [](double level_1mhz) {
    return PhaseMask{{1e6, level_1mhz}, {1e7, level_1mhz - 20.0}, {1e8, level_1mhz - 40.0}};
  };
  if (name == "reynolds85") return shaped(-85.0);
  if (name == "dancila115") return shaped(-115.0);
  return std::nullopt;
}

/// Preset name or path to a mask file.
inline PhaseMask resolve_mask(const std::string& name_or_path) {
  if (auto m = builtin_mask(name_or_path)) return *m;
  return load_mask_file(name_or_path);
}

struct StationaryModel {
  PhaseMask mask;
  double theta_const = 0.0;
  int filter_len = 4097;
};

/// Linear-phase FIR whose output PSD, for a unit-variance white drive at
/// sample rate f_sample, follows the mask (levels read as two-sided phase
/// PSD in rad^2/Hz). Designed by dense frequency sampling of the zero-phase
/// response, truncated to filter_len taps.
inline std::vector<double> design_mask_filter(const StationaryModel& model, double f_sample) {
  validate_mask(model.mask);
  if (!(f_sample > 0.0)) throw std::invalid_argument("design_mask_filter: sample rate must be positive");
  if (model.mask.back().offset_hz >= f_sample / 2.0)
    throw std::invalid_argument("design_mask_filter: mask offset at or above Nyquist");
  if (model.filter_len < 1 || model.filter_len % 2 == 0)
    throw std::invalid_argument("design_mask_filter: filter length must be odd and positive");

  const std::size_t len = static_cast<std::size_t>(model.filter_len);
  const std::size_t grid = next_pow2(std::max<std::size_t>(8 * len, 1 << 15));
  std::vector<cplx> amplitude(grid);
  for (std::size_t k = 0; k < grid; ++k) {
    const std::size_t kk = std::min(k, grid - k);
    const double f = static_cast<double>(kk) * f_sample / static_cast<double>(grid);
    const double psd = std::pow(10.0, mask_level_dbc(model.mask, f) / 10.0);
    amplitude[k] = std::sqrt(psd * f_sample);
  }
  const std::vector<cplx> impulse = ifft(amplitude);

  const std::ptrdiff_t half = static_cast<std::ptrdiff_t>(len / 2);
  std::vector<double> taps(len);
  for (std::ptrdiff_t i = 0; i < static_cast<std::ptrdiff_t>(len); ++i) {
    const std::ptrdiff_t lag = i - half;
    const std::size_t idx = static_cast<std::size_t>((lag + static_cast<std::ptrdiff_t>(grid)) % static_cast<std::ptrdiff_t>(grid));
    taps[static_cast<std::size_t>(i)] = impulse[idx].real();
  }
  return taps;
}

/// Output PSD level (dB rel. rad^2/Hz) of a tap set at frequency f for a unit-variance white drive.
inline double filter_psd_db(const std::vector<double>& taps, double f, double f_sample) {
  cplx acc = 0.0;
  const double w = -2.0 * kPi * f / f_sample;
  for (std::size_t i = 0; i < taps.size(); ++i) acc += taps[i] * std::polar(1.0, w * static_cast<double>(i));
  return 10.0 * std::log10(std::norm(acc) / f_sample);
}

/// theta(0) = theta0, theta(k) = theta(k-1) + N(0, sigma2_delta).
inline std::vector<double> wiener_path(const WienerModel& model, std::size_t n, RandomSource& rs) {
  if (n < 1) throw std::invalid_argument("wiener_path: length must be >= 1");
  if (model.sigma2_delta < 0.0) throw std::invalid_argument("wiener_path: negative increment variance");
  std::vector<double> theta(n);
  theta[0] = model.theta0;
  const double sd = std::sqrt(model.sigma2_delta);
  for (std::size_t k = 1; k < n; ++k) theta[k] = theta[k - 1] + sd * rs.normal();
  return theta;
}

/// theta_const plus filtered unit-variance Gaussian drive; the first
/// filter-length transient is generated and discarded.
inline std::vector<double> stationary_path(const StationaryModel& model, const FirFilter& filter, std::size_t n,
                                           RandomSource& rs) {
  if (n < 1) throw std::invalid_argument("stationary_path: length must be >= 1");
  if (filter.taps().empty()) throw std::invalid_argument("stationary_path: empty filter");
  std::vector<double> drive(n + filter.taps().size() - 1);
  for (double& v : drive) v = rs.normal();
  std::vector<double> phi = filter.apply_valid(drive);
  for (double& v : phi) v += model.theta_const;
  return phi;
}

inline std::vector<double> stationary_path(const StationaryModel& model, const std::vector<double>& taps,
                                           std::size_t n, RandomSource& rs) {
  return stationary_path(model, FirFilter(taps), n, rs);
}

/// Phase trajectory generator for one oscillator type; stationary filters are designed once.
class PhaseNoiseSource {
 public:
  PhaseNoiseSource() = default;
  explicit PhaseNoiseSource(WienerModel m) : model_(m) {}
  PhaseNoiseSource(StationaryModel m, double f_sample) : model_(m), filter_(design_mask_filter(m, f_sample)) {}

  bool enabled() const { return !std::holds_alternative<std::monostate>(model_); }
  const std::vector<double>& taps() const { return filter_.taps(); }

  std::vector<double> path(std::size_t n, RandomSource& rs) const {
    if (auto* w = std::get_if<WienerModel>(&model_)) return wiener_path(*w, n, rs);
    if (auto* s = std::get_if<StationaryModel>(&model_)) return stationary_path(*s, filter_, n, rs);
    return std::vector<double>(n, 0.0);
  }

 private:
  std::variant<std::monostate, WienerModel, StationaryModel> model_;
  FirFilter filter_;
};

enum class OscillatorMode { common, individual };

struct OscillatorTopology {
  OscillatorMode tx = OscillatorMode::individual;
  OscillatorMode rx = OscillatorMode::individual;

  bool fully_common() const { return tx == OscillatorMode::common && rx == OscillatorMode::common; }
};

inline std::string to_string(OscillatorMode m) { return m == OscillatorMode::common ? "common" : "individual"; }

inline std::string to_string(const OscillatorTopology& t) { return to_string(t.tx) + "/" + to_string(t.rx); }

inline OscillatorMode parse_oscillator_mode(const std::string& s) {
  if (s == "common" || s == "com") return OscillatorMode::common;
  if (s == "individual" || s == "ind") return OscillatorMode::individual;
  throw std::invalid_argument("unknown oscillator mode '" + s + "' (expected common or individual)");
}

/// "tx/rx", e.g. "individual/common"; a single word applies to both ends.
inline OscillatorTopology parse_topology(const std::string& s) {
  const auto slash = s.find('/');
  if (slash == std::string::npos) {
    const auto m = parse_oscillator_mode(s);
    return {m, m};
  }
  return {parse_oscillator_mode(s.substr(0, slash)), parse_oscillator_mode(s.substr(slash + 1))};
}

/// Per-antenna phase trajectories: row i holds antenna i, column k time k.
struct PhaseBank {
  RMatrix tx;
  RMatrix rx;
};

namespace detail {

inline RMatrix side_paths(OscillatorMode mode, const PhaseNoiseSource& src, int n_ant, std::size_t len,
                          const RandomSource& rs) {
  RMatrix out(n_ant, static_cast<Eigen::Index>(len));
  if (mode == OscillatorMode::common) {
    RandomSource stream = rs.derive(0);
    const auto p = src.path(len, stream);
    const Eigen::Map<const RVector> row(p.data(), static_cast<Eigen::Index>(len));
    for (int i = 0; i < n_ant; ++i) out.row(i) = row.transpose();
  } else {
    for (int i = 0; i < n_ant; ++i) {
      RandomSource stream = rs.derive(static_cast<std::uint64_t>(i) + 1);
      const auto p = src.path(len, stream);
      out.row(i) = Eigen::Map<const RVector>(p.data(), static_cast<Eigen::Index>(len)).transpose();
    }
  }
  return out;
}

}  // namespace detail

/// Wires Tx and Rx trajectories to antennas; common sides share one path.
inline PhaseBank oscillator_bank(const OscillatorTopology& topology, const PhaseNoiseSource& tx_source,
                                 const PhaseNoiseSource& rx_source, int n_ant, std::size_t len,
                                 const RandomSource& rs) {
  if (n_ant < 1 || len < 1) throw std::invalid_argument("oscillator_bank: N and length must be >= 1");
  return {detail::side_paths(topology.tx, tx_source, n_ant, len, rs.derive(1)),
          detail::side_paths(topology.rx, rx_source, n_ant, len, rs.derive(2))};
}

/// Diagonal of Theta(k) = diag(exp(j theta_i(k))).
inline CVector phase_rotors(const RMatrix& paths, Eigen::Index k) {
  CVector d(paths.rows());
  for (Eigen::Index i = 0; i < paths.rows(); ++i) d[i] = std::polar(1.0, paths(i, k));
  return d;
}

}  // namespace losmimo
