#pragma once

#include "losmimo/harness.hpp"
#include "losmimo/phasenoise.hpp"
#include "losmimo/spectrum.hpp"

#include <functional>

namespace losmimo {

/// Parsed `psd` model argument:
///   wiener:<sigma2>[:<Ts>]
///   stationary:<mask name or file>[:<filter_len>]
///   flat:<level_dbc>
struct PsdModelSpec {
  PnKind kind = PnKind::wiener;
  double sigma2 = 1e-4;
  double ts = 1e-9;
  PhaseMask mask;
  std::string label;
  int filter_len = 4097;
  bool flat = false;
};

inline PsdModelSpec parse_psd_model(const std::string& text) {
  std::vector<std::string> parts;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ':')) parts.push_back(detail::trim(item));
  if (parts.size() < 2) throw std::invalid_argument("psd model spec must look like wiener:<sigma2>, stationary:<mask> or flat:<dBc>");
  PsdModelSpec spec;
  spec.label = text;
  if (parts[0] == "wiener") {
    if (parts.size() > 3) throw std::invalid_argument("wiener spec: wiener:<sigma2>[:<Ts>]");
    spec.kind = PnKind::wiener;
    spec.sigma2 = detail::parse_double("sigma2", parts[1]);
    if (parts.size() == 3) spec.ts = detail::parse_double("Ts", parts[2]);
    if (!(spec.sigma2 > 0.0) || !(spec.ts > 0.0)) throw std::invalid_argument("wiener spec: sigma2 and Ts must be positive");
  } else if (parts[0] == "stationary") {
    if (parts.size() > 3) throw std::invalid_argument("stationary spec: stationary:<mask>[:<filter_len>]");
    spec.kind = PnKind::stationary;
    spec.mask = resolve_mask(parts[1]);
    if (parts.size() == 3) spec.filter_len = static_cast<int>(detail::parse_int("filter_len", parts[2]));
  } else if (parts[0] == "flat") {
    if (parts.size() != 2) throw std::invalid_argument("flat spec: flat:<level_dbc>");
    spec.kind = PnKind::stationary;
    spec.flat = true;
    spec.mask = {{1e6, detail::parse_double("level", parts[1])}};
  } else {
    throw std::invalid_argument("unknown psd model '" + parts[0] + "'");
  }
  return spec;
}

struct PsdCheckPoint {
  double freq_hz;
  double estimate_db;
  double target_db;
};

struct PsdReport {
  bool passed = false;
  double tolerance_db = 3.0;
  double max_deviation_db = 0.0;
  std::vector<PsdCheckPoint> checks;
  PsdEstimate estimate;
  std::function<double(double)> target_db;
};

inline constexpr std::size_t kPsdSegment = 16384;

/// Generates one path of the model and compares its Welch PSD with the
/// target (mask, or Lorentzian for Wiener) on a log grid across the band.
inline PsdReport psd_check(const PsdModelSpec& spec, std::size_t samples, RandomSource& rs) {
  const double fs = 1.0 / spec.ts;
  PsdReport rep;
  std::vector<double> path;
  double f_lo = 0.0, f_hi = 0.0;
  const std::size_t seg = kPsdSegment;
  if (spec.kind == PnKind::wiener) {
    if (samples < 16 * seg) throw std::invalid_argument("psd_check: need at least " + std::to_string(16 * seg) + " samples");
    path = wiener_path(WienerModel{spec.sigma2, spec.ts, 0.0}, samples, rs);
    const double beta = beta_from_sigma(spec.sigma2, spec.ts);
    rep.target_db = [beta](double f) { return lorentzian_level(beta, f); };
    f_lo = 4.0 * fs / static_cast<double>(seg);
    f_hi = fs / 40.0;
  } else {
    const StationaryModel model{spec.mask, 0.0, spec.filter_len};
    const std::size_t need = 16 * std::max<std::size_t>(static_cast<std::size_t>(spec.filter_len), seg);
    if (samples < need) throw std::invalid_argument("psd_check: need at least " + std::to_string(need) + " samples");
    const auto taps = design_mask_filter(model, fs);
    path = stationary_path(model, taps, samples, rs);
    const PhaseMask mask = spec.mask;
    rep.target_db = [mask](double f) { return mask_level_dbc(mask, f); };
    if (mask.size() == 1) {
      f_lo = 4.0 * fs / static_cast<double>(seg);
      f_hi = 0.45 * fs;
    } else {
      f_lo = std::max(mask.front().offset_hz, 4.0 * fs / static_cast<double>(seg));
      f_hi = mask.back().offset_hz;
    }
    const bool flat = std::all_of(mask.begin(), mask.end(),
                                  [&](const MaskPoint& p) { return p.level_dbc == mask.front().level_dbc; });
    if (flat) rep.tolerance_db = 1.5;
  }
  rep.estimate = welch_psd(path, fs, seg);

  constexpr int kChecks = 16;
  for (int i = 0; i < kChecks; ++i) {
    const double f = f_lo * std::pow(f_hi / f_lo, static_cast<double>(i) / (kChecks - 1));
    const double est = 10.0 * std::log10(band_average(rep.estimate, f));
    const double tgt = rep.target_db(f);
    rep.checks.push_back({f, est, tgt});
    rep.max_deviation_db = std::max(rep.max_deviation_db, std::abs(est - tgt));
  }
  rep.passed = rep.max_deviation_db <= rep.tolerance_db;
  return rep;
}

/// Full-resolution estimate versus target, one row per bin.
inline void write_psd_csv(const std::string& path, const PsdReport& rep) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "freq_hz,estimate_dbc_hz,target_dbc_hz\n";
  for (std::size_t k = 1; k < rep.estimate.freq_hz.size(); ++k) {
    const double f = rep.estimate.freq_hz[k];
    out << format_number(f) << ',' << format_number(10.0 * std::log10(rep.estimate.density[k])) << ','
        << format_number(rep.target_db(f)) << '\n';
  }
}

}  // namespace losmimo
