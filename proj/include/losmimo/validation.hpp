#pragma once

#include "losmimo/harness.hpp"
#include "losmimo/presets.hpp"
#include "losmimo/psd_check.hpp"
#include "losmimo/receiver.hpp"

#include <chrono>
#include <functional>
#include <ostream>

namespace losmimo {

struct Check {
  std::string label;
  double value = 0.0;
  std::string expect;
  bool pass = false;
};

struct CriterionResult {
  int id = 0;
  std::string title;
  std::vector<Check> checks;
  double seconds = 0.0;

  bool passed() const {
    return !checks.empty() && std::all_of(checks.begin(), checks.end(), [](const Check& c) { return c.pass; });
  }
};

struct ValidationOptions {
  int workers = 1;
  std::uint64_t seed = 1;
  double effort = 1.0;      // scales Monte-Carlo trial counts
  bool with_n96 = true;     // the N = 96 topology point takes about 90 s
};

namespace detail {

inline std::string fmt(const char* f, double a, double b = 0.0) {
  char buf[96];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

inline Check within_rel(const std::string& label, double value, double target, double rel) {
  return {label, value, fmt("%.4g +/- %.0f%%", target, rel * 100.0), std::abs(value - target) <= rel * target};
}

inline Check within_abs(const std::string& label, double value, double target, double tol) {
  return {label, value, fmt("%.4g +/- %.3g", target, tol), std::abs(value - target) <= tol};
}

inline Check at_most(const std::string& label, double value, double bound) {
  return {label, value, fmt("<= %.3g", bound), value <= bound};
}

inline Check at_least(const std::string& label, double value, double bound) {
  return {label, value, fmt(">= %.3g", bound), value >= bound};
}

inline int scaled(int trials, const ValidationOptions& o) {
  return std::max(10, static_cast<int>(std::lround(trials * o.effort)));
}

inline std::vector<SweepRow> run(Scenario s, int trials, const ValidationOptions& o) {
  s.trials = scaled(trials, o);
  s.master_seed = o.seed;
  return run_scenario(s, RunOptions{o.workers});
}

inline Scenario find(const std::vector<Scenario>& list, const std::string& id) {
  for (const auto& s : list)
    if (s.id == id) return s;
  throw std::logic_error("validation: missing preset scenario " + id);
}

/// Symbol-weighted SER across the rows (the high-SNR floor).
inline double pooled_ser(const std::vector<SweepRow>& rows) {
  TrialResult t;
  for (const auto& r : rows) t += r.totals;
  return ser(t);
}

inline const std::vector<double> kFloorSnr{31, 33, 35, 37, 39};

}  // namespace detail

inline CriterionResult criterion_1(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{1, "no-PN EVM reference", {}, 0.0};
  Scenario s = find(make_preset("fig2a"), "fig2a-nopn");
  s.snr_db = {10, 20, 30, 40};
  const auto rows = run(s, 200, o);
  for (const auto& row : rows) {
    const double ref = std::pow(10.0, -row.snr_db / 20.0);
    r.checks.push_back(within_rel(fmt("EVM @ %.0f dB", row.snr_db), row.evm, ref, 0.02));
  }
  return r;
}

inline CriterionResult criterion_2(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{2, "Wiener EVM floors", {}, 0.0};
  const auto fig = make_preset("fig2a");
  for (auto [id, target] : {std::pair{"fig2a-wiener-ind-1e-4", 0.320}, std::pair{"fig2a-wiener-ind-1e-5", 0.0945},
                            std::pair{"fig2a-wiener-com-1e-4", 0.2674}}) {
    Scenario s = find(fig, id);
    s.snr_db = {40};
    r.checks.push_back(within_rel(std::string(id) + " EVM @ 40 dB", run(s, 1000, o)[0].evm, target, 0.10));
  }
  return r;
}

inline CriterionResult criterion_3(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{3, "frame-length dependence", {}, 0.0};
  const auto fig = make_preset("fig2b");
  const double short_evm = run(find(fig, "fig2b-wiener-ind-1e-4-Lf100"), 2000, o)[0].evm;
  const double long_evm = run(find(fig, "fig2b-wiener-ind-1e-4-Lf10000"), 100, o)[0].evm;
  r.checks.push_back(within_rel("wiener 1e-4 EVM @ L_f=100", short_evm, 0.109, 0.15));
  r.checks.push_back(at_least("wiener 1e-4 EVM @ L_f=10000", long_evm, 0.75));
  for (const char* mask : {"reynolds", "dancila"}) {
    Scenario a = find(fig, "fig2b-reynolds-Lf100");
    Scenario b = find(fig, "fig2b-reynolds-Lf10000");
    if (std::string(mask) == "dancila") a.pn.mask = b.pn.mask = "dancila115";
    const double ea = run(a, 400, o)[0].evm;
    const double eb = run(b, 100, o)[0].evm;
    r.checks.push_back(at_most(std::string(mask) + " |EVM(10000) - EVM(100)|", std::abs(eb - ea), 0.1));
  }
  return r;
}

inline CriterionResult criterion_4(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{4, "SER floors", {}, 0.0};
  const auto fig = make_preset("fig3a");
  Scenario ind = find(fig, "fig3a-wiener-ind-1e-4-N4");
  Scenario com = find(fig, "fig3a-wiener-com-1e-4");
  Scenario nopn = find(fig, "fig3a-nopn");
  ind.snr_db = com.snr_db = kFloorSnr;
  nopn.snr_db = {15};
  r.checks.push_back(within_rel("individual 1e-4 floor", pooled_ser(run(ind, 400, o)), 0.226, 0.15));
  r.checks.push_back(within_rel("common 1e-4 floor", pooled_ser(run(com, 400, o)), 0.193, 0.15));
  r.checks.push_back(within_rel("no-PN SER @ 15 dB", run(nopn, 1000, o)[0].ser, 0.0379, 0.20));
  return r;
}

inline CriterionResult criterion_5(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{5, "modulation sensitivity ordering", {}, 0.0};
  const auto fig = make_preset("fig3b");
  const std::vector<std::pair<std::string, double>> order{
      {"PSK8", 0.188}, {"QAM16", 0.226}, {"PSK16", 0.439}, {"QAM64", 0.570}};
  std::vector<double> floors;
  for (const auto& [name, target] : order) {
    Scenario s = find(fig, "fig3b-" + name + "-1e-4");
    s.snr_db = kFloorSnr;
    floors.push_back(pooled_ser(run(s, 300, o)));
    r.checks.push_back(within_rel(name + " floor", floors.back(), target, 0.15));
  }
  const bool ordered = std::is_sorted(floors.begin(), floors.end()) &&
                       std::adjacent_find(floors.begin(), floors.end()) == floors.end();
  r.checks.push_back({"PSK8 < QAM16 < PSK16 < QAM64", ordered ? 1.0 : 0.0, "strictly increasing", ordered});
  return r;
}

inline CriterionResult criterion_6(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{6, "compensation gains", {}, 0.0};
  const auto fig = make_preset("fig4a");
  Scenario com = find(fig, "fig4a-com-1e-4-comp");
  com.snr_db = {19};
  r.checks.push_back(at_most("common 1e-4 comp SER @ 19 dB", run(com, 1000, o)[0].ser, 3e-3));
  Scenario weak = find(fig, "fig4a-ind-1e-5-comp");
  weak.snr_db = kFloorSnr;
  r.checks.push_back(at_most("individual 1e-5 comp floor", pooled_ser(run(weak, 1000, o)), 4e-4));
  Scenario strong = find(fig, "fig4a-ind-1e-4-comp");
  strong.snr_db = kFloorSnr;
  r.checks.push_back(within_rel("individual 1e-4 comp floor", pooled_ser(run(strong, 400, o)), 0.115, 0.25));
  return r;
}

inline CriterionResult criterion_7(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{7, "topology sweep", {}, 0.0};
  const auto fig = make_preset("fig4b");
  auto improvement = [&](const std::string& base, int trials, const ValidationOptions& opts) {
    const auto plain = run(find(fig, base), trials, opts);
    const auto comp = run(find(fig, base + "-comp"), trials, opts);
    return std::pair{plain[0], comp[0]};
  };
  // zero-error claims need their full symbol count whatever the effort
  ValidationOptions full = o;
  full.effort = std::max(1.0, o.effort);
  for (int n : {4, 16}) {
    // at least 1e6 data symbols per point
    const int trials = static_cast<int>(std::ceil(1.1e6 / (1000.0 * n)));
    for (const char* setup : {"fig4b-com-1e-4", "fig4b-indtx-comrx-1e-4"}) {
      const auto [plain, comp] = improvement(std::string(setup) + "-N" + std::to_string(n), trials, full);
      const double rel = rel_improvement(plain.ser, comp.ser).value_or(0.0);
      const bool enough = comp.symbols >= 1000000;
      r.checks.push_back({std::string(setup) + " N=" + std::to_string(n) + " rel_improvement", rel,
                          "== 1 over >= 1e6 symbols", rel == 1.0 && comp.totals.symbol_errors == 0 && enough});
    }
  }
  {
    const auto [plain, comp] = improvement("fig4b-ind-1e-4-N4", 1000, o);
    r.checks.push_back(within_abs("individual 1e-4 N=4 rel_improvement",
                                  rel_improvement(plain.ser, comp.ser).value_or(0.0), 0.472, 0.08));
  }
  if (o.with_n96) {
    const auto [plain, comp] = improvement("fig4b-ind-1e-4-N96", 100, o);
    r.checks.push_back(within_abs("individual 1e-4 N=96 rel_improvement",
                                  rel_improvement(plain.ser, comp.ser).value_or(0.0), 0.225, 0.08));
  }
  return r;
}

inline CriterionResult criterion_8(const ValidationOptions& o) {
  using namespace detail;
  CriterionResult r{8, "property suite", {}, 0.0};

  // Hadamard orthogonality, exact in integers
  int checked = 0;
  bool exact = true;
  for (int n = 1; n <= 128; ++n) {
    if (!hadamard_constructible(n)) continue;
    const IMatrix h = hadamard(n);
    exact = exact && (h * h.transpose() == IMatrix::Identity(n, n) * n) && h.cwiseAbs() == IMatrix::Ones(n, n);
    ++checked;
  }
  r.checks.push_back({"Hadamard H H^T = N I (" + std::to_string(checked) + " orders)", exact ? 1.0 : 0.0, "exact", exact});

  // Wiener variance law at a few lags
  {
    const double s2 = 1e-4;
    const std::size_t len = 1001;
    const int paths = 20000;
    RVector sum2 = RVector::Zero(3);
    const std::size_t lags[3] = {10, 100, 1000};
    for (int p = 0; p < paths; ++p) {
      RandomSource rs(o.seed, 0x57000000ULL + static_cast<std::uint64_t>(p));
      const auto w = wiener_path(WienerModel{s2, 1e-9, 0.0}, len, rs);
      for (int j = 0; j < 3; ++j) sum2[j] += w[lags[j]] * w[lags[j]];
    }
    double worst = 0.0;
    for (int j = 0; j < 3; ++j)
      worst = std::max(worst, std::abs(sum2[j] / paths / (static_cast<double>(lags[j]) * s2) - 1.0));
    r.checks.push_back(at_most("Wiener var(theta(n)) / (n sigma^2) - 1", worst, 0.05));
  }

  r.checks.push_back(within_abs("Lorentzian @ 1 MHz, beta = 7957.7 Hz", lorentzian_level(7957.7, 1e6), -85.96, 0.01));

  {
    RandomSource rs(o.seed, 0x50534400ULL);
    const auto spec = parse_psd_model("stationary:reynolds85");
    const PsdReport rep = psd_check(spec, 16 * kPsdSegment * 2, rs);
    r.checks.push_back(at_most("PSD mask deviation (dB)", rep.max_deviation_db, 3.0));
  }

  // common oscillators at both ends reduce to one scalar rotation
  {
    RandomSource rs(o.seed, 0x53434100ULL);
    const int n = 8;
    const CMatrix h = rician_mix(los_dft(n), sample_nlos(n, rs), 10.0).h;
    const PhaseNoiseSource src(WienerModel{1e-3, 1e-9, 0.0});
    const PhaseBank bank = oscillator_bank(parse_topology("common"), src, src, n, 200, rs.derive(9));
    CMatrix x(n, 200);
    for (Eigen::Index k = 0; k < x.cols(); ++k) x.col(k) = sample_cgauss(rs, n, 1.0);
    const CMatrix y = propagate(h, bank, x, 0, x.cols());
    double worst = 0.0;
    for (Eigen::Index k = 0; k < x.cols(); ++k) {
      const cplx rot = std::polar(1.0, bank.tx(0, k) + bank.rx(0, k));
      worst = std::max(worst, (y.col(k) - rot * (h * x.col(k))).cwiseAbs().maxCoeff());
    }
    r.checks.push_back(at_most("common/common scalar reduction error", worst, 1e-10));
  }

  // individual Tx / common Rx: ZF output is x_i exp(j(phi_rx + theta_tx,i))
  {
    RandomSource rs(o.seed, 0x41505800ULL);
    const int n = 4;
    const CMatrix h = rician_mix(los_dft(n), sample_nlos(n, rs), 10.0).h;
    const PhaseNoiseSource src(WienerModel{1e-3, 1e-9, 0.0});
    const PhaseBank bank = oscillator_bank(parse_topology("individual/common"), src, src, n, 300, rs.derive(9));
    const Constellation c = make_constellation("QAM16");
    const Frame f = build_frame(n, 300 - n, c, rs);
    const CMatrix xr = zf_equalize(h, propagate(h, bank, f.symbols, 0, f.frame_len()));
    double worst = 0.0;
    for (Eigen::Index k = 0; k < f.frame_len(); ++k)
      for (int i = 0; i < n; ++i) {
        const cplx expect = f.symbols(i, k) * std::polar(1.0, bank.rx(0, k) + bank.tx(i, k));
        worst = std::max(worst, std::abs(xr(i, k) - expect));
      }
    r.checks.push_back(at_most("ind-Tx/common-Rx additive phase error", worst, 1e-10));
  }

  // 16-QAM over ZF with a unitary-scaled channel: per-stream SNR equals SNR
  {
    Scenario s;
    s.id = "oracle-awgn";
    s.k_db = kInfiniteK;
    s.perfect_csi = true;
    s.snr_db = {14};
    s.trials = 200;
    s.master_seed = o.seed;
    const double sim = run_scenario(s, RunOptions{o.workers})[0].ser;
    const double g = std::pow(10.0, 1.4);
    const double p = 0.75 * std::erfc(std::sqrt(g / 10.0));
    r.checks.push_back(within_rel("16-QAM SER vs closed form @ 14 dB", sim, 1.0 - (1.0 - p) * (1.0 - p), 0.05));
  }

  {
    Scenario s;
    s.id = "determinism";
    s.k_db = 10.0;
    s.pn.kind = PnKind::wiener;
    s.pn.sigma2 = 1e-4;
    s.compensation = true;
    s.snr_db = {20, 30};
    s.data_len = 200;
    s.trials = 40;
    s.master_seed = o.seed;
    const auto serial = run_scenario(s, RunOptions{1});
    const auto parallel = run_scenario(s, RunOptions{4});
    bool same = serial.size() == parallel.size();
    for (std::size_t i = 0; same && i < serial.size(); ++i) same = serial[i].totals == parallel[i].totals;
    r.checks.push_back({"serial vs 4 workers bit-identical", same ? 1.0 : 0.0, "identical", same});
  }
  return r;
}

using CriterionFn = CriterionResult (*)(const ValidationOptions&);

inline const std::vector<CriterionFn>& criteria() {
  static const std::vector<CriterionFn> all{criterion_1, criterion_2, criterion_3, criterion_4,
                                            criterion_5, criterion_6, criterion_7, criterion_8};
  return all;
}

/// Runs the selected criteria (all when `only` is empty), printing as it goes.
/// Returns true when every criterion passed.
inline bool run_validation(const ValidationOptions& o, std::ostream& os, const std::vector<int>& only = {}) {
  bool all = true;
  for (std::size_t i = 0; i < criteria().size(); ++i) {
    const int id = static_cast<int>(i) + 1;
    if (!only.empty() && std::find(only.begin(), only.end(), id) == only.end()) continue;
    const auto t0 = std::chrono::steady_clock::now();
    CriterionResult r;
    try {
      r = criteria()[i](o);
    } catch (const std::exception& e) {
      r = CriterionResult{id, "error", {{e.what(), 0.0, "no exception", false}}, 0.0};
    }
    r.seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    for (const auto& c : r.checks) {
      char buf[64];
      std::snprintf(buf, sizeof buf, "%.6g", c.value);
      os << "    " << (c.pass ? "ok  " : "MISS") << "  " << c.label << " = " << buf << "  (" << c.expect << ")\n";
    }
    char secs[32];
    std::snprintf(secs, sizeof secs, "%.1f", r.seconds);
    os << (r.passed() ? "PASS" : "FAIL") << " criterion " << r.id << ": " << r.title << " [" << secs << " s]\n"
       << std::flush;
    all = all && r.passed();
  }
  return all;
}

}  // namespace losmimo
