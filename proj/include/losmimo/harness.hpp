#pragma once

#include "losmimo/channel.hpp"
#include "losmimo/metrics.hpp"
#include "losmimo/modem.hpp"
#include "losmimo/phasenoise.hpp"
#include "losmimo/receiver.hpp"

#include <algorithm>
#include <atomic>
#include <cctype>
#include <chrono>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <map>
#include <mutex>
#include <optional>
#include <sstream>
#include <string>
#include <thread>
#include <vector>

namespace losmimo {

enum class PnKind { none, wiener, stationary };

inline std::string to_string(PnKind k) {
  switch (k) {
    case PnKind::none: return "none";
    case PnKind::wiener: return "wiener";
    case PnKind::stationary: return "stationary";
  }
  return "?";
}

struct PnSpec {
  PnKind kind = PnKind::none;
  double sigma2 = 0.0;  // Wiener increment variance, rad^2
  double ts = 1e-9;
  std::string mask = "reynolds85";  // builtin name or file path
  int filter_len = 4097;
  double theta0 = 0.0;

  PhaseNoiseSource make_source() const {
    switch (kind) {
      case PnKind::none: return PhaseNoiseSource();
      case PnKind::wiener: return PhaseNoiseSource(WienerModel{sigma2, ts, theta0});
      case PnKind::stationary: return PhaseNoiseSource(StationaryModel{resolve_mask(mask), theta0, filter_len}, 1.0 / ts);
    }
    return PhaseNoiseSource();
  }
};

enum class LosKind { dft, ula };

struct Scenario {
  std::string id = "scenario";
  int n = 4;
  std::vector<double> snr_db{20.0};
  double k_db = kInfiniteK;
  std::string constellation = "QAM16";
  int data_len = 1000;
  int trials = 2000;
  PnSpec pn;
  OscillatorTopology topology;
  bool compensation = false;
  double alpha = 0.1;
  std::string tracker = "auto";  // auto | per_stream | averaged
  bool perfect_csi = false;
  bool training_noise = false;
  bool dft_training = false;
  LosKind los = LosKind::dft;
  double wavelength = 5e-3;
  double link_distance = 100.0;
  std::uint64_t master_seed = 1;

  TrackerMode tracker_mode() const {
    if (tracker == "per_stream") return TrackerMode::per_stream;
    if (tracker == "averaged") return TrackerMode::averaged;
    return topology.fully_common() ? TrackerMode::averaged : TrackerMode::per_stream;
  }

  RxConfig rx_config() const {
    return RxConfig{compensation, alpha, tracker_mode(), perfect_csi, training_noise};
  }

  /// Throws with the offending parameter named.
  void validate() const {
    auto fail = [&](const std::string& key, const std::string& why) {
      throw std::invalid_argument("scenario '" + id + "': " + key + " " + why);
    };
    if (n < 1) fail("N", "must be >= 1");
    if (snr_db.empty()) fail("snr_db", "must list at least one point");
    if (!(k_db == kInfiniteK || std::isfinite(k_db))) fail("K_db", "must be a number or inf");
    if (data_len < 1) fail("L_d", "must be >= 1");
    if (trials < 1) fail("trials", "must be >= 1");
    if (!(alpha >= 0.0 && alpha <= 1.0)) fail("alpha", "must lie in [0, 1]");
    if (tracker != "auto" && tracker != "per_stream" && tracker != "averaged")
      fail("tracker", "must be auto, per_stream or averaged");
    if (pn.kind == PnKind::wiener && pn.sigma2 < 0.0) fail("sigma2", "must be >= 0");
    if (!(pn.ts > 0.0)) fail("Ts", "must be positive");
    if (!dft_training && !hadamard_constructible(n))
      fail("N", "has no Hadamard construction; set dft_training = true");
    try {
      make_constellation(constellation);
    } catch (const std::exception& e) {
      fail("constellation", e.what());
    }
    if (pn.kind == PnKind::stationary) {
      try {
        StationaryModel m{resolve_mask(pn.mask), 0.0, pn.filter_len};
        if (m.mask.back().offset_hz >= 0.5 / pn.ts) fail("mask", "reaches Nyquist");
        if (pn.filter_len < 1 || pn.filter_len % 2 == 0) fail("filter_len", "must be odd and positive");
      } catch (const std::invalid_argument&) {
        throw;
      } catch (const std::exception& e) {
        fail("mask", e.what());
      }
    }
  }

  std::string pn_label() const {
    switch (pn.kind) {
      case PnKind::none: return "-";
      case PnKind::wiener: {
        char buf[32];
        std::snprintf(buf, sizeof buf, "%.9g", pn.sigma2);
        return buf;
      }
      case PnKind::stationary: return pn.mask;
    }
    return "-";
  }
};

namespace detail {

inline std::string trim(const std::string& s) {
  const auto b = s.find_first_not_of(" \t\r");
  if (b == std::string::npos) return "";
  const auto e = s.find_last_not_of(" \t\r");
  return s.substr(b, e - b + 1);
}

inline double parse_double(const std::string& key, const std::string& v) {
  std::string lower = v;
  std::transform(lower.begin(), lower.end(), lower.begin(), [](unsigned char ch) { return std::tolower(ch); });
  if (lower == "inf" || lower == "infinity") return kInfiniteK;
  std::size_t used = 0;
  double out = 0.0;
  try {
    out = std::stod(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': not a number: '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("key '" + key + "': not a number: '" + v + "'");
  return out;
}

inline long long parse_int(const std::string& key, const std::string& v) {
  std::size_t used = 0;
  long long out = 0;
  try {
    out = std::stoll(v, &used);
  } catch (const std::exception&) {
    throw std::invalid_argument("key '" + key + "': not an integer: '" + v + "'");
  }
  if (used != v.size()) throw std::invalid_argument("key '" + key + "': not an integer: '" + v + "'");
  return out;
}

inline bool parse_bool(const std::string& key, const std::string& v) {
  if (v == "true" || v == "on" || v == "yes" || v == "1") return true;
  if (v == "false" || v == "off" || v == "no" || v == "0") return false;
  throw std::invalid_argument("key '" + key + "': expected true/false, got '" + v + "'");
}

}  // namespace detail

/// "10,20,30" or "start:step:stop" (inclusive), or a mix separated by commas.
inline std::vector<double> parse_snr_list(const std::string& text) {
  std::vector<double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    item = detail::trim(item);
    if (item.empty()) continue;
    if (std::count(item.begin(), item.end(), ':') == 2) {
      const auto a = item.find(':');
      const auto b = item.find(':', a + 1);
      const double start = detail::parse_double("snr_db", detail::trim(item.substr(0, a)));
      const double step = detail::parse_double("snr_db", detail::trim(item.substr(a + 1, b - a - 1)));
      const double stop = detail::parse_double("snr_db", detail::trim(item.substr(b + 1)));
      if (!(step > 0.0) || stop < start) throw std::invalid_argument("snr_db: bad range '" + item + "'");
      const int count = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
      for (int i = 0; i < count; ++i) out.push_back(start + i * step);
    } else {
      out.push_back(detail::parse_double("snr_db", item));
    }
  }
  if (out.empty()) throw std::invalid_argument("snr_db: empty list");
  return out;
}

/// Flat "key = value" text; '#' starts a comment; unknown keys are errors.
/// Relative mask file paths are resolved against base_dir when it is given.
inline Scenario parse_scenario(std::istream& in, const std::string& default_id = "scenario",
                               const std::string& base_dir = "") {
  Scenario s;
  s.id = default_id;
  std::string line;
  int lineno = 0;
  std::optional<int> frame_len;
  std::optional<int> data_len;
  while (std::getline(in, line)) {
    ++lineno;
    if (auto hash = line.find('#'); hash != std::string::npos) line.erase(hash);
    line = detail::trim(line);
    if (line.empty()) continue;
    const auto eq = line.find('=');
    if (eq == std::string::npos)
      throw std::invalid_argument("line " + std::to_string(lineno) + ": expected 'key = value'");
    const std::string key = detail::trim(line.substr(0, eq));
    const std::string v = detail::trim(line.substr(eq + 1));
    if (key == "id") s.id = v;
    else if (key == "N") s.n = static_cast<int>(detail::parse_int(key, v));
    else if (key == "snr_db") s.snr_db = parse_snr_list(v);
    else if (key == "K_db") s.k_db = detail::parse_double(key, v);
    else if (key == "constellation") s.constellation = v;
    else if (key == "L_d") data_len = static_cast<int>(detail::parse_int(key, v));
    else if (key == "L_f") frame_len = static_cast<int>(detail::parse_int(key, v));
    else if (key == "trials") s.trials = static_cast<int>(detail::parse_int(key, v));
    else if (key == "pn_model") {
      if (v == "none") s.pn.kind = PnKind::none;
      else if (v == "wiener") s.pn.kind = PnKind::wiener;
      else if (v == "stationary") s.pn.kind = PnKind::stationary;
      else throw std::invalid_argument("key 'pn_model': expected none, wiener or stationary");
    } else if (key == "sigma2") s.pn.sigma2 = detail::parse_double(key, v);
    else if (key == "Ts") s.pn.ts = detail::parse_double(key, v);
    else if (key == "mask") s.pn.mask = v;
    else if (key == "filter_len") s.pn.filter_len = static_cast<int>(detail::parse_int(key, v));
    else if (key == "theta0") s.pn.theta0 = detail::parse_double(key, v);
    else if (key == "topology") s.topology = parse_topology(v);
    else if (key == "compensation") s.compensation = detail::parse_bool(key, v);
    else if (key == "alpha") s.alpha = detail::parse_double(key, v);
    else if (key == "tracker") s.tracker = v;
    else if (key == "perfect_csi") s.perfect_csi = detail::parse_bool(key, v);
    else if (key == "training_noise") s.training_noise = detail::parse_bool(key, v);
    else if (key == "dft_training") s.dft_training = detail::parse_bool(key, v);
    else if (key == "los") {
      if (v == "dft") s.los = LosKind::dft;
      else if (v == "ula") s.los = LosKind::ula;
      else throw std::invalid_argument("key 'los': expected dft or ula");
    } else if (key == "wavelength") s.wavelength = detail::parse_double(key, v);
    else if (key == "link_distance") s.link_distance = detail::parse_double(key, v);
    else if (key == "master_seed") s.master_seed = static_cast<std::uint64_t>(detail::parse_int(key, v));
    else throw std::invalid_argument("line " + std::to_string(lineno) + ": unknown key '" + key + "'");
  }
  if (frame_len && data_len) throw std::invalid_argument("give either L_d or L_f, not both");
  if (data_len) s.data_len = *data_len;
  if (frame_len) s.data_len = *frame_len - s.n;  // training prefix is N symbols
  if (!base_dir.empty() && !builtin_mask(s.pn.mask) && std::filesystem::path(s.pn.mask).is_relative())
    s.pn.mask = (std::filesystem::path(base_dir) / s.pn.mask).string();
  s.validate();
  return s;
}

inline Scenario load_scenario(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open scenario file: " + path);
  try {
    const std::filesystem::path p(path);
    return parse_scenario(in, p.stem().string(), p.parent_path().string());
  } catch (const std::invalid_argument& e) {
    throw std::invalid_argument(path + ": " + e.what());
  }
}

struct SweepRow {
  std::string scenario_id;
  int n = 0;
  double k_db = 0.0;
  std::string constellation;
  std::string pn_model;
  std::string sigma2_or_mask;
  std::string topology;
  bool compensated = false;
  double snr_db = 0.0;
  double evm = 0.0;
  double ser = 0.0;
  std::uint64_t symbols = 0;
  std::uint64_t seed = 0;
  double wall_seconds = 0.0;  // whole-scenario time; not written to CSV
  TrialResult totals;
};

struct RunOptions {
  int workers = 1;
};

inline CMatrix los_matrix(const Scenario& s) {
  if (s.los == LosKind::dft) return los_dft(s.n);
  const double d = std::sqrt(optimal_spacing(s.wavelength, s.link_distance, s.n));
  return ula_channel(UlaGeometry{s.wavelength, s.link_distance, d, d, s.n});
}

/// Per-SNR results of one trial (frame). Trial k draws everything from stream k.
inline std::vector<TrialResult> run_trial(const Scenario& s, const CMatrix& h_los, const PhaseNoiseSource& pn,
                                          const Constellation& c, std::uint64_t k) {
  const RandomSource trial(s.master_seed, k);
  RandomSource chan_rs = trial.derive(1);
  RandomSource data_rs = trial.derive(3);

  const double k_lin = std::isinf(s.k_db) ? kInfiniteK : db_to_lin(s.k_db);
  const ChannelMatrix channel =
      std::isinf(k_lin) ? ChannelMatrix{h_los, h_los, CMatrix::Zero(s.n, s.n), k_lin}
                        : rician_mix(h_los, sample_nlos(s.n, chan_rs), k_lin);
  const Frame frame = build_frame(s.n, s.data_len, c, data_rs, s.dft_training);
  const PhaseBank bank = oscillator_bank(s.topology, pn, pn, s.n, static_cast<std::size_t>(frame.frame_len()),
                                         trial.derive(2));
  const RxConfig cfg = s.rx_config();

  std::vector<TrialResult> out;
  out.reserve(s.snr_db.size());
  for (double snr : s.snr_db) {
    RandomSource noise_rs = trial.derive(4);
    out.push_back(run_frame(channel, bank, frame, c, noise_variance(snr, s.n), cfg, noise_rs));
  }
  return out;
}

/// All SNR points of a scenario. Rows depend only on the scenario and seed,
/// never on the worker count: trials fill fixed slots and are reduced in order.
inline std::vector<SweepRow> run_scenario(const Scenario& s, const RunOptions& opts = {}) {
  s.validate();
  const auto t0 = std::chrono::steady_clock::now();
  const Constellation c = make_constellation(s.constellation);
  const CMatrix h_los = los_matrix(s);
  const PhaseNoiseSource pn = s.pn.make_source();

  const std::size_t trials = static_cast<std::size_t>(s.trials);
  std::vector<std::vector<TrialResult>> slots(trials);
  std::atomic<std::size_t> next{0};
  std::exception_ptr failure;
  std::mutex failure_mutex;
  auto worker = [&] {
    for (std::size_t k = next++; k < trials; k = next++) {
      try {
        slots[k] = run_trial(s, h_los, pn, c, k);
      } catch (...) {
        std::lock_guard lock(failure_mutex);
        if (!failure) failure = std::current_exception();
        next = trials;
      }
    }
  };
  const int workers = std::max(1, std::min<int>(opts.workers, s.trials));
  if (workers == 1) {
    worker();
  } else {
    std::vector<std::jthread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(worker);
  }
  if (failure) std::rethrow_exception(failure);

  const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
  std::vector<SweepRow> rows;
  for (std::size_t p = 0; p < s.snr_db.size(); ++p) {
    TrialResult total;
    for (const auto& slot : slots) total += slot[p];
    SweepRow r;
    r.scenario_id = s.id;
    r.n = s.n;
    r.k_db = s.k_db;
    r.constellation = s.constellation;
    r.pn_model = to_string(s.pn.kind);
    r.sigma2_or_mask = s.pn_label();
    r.topology = to_string(s.topology);
    r.compensated = s.compensation;
    r.snr_db = s.snr_db[p];
    r.evm = evm(total);
    r.ser = ser(total);
    r.symbols = total.symbols;
    r.seed = s.master_seed;
    r.wall_seconds = wall;
    r.totals = total;
    rows.push_back(r);
  }
  return rows;
}

inline constexpr const char* kCsvHeader =
    "scenario_id,N,K_db,constellation,pn_model,sigma2_or_mask,topology,compensated,snr_db,evm,ser,symbols,seed";

inline std::string format_number(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

inline std::string format_csv_row(const SweepRow& r) {
  std::ostringstream os;
  os << r.scenario_id << ',' << r.n << ',' << format_number(r.k_db) << ',' << r.constellation << ',' << r.pn_model
     << ',' << r.sigma2_or_mask << ',' << r.topology << ',' << (r.compensated ? 1 : 0) << ','
     << format_number(r.snr_db) << ',' << format_number(r.evm) << ',' << format_number(r.ser) << ',' << r.symbols
     << ',' << r.seed;
  return os.str();
}

/// Writes rows to path. In append mode the header is only emitted when the file is new or empty.
inline void write_csv(const std::string& path, const std::vector<SweepRow>& rows, bool append = false) {
  namespace fs = std::filesystem;
  const bool has_content = append && fs::exists(path) && fs::file_size(path) > 0;
  std::ofstream out(path, append ? std::ios::app : std::ios::trunc);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  if (!has_content) out << kCsvHeader << '\n';
  for (const auto& r : rows) out << format_csv_row(r) << '\n';
  if (!out) throw std::runtime_error("write failed: " + path);
}

/// Runs every scenario in order and writes one CSV with a single header.
inline std::vector<SweepRow> run_sweep(const std::vector<Scenario>& scenarios, const std::string& out_path,
                                       const RunOptions& opts = {}, bool append = false) {
  std::vector<SweepRow> all;
  for (const auto& s : scenarios) {
    auto rows = run_scenario(s, opts);
    all.insert(all.end(), rows.begin(), rows.end());
  }
  write_csv(out_path, all, append);
  return all;
}

inline std::vector<Scenario> load_scenario_dir(const std::string& dir) {
  namespace fs = std::filesystem;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir))
    if (e.is_regular_file() && e.path().extension() == ".scn") files.push_back(e.path());
  std::sort(files.begin(), files.end());
  std::vector<Scenario> out;
  for (const auto& f : files) out.push_back(load_scenario(f.string()));
  return out;
}

struct ImprovementRow {
  std::string label;
  int n = 0;
  double snr_db = 0.0;
  double ser = 0.0;
  double ser_comp = 0.0;
  std::optional<double> rel_improvement;
};

/// Pairs uncompensated and compensated rows point by point.
inline std::vector<ImprovementRow> pair_improvement(const std::string& label, const std::vector<SweepRow>& plain,
                                                    const std::vector<SweepRow>& comp) {
  if (plain.size() != comp.size()) throw std::invalid_argument("pair_improvement: row counts differ");
  std::vector<ImprovementRow> out;
  for (std::size_t i = 0; i < plain.size(); ++i) {
    out.push_back({label, plain[i].n, plain[i].snr_db, plain[i].ser, comp[i].ser,
                   rel_improvement(plain[i].ser, comp[i].ser)});
  }
  return out;
}

inline void write_improvement_csv(const std::string& path, const std::vector<ImprovementRow>& rows) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open output file: " + path);
  out << "setup,N,snr_db,ser,ser_comp,rel_improvement\n";
  for (const auto& r : rows) {
    out << r.label << ',' << r.n << ',' << format_number(r.snr_db) << ',' << format_number(r.ser) << ','
        << format_number(r.ser_comp) << ',' << (r.rel_improvement ? format_number(*r.rel_improvement) : "NA")
        << '\n';
  }
}

}  // namespace losmimo
