#pragma once

#include "losmimo/harness.hpp"

#include <string>
#include <vector>

namespace losmimo {

namespace detail {

inline Scenario evm_base() {
  Scenario s;
  s.n = 4;
  s.k_db = kInfiniteK;
  s.perfect_csi = true;
  s.data_len = 1000 - 4;  // L_f = 1000 including the training prefix
  s.snr_db = parse_snr_list("10:2:40");
  return s;
}

inline Scenario ser_base() {
  Scenario s;
  s.n = 4;
  s.k_db = 10.0;
  s.data_len = 1000;
  s.snr_db = parse_snr_list("-5:2:39");
  return s;
}

inline Scenario with_wiener(Scenario s, double sigma2, const std::string& topo) {
  s.pn.kind = PnKind::wiener;
  s.pn.sigma2 = sigma2;
  s.topology = parse_topology(topo);
  return s;
}

inline Scenario with_mask(Scenario s, const std::string& mask) {
  s.pn.kind = PnKind::stationary;
  s.pn.mask = mask;
  s.topology = parse_topology("individual");
  return s;
}

inline Scenario named(Scenario s, const std::string& id) {
  s.id = id;
  return s;
}

inline Scenario compensated(Scenario s) {
  s.compensation = true;
  s.id += "-comp";
  return s;
}

}  // namespace detail

inline std::vector<std::string> preset_names() {
  return {"fig2a", "fig2b", "fig3a", "fig3b", "fig4a", "fig4b"};
}

/// Scenario lists that regenerate each figure's curves.
inline std::vector<Scenario> make_preset(const std::string& name) {
  using namespace detail;
  std::vector<Scenario> out;
  if (name == "fig2a") {
    const Scenario b = evm_base();
    out.push_back(named(b, "fig2a-nopn"));
    out.push_back(named(with_wiener(b, 1e-4, "individual"), "fig2a-wiener-ind-1e-4"));
    out.push_back(named(with_wiener(b, 1e-5, "individual"), "fig2a-wiener-ind-1e-5"));
    out.push_back(named(with_wiener(b, 1e-4, "common"), "fig2a-wiener-com-1e-4"));
    out.push_back(named(with_mask(b, "reynolds85"), "fig2a-reynolds"));
    out.push_back(named(with_mask(b, "dancila115"), "fig2a-dancila"));
  } else if (name == "fig2b") {
    const std::vector<int> lengths{100,  122,  148,  178,  216,  262,  318,  384,  466,  564,  682,  826, 1000,
                                   1212, 1468, 1780, 2156, 2612, 3164, 3832, 4642, 5624, 6814, 8256, 10000};
    for (int lf : lengths) {
      Scenario b = evm_base();
      b.snr_db = {25.0};
      b.data_len = lf - b.n;
      b.trials = 500;
      const std::string tag = "-Lf" + std::to_string(lf);
      out.push_back(named(b, "fig2b-nopn" + tag));
      out.push_back(named(with_wiener(b, 1e-4, "individual"), "fig2b-wiener-ind-1e-4" + tag));
      out.push_back(named(with_wiener(b, 1e-5, "individual"), "fig2b-wiener-ind-1e-5" + tag));
      out.push_back(named(with_mask(b, "reynolds85"), "fig2b-reynolds" + tag));
    }
  } else if (name == "fig3a") {
    const Scenario b = ser_base();
    out.push_back(named(b, "fig3a-nopn"));
    out.push_back(named(with_wiener(b, 1e-4, "common"), "fig3a-wiener-com-1e-4"));
    for (int n : {4, 16, 96}) {
      Scenario s = with_wiener(b, 1e-4, "individual");
      s.n = n;
      if (n == 96) s.trials = 200;
      out.push_back(named(s, "fig3a-wiener-ind-1e-4-N" + std::to_string(n)));
    }
    out.push_back(named(with_mask(b, "reynolds85"), "fig3a-reynolds"));
  } else if (name == "fig3b") {
    for (const char* c : {"QAM16", "QAM64", "PSK8", "PSK16"}) {
      for (double s2 : {1e-4, 1e-5}) {
        Scenario s = with_wiener(ser_base(), s2, "individual");
        s.constellation = c;
        out.push_back(named(s, std::string("fig3b-") + c + (s2 > 5e-5 ? "-1e-4" : "-1e-5")));
      }
    }
  } else if (name == "fig4a") {
    const Scenario b = ser_base();
    out.push_back(named(b, "fig4a-nopn"));
    for (auto [s2, topo, tag] : {std::tuple{1e-4, "common", "com-1e-4"}, std::tuple{1e-5, "individual", "ind-1e-5"},
                                 std::tuple{1e-4, "individual", "ind-1e-4"}}) {
      const Scenario s = named(with_wiener(b, s2, topo), std::string("fig4a-") + tag);
      out.push_back(s);
      out.push_back(compensated(s));
    }
  } else if (name == "fig4b") {
    for (int n : {2, 4, 8, 12, 16, 20, 24, 32, 40, 48, 64, 80, 96}) {
      Scenario b = ser_base();
      b.n = n;
      b.snr_db = {25.0};
      b.trials = n <= 16 ? 2000 : std::max(100, 8000 / n);
      const std::string tag = "-N" + std::to_string(n);
      for (const Scenario& s :
           {named(with_wiener(b, 1e-4, "common"), "fig4b-com-1e-4" + tag),
            named(with_wiener(b, 1e-4, "individual/common"), "fig4b-indtx-comrx-1e-4" + tag),
            named(with_wiener(b, 1e-5, "individual"), "fig4b-ind-1e-5" + tag),
            named(with_wiener(b, 1e-4, "individual"), "fig4b-ind-1e-4" + tag),
            named(with_mask(b, "reynolds85"), "fig4b-ind-reynolds" + tag)}) {
        out.push_back(s);
        out.push_back(compensated(s));
      }
    }
  } else {
    std::string names;
    for (const auto& n : preset_names()) names += " " + n;
    throw std::invalid_argument("unknown preset '" + name + "'; available:" + names);
  }
  return out;
}

/// Pairs each "<id>" row with its "<id>-comp" row at the same SNR.
inline std::vector<ImprovementRow> improvement_table(const std::vector<SweepRow>& rows) {
  std::vector<ImprovementRow> out;
  for (const auto& comp : rows) {
    const std::string& id = comp.scenario_id;
    if (id.size() < 5 || id.compare(id.size() - 5, 5, "-comp") != 0) continue;
    const std::string base = id.substr(0, id.size() - 5);
    for (const auto& plain : rows) {
      if (plain.scenario_id == base && plain.snr_db == comp.snr_db) {
        out.push_back({base, plain.n, plain.snr_db, plain.ser, comp.ser, rel_improvement(plain.ser, comp.ser)});
      }
    }
  }
  return out;
}

}  // namespace losmimo
