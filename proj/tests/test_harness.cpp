#include "losmimo/presets.hpp"

#include <gtest/gtest.h>

#include <filesystem>
#include <fstream>
#include <sstream>

using namespace losmimo;
namespace fs = std::filesystem;

namespace {

Scenario parse(const std::string& text) {
  std::istringstream in(text);
  return parse_scenario(in, "t");
}

Scenario small_wiener() {
  Scenario s;
  s.id = "small";
  s.k_db = 10.0;
  s.pn.kind = PnKind::wiener;
  s.pn.sigma2 = 1e-4;
  s.compensation = true;
  s.snr_db = {15, 30};
  s.data_len = 100;
  s.trials = 30;
  return s;
}

fs::path temp_path(const std::string& name) { return fs::temp_directory_path() / ("losmimo_test_" + name); }

}  // namespace

TEST(ScenarioParse, KeysAndDefaults) {
  const Scenario s = parse("N = 16\nK_db = 10\nsnr_db = 0:5:20\nconstellation = PSK8\n"
                           "pn_model = wiener\nsigma2 = 1e-5\ntopology = individual/common\n"
                           "compensation = yes\nL_f = 1016 # frame\n");
  EXPECT_EQ(s.n, 16);
  EXPECT_EQ(s.snr_db, (std::vector<double>{0, 5, 10, 15, 20}));
  EXPECT_EQ(s.data_len, 1000);
  EXPECT_EQ(s.pn.kind, PnKind::wiener);
  EXPECT_EQ(to_string(s.topology), "individual/common");
  EXPECT_TRUE(s.compensation);
  EXPECT_EQ(s.tracker_mode(), TrackerMode::per_stream);
  EXPECT_EQ(parse("topology = common\n").tracker_mode(), TrackerMode::averaged);
  EXPECT_TRUE(std::isinf(parse("K_db = inf\n").k_db));
}

TEST(ScenarioParse, ErrorsNameTheProblem) {
  auto message = [](const std::string& text) {
    try {
      parse(text);
    } catch (const std::exception& e) {
      return std::string(e.what());
    }
    return std::string();
  };
  EXPECT_NE(message("colour = red\n").find("colour"), std::string::npos);
  EXPECT_NE(message("N = 6\n").find("N"), std::string::npos);
  EXPECT_NE(message("alpha = 2\n").find("alpha"), std::string::npos);
  EXPECT_NE(message("N = four\n").find("N"), std::string::npos);
  EXPECT_NE(message("L_d = 10\nL_f = 20\n").find("L_f"), std::string::npos);
  EXPECT_NE(message("constellation = QAM8\n").find("constellation"), std::string::npos);
  EXPECT_NE(message("just text\n").find("line 1"), std::string::npos);
  EXPECT_FALSE(message("N = 6\ndft_training = true\n").size());
}

TEST(Run, RowPerSnrPoint) {
  const auto rows = run_scenario(small_wiener());
  ASSERT_EQ(rows.size(), 2u);
  EXPECT_EQ(rows[0].symbols, 30u * 4u * 100u);
  EXPECT_EQ(rows[1].snr_db, 30.0);
  EXPECT_GE(rows[0].ser, rows[1].ser);
}

TEST(Run, DeterministicAndWorkerIndependent) {
  const Scenario s = small_wiener();
  const auto serial = run_scenario(s, {1});
  const auto again = run_scenario(s, {1});
  const auto parallel = run_scenario(s, {3});
  for (std::size_t i = 0; i < serial.size(); ++i) {
    EXPECT_EQ(serial[i].totals, again[i].totals);
    EXPECT_EQ(serial[i].totals, parallel[i].totals);
  }
  Scenario other = s;
  other.master_seed = 99;
  EXPECT_NE(run_scenario(other)[0].totals, serial[0].totals);
}

TEST(Run, SnrPointsShareChannelAndData) {
  Scenario s = small_wiener();
  s.snr_db = {30};
  const auto single = run_scenario(s);
  s.snr_db = {15, 30};
  EXPECT_EQ(run_scenario(s)[1].totals, single[0].totals);
}

TEST(Csv, HeaderAndAppend) {
  const fs::path p = temp_path("append.csv");
  fs::remove(p);
  write_csv(p.string(), {});
  {
    std::ifstream in(p);
    std::string all((std::istreambuf_iterator<char>(in)), {});
    EXPECT_EQ(all, std::string(kCsvHeader) + "\n");
  }
  const auto rows = run_scenario(small_wiener());
  write_csv(p.string(), rows, true);
  write_csv(p.string(), rows, true);
  std::ifstream in(p);
  std::string line;
  int lines = 0, headers = 0;
  while (std::getline(in, line)) {
    ++lines;
    if (line.rfind("scenario_id,", 0) == 0) ++headers;
  }
  EXPECT_EQ(headers, 1);
  EXPECT_EQ(lines, 1 + 4);
  fs::remove(p);
}

TEST(Csv, RowFormat) {
  SweepRow r;
  r.scenario_id = "x";
  r.n = 4;
  r.k_db = kInfiniteK;
  r.constellation = "QAM16";
  r.pn_model = "wiener";
  r.sigma2_or_mask = "0.0001";
  r.topology = "common/common";
  r.compensated = true;
  r.snr_db = 25;
  r.evm = 0.5;
  r.ser = 0.25;
  r.symbols = 8;
  r.seed = 3;
  EXPECT_EQ(format_csv_row(r), "x,4,inf,QAM16,wiener,0.0001,common/common,1,25,0.5,0.25,8,3");
}

TEST(Sweep, DirectoryOfScenarios) {
  const fs::path dir = temp_path("sweep_dir");
  fs::remove_all(dir);
  fs::create_directories(dir / "m");
  std::ofstream(dir / "a.scn") << "snr_db = 10,20\nL_d = 50\ntrials = 5\nK_db = inf\n";
  std::ofstream(dir / "b.scn") << "snr_db = 10\nL_d = 50\ntrials = 5\npn_model = stationary\nmask = m/flat.mask\n"
                                  "filter_len = 257\n";
  std::ofstream(dir / "m" / "flat.mask") << "1e6 -100\n";
  std::ofstream(dir / "notes.txt") << "ignored\n";
  const auto list = load_scenario_dir(dir.string());
  ASSERT_EQ(list.size(), 2u);
  EXPECT_EQ(list[0].id, "a");
  const fs::path out = dir / "out.csv";
  const auto rows = run_sweep(list, out.string());
  EXPECT_EQ(rows.size(), 3u);
  EXPECT_THROW(load_scenario((dir / "missing.scn").string()), std::runtime_error);
  fs::remove_all(dir);
}

TEST(Presets, AllBuildAndValidate) {
  for (const auto& name : preset_names()) {
    const auto list = make_preset(name);
    EXPECT_FALSE(list.empty()) << name;
    for (const auto& s : list) EXPECT_NO_THROW(s.validate()) << s.id;
  }
  EXPECT_THROW(make_preset("fig9"), std::invalid_argument);
}

TEST(Presets, ImprovementPairs) {
  Scenario s = small_wiener();
  s.compensation = false;
  s.id = "pair";
  auto rows = run_scenario(s);
  Scenario c = s;
  c.compensation = true;
  c.id = "pair-comp";
  const auto comp = run_scenario(c);
  rows.insert(rows.end(), comp.begin(), comp.end());
  const auto table = improvement_table(rows);
  ASSERT_EQ(table.size(), 2u);
  EXPECT_EQ(table[0].label, "pair");
  ASSERT_TRUE(table[1].rel_improvement.has_value());
  EXPECT_LE(*table[1].rel_improvement, 1.0);
}

TEST(SampleScenarios, ShippedFilesParse) {
  const auto list = load_scenario_dir(LOSMIMO_SCENARIO_DIR);
  EXPECT_GE(list.size(), 3u);
}
