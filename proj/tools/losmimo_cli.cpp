#include "losmimo/losmimo.hpp"

#include <CLI11.hpp>

#include <iostream>
#include <optional>

namespace {

using namespace losmimo;

struct Common {
  std::optional<std::uint64_t> seed;
  std::optional<int> trials;
  int workers = 1;
  std::string out;
  bool append = false;
};

void override_from(const Common& c, std::vector<Scenario>& list) {
  for (auto& s : list) {
    if (c.seed) s.master_seed = *c.seed;
    if (c.trials) s.trials = *c.trials;
  }
}

void emit(const Common& c, const std::vector<Scenario>& list) {
  const RunOptions opts{c.workers};
  if (!c.out.empty()) {
    const auto rows = run_sweep(list, c.out, opts, c.append);
    std::cerr << rows.size() << " rows written to " << c.out << '\n';
    return;
  }
  std::cout << kCsvHeader << '\n';
  for (const auto& s : list)
    for (const auto& r : run_scenario(s, opts)) std::cout << format_csv_row(r) << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"LOS MIMO phase-noise link simulator"};
  app.require_subcommand(1);
  app.fallthrough();
  Common common;

  app.add_option("--seed", common.seed, "master seed for every scenario")->envname("LOSMIMO_SEED");
  app.add_option("--trials", common.trials, "frames per SNR point")->check(CLI::PositiveNumber);
  app.add_option("--workers", common.workers, "parallel trial workers")
      ->envname("LOSMIMO_WORKERS")
      ->check(CLI::PositiveNumber);
  app.add_option("--out", common.out, "CSV output path (stdout when omitted)");
  app.add_flag("--append", common.append, "append to --out instead of overwriting");

  std::string scenario_file;
  auto* simulate = app.add_subcommand("simulate", "run one scenario file");
  simulate->add_option("scenario-file", scenario_file)->required()->check(CLI::ExistingFile);

  std::string scenario_dir;
  auto* sweep = app.add_subcommand("sweep", "run every *.scn file in a directory");
  sweep->add_option("scenario-dir", scenario_dir)->required()->check(CLI::ExistingDirectory);

  std::string preset_name;
  std::string improvement_out;
  auto* preset = app.add_subcommand("preset", "run a built-in figure preset");
  preset->add_option("name", preset_name)->required();
  preset->add_option("--improvement-out", improvement_out, "also write rel_improvement per paired setup");

  auto* presets = app.add_subcommand("presets", "list built-in presets");

  std::string model_spec;
  std::size_t samples = 1u << 22;
  auto* psd = app.add_subcommand("psd", "check a phase-noise model against its target PSD");
  psd->add_option("model-spec", model_spec, "wiener:<sigma2>[:<Ts>] | stationary:<mask>[:<taps>] | flat:<dBc>")
      ->required();
  psd->add_option("--samples", samples, "path length");

  ValidationOptions vopts;
  std::vector<int> only;
  auto* validate = app.add_subcommand("validate", "run the acceptance criteria");
  validate->add_option("--only", only, "criterion numbers to run")->check(CLI::Range(1, 8));
  validate->add_option("--effort", vopts.effort, "scale factor on Monte-Carlo trial counts")
      ->check(CLI::PositiveNumber);
  bool skip_n96 = false;
  validate->add_flag("--skip-n96", skip_n96, "leave out the slow N = 96 topology point");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    return app.exit(e);
  }

  try {
    if (*simulate) {
      std::vector<Scenario> list{load_scenario(scenario_file)};
      override_from(common, list);
      emit(common, list);
    } else if (*sweep) {
      auto list = load_scenario_dir(scenario_dir);
      if (list.empty()) throw std::runtime_error("no *.scn files in " + scenario_dir);
      override_from(common, list);
      emit(common, list);
    } else if (*preset) {
      auto list = make_preset(preset_name);
      override_from(common, list);
      if (improvement_out.empty()) {
        emit(common, list);
      } else {
        std::vector<SweepRow> rows;
        for (const auto& s : list) {
          auto part = run_scenario(s, RunOptions{common.workers});
          rows.insert(rows.end(), part.begin(), part.end());
        }
        if (!common.out.empty()) write_csv(common.out, rows, common.append);
        write_improvement_csv(improvement_out, improvement_table(rows));
      }
    } else if (*presets) {
      for (const auto& n : preset_names()) std::cout << n << '\n';
    } else if (*psd) {
      const auto spec = parse_psd_model(model_spec);
      RandomSource rs(common.seed.value_or(1), 0);
      const PsdReport rep = psd_check(spec, samples, rs);
      for (const auto& c : rep.checks)
        std::cout << format_number(c.freq_hz) << " Hz  estimate " << format_number(c.estimate_db) << "  target "
                  << format_number(c.target_db) << " dBc/Hz\n";
      std::cout << (rep.passed ? "PASS" : "FAIL") << " max deviation " << format_number(rep.max_deviation_db)
                << " dB (tolerance " << format_number(rep.tolerance_db) << " dB)\n";
      if (!common.out.empty()) write_psd_csv(common.out, rep);
      return rep.passed ? 0 : 3;
    } else if (*validate) {
      vopts.workers = common.workers;
      vopts.seed = common.seed.value_or(1);
      vopts.with_n96 = !skip_n96;
      return run_validation(vopts, std::cout, only) ? 0 : 1;
    }
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 2;
  }
  return 0;
}
