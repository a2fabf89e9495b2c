#include "losmimo/phasenoise.hpp"
#include "losmimo/psd_check.hpp"

#include <gtest/gtest.h>

#include <sstream>

using namespace losmimo;

TEST(Linewidth, BetaFromSigma) {
  EXPECT_NEAR(beta_from_sigma(1e-4, 1e-9), 7957.75, 0.01);
  EXPECT_NEAR(beta_from_sigma(1e-5, 1e-9), 795.775, 0.01);
  EXPECT_NEAR(sigma_from_beta(beta_from_sigma(3e-5, 2e-9), 2e-9), 3e-5, 1e-18);
  EXPECT_THROW(beta_from_sigma(0.0, 1e-9), std::invalid_argument);
}

TEST(Linewidth, LorentzianLevelAtOneMegahertz) {
  EXPECT_NEAR(lorentzian_level(7957.7, 1e6), -85.96, 0.01);
  EXPECT_NEAR(lorentzian_level(795.77, 1e6), -95.96, 0.01);
}

TEST(Wiener, StartsAtZeroAndVarianceGrowsLinearly) {
  const WienerModel m{1e-4, 1e-9, 0.0};
  const int paths = 3000;
  std::vector<double> acc(3, 0.0);
  const std::size_t lags[3] = {1, 50, 500};
  for (int p = 0; p < paths; ++p) {
    RandomSource rs(11, static_cast<std::uint64_t>(p));
    const auto w = wiener_path(m, 501, rs);
    ASSERT_EQ(w[0], 0.0);
    for (int j = 0; j < 3; ++j) acc[j] += w[lags[j]] * w[lags[j]];
  }
  for (int j = 0; j < 3; ++j) EXPECT_NEAR(acc[j] / paths / (lags[j] * 1e-4), 1.0, 0.07) << "lag " << lags[j];
}

TEST(Wiener, IncrementsGaussian) {
  RandomSource rs(12, 0);
  const auto w = wiener_path({1e-4, 1e-9, 0.0}, 400001, rs);
  const double limit = 1.5 * kPi / 180.0;
  double inside = 0.0, m2 = 0.0, m4 = 0.0;
  const double n = static_cast<double>(w.size() - 1);
  for (std::size_t k = 1; k < w.size(); ++k) {
    const double d = w[k] - w[k - 1];
    if (std::abs(d) <= limit) inside += 1.0;
    m2 += d * d;
    m4 += d * d * d * d;
  }
  EXPECT_GE(inside / n, 0.985);
  EXPECT_LE(inside / n, 0.995);
  const double kurtosis = (m4 / n) / ((m2 / n) * (m2 / n));
  EXPECT_NEAR(kurtosis, 3.0, 0.1);
}

TEST(Mask, InterpolationAndParsing) {
  std::istringstream text("# offset level\n1e6 -85\n\n1e7 -105  # decade\n");
  const PhaseMask m = parse_mask(text);
  ASSERT_EQ(m.size(), 2u);
  EXPECT_DOUBLE_EQ(mask_level_dbc(m, 1e5), -85.0);
  EXPECT_DOUBLE_EQ(mask_level_dbc(m, 1e9), -105.0);
  EXPECT_NEAR(mask_level_dbc(m, std::sqrt(1e13)), -95.0, 1e-9);
  std::istringstream bad("1e7 -85\n1e6 -90\n");
  EXPECT_THROW(parse_mask(bad), std::invalid_argument);
  std::istringstream junk("1e6 -85 extra\n");
  EXPECT_THROW(parse_mask(junk), std::invalid_argument);
  EXPECT_THROW(resolve_mask("/nonexistent/mask.txt"), std::runtime_error);
}

TEST(MaskFilter, ResponseFollowsMask) {
  const StationaryModel model{*builtin_mask("reynolds85"), 0.0, 4097};
  const auto taps = design_mask_filter(model, 1e9);
  for (double f : {1e6, 3e6, 1e7, 3e7, 1e8, 3e8})
    EXPECT_NEAR(filter_psd_db(taps, f, 1e9), mask_level_dbc(model.mask, f), 1.0) << f;
  for (std::size_t i = 0; i < taps.size(); ++i) EXPECT_NEAR(taps[i], taps[taps.size() - 1 - i], 1e-12);
}

TEST(MaskFilter, RejectsBadDesigns) {
  EXPECT_THROW(design_mask_filter({{{6e8, -100}}, 0.0, 101}, 1e9), std::invalid_argument);
  EXPECT_THROW(design_mask_filter({{{1e6, -100}}, 0.0, 100}, 1e9), std::invalid_argument);
}

TEST(Stationary, ParsevalAndZeroMean) {
  const StationaryModel model{*builtin_mask("reynolds85"), 0.0, 4097};
  const auto taps = design_mask_filter(model, 1e9);
  double tap_energy = 0.0;
  for (double t : taps) tap_energy += t * t;
  // variance of the filtered unit drive equals the integral of the mask over (-fs/2, fs/2)
  double integral = 0.0;
  const int bins = 1 << 16;
  for (int k = 0; k < bins; ++k) {
    const double f = (k + 0.5) * 0.5e9 / bins;
    integral += 2.0 * std::pow(10.0, mask_level_dbc(model.mask, f) / 10.0) * 0.5e9 / bins;
  }
  EXPECT_NEAR(tap_energy / integral, 1.0, 0.05);

  RandomSource rs(13, 0);
  const auto path = stationary_path(model, taps, 400000, rs);
  double mean = 0.0, var = 0.0;
  for (double v : path) mean += v;
  mean /= path.size();
  for (double v : path) var += (v - mean) * (v - mean);
  var /= path.size();
  EXPECT_NEAR(var / tap_energy, 1.0, 0.1);
  EXPECT_LT(std::abs(mean), 5.0 * std::sqrt(tap_energy / 1000.0));
}

TEST(PsdCheck, WienerMatchesLorentzian) {
  RandomSource rs(14, 0);
  const auto rep = psd_check(parse_psd_model("wiener:1e-4"), 1 << 22, rs);
  EXPECT_TRUE(rep.passed) << rep.max_deviation_db;
  EXPECT_NEAR(10.0 * std::log10(band_average(rep.estimate, 1e6)), -85.96, 3.0);
}

TEST(PsdCheck, MaskAndFlatMatch) {
  RandomSource rs(15, 0);
  EXPECT_TRUE(psd_check(parse_psd_model("stationary:dancila115"), 1 << 22, rs).passed);
  const auto flat = psd_check(parse_psd_model("flat:-110"), 1 << 22, rs);
  EXPECT_EQ(flat.tolerance_db, 1.5);
  EXPECT_TRUE(flat.passed) << flat.max_deviation_db;
}

TEST(PsdCheck, TooFewSamples) {
  RandomSource rs(16, 0);
  EXPECT_THROW(psd_check(parse_psd_model("stationary:reynolds85"), 4097 * 10, rs), std::invalid_argument);
  EXPECT_THROW(parse_psd_model("pink:3"), std::invalid_argument);
}

TEST(Topology, CommonSidesShareOnePath) {
  const PhaseNoiseSource src(WienerModel{1e-4, 1e-9, 0.0});
  const RandomSource rs(17, 0);
  const PhaseBank b = oscillator_bank(parse_topology("individual/common"), src, src, 4, 100, rs);
  for (int i = 1; i < 4; ++i) {
    EXPECT_EQ(b.rx.row(i), b.rx.row(0));
    EXPECT_NE(b.tx.row(i), b.tx.row(0));
  }
  const PhaseBank c = oscillator_bank(parse_topology("common"), src, src, 4, 100, rs);
  EXPECT_NE(c.tx.row(0), c.rx.row(0));
  EXPECT_EQ(to_string(parse_topology("ind/com")), "individual/common");
  EXPECT_THROW(parse_topology("shared"), std::invalid_argument);
}

TEST(Topology, DisabledSourceGivesZeroPhase) {
  const PhaseNoiseSource none;
  const PhaseBank b = oscillator_bank(parse_topology("individual"), none, none, 3, 10, RandomSource(1, 1));
  EXPECT_EQ(b.tx.cwiseAbs().maxCoeff(), 0.0);
  EXPECT_EQ(b.rx.cwiseAbs().maxCoeff(), 0.0);
}
