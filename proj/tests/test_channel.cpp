#include "losmimo/channel.hpp"

#include <gtest/gtest.h>

using namespace losmimo;

TEST(Channel, DftLosHasEqualSingularValues) {
  const CMatrix h = los_dft(4);
  EXPECT_LT((h.adjoint() * h - 4.0 * CMatrix::Identity(4, 4)).norm(), 1e-12);
  EXPECT_NEAR(condition_number(h), 1.0, 1e-12);
}

TEST(Channel, OptimalUlaIsNearUnitary) {
  const double lambda = 5e-3;
  EXPECT_NEAR(optimal_spacing(lambda, 100.0, 2), 0.25, 1e-12);
  auto deviation = [](const CMatrix& h) {
    const int n = static_cast<int>(h.rows());
    return (h.adjoint() * h / n - CMatrix::Identity(n, n)).norm();
  };
  EXPECT_LT(deviation(ula_channel({lambda, 100.0, 0.5, 0.5, 2})), 0.01);
  EXPECT_GT(deviation(ula_channel({lambda, 100.0, 0.25, 0.25, 2})), 0.5);
  for (int n = 2; n <= 8; ++n) {
    const double d = std::sqrt(optimal_spacing(lambda, 100.0, n));
    const CMatrix h = ula_channel({lambda, 100.0, d, d, n});
    EXPECT_LE(deviation(h), 0.02) << "N=" << n;
    for (Eigen::Index i = 0; i < h.size(); ++i) EXPECT_NEAR(std::abs(h(i)), 1.0, 1e-12);
  }
}

TEST(Channel, RicianWeights) {
  RandomSource rs(2, 2);
  const CMatrix los = los_dft(4);
  const CMatrix nlos = sample_nlos(4, rs);
  const ChannelMatrix ch = rician_mix(los, nlos, 10.0);
  const double wl = std::sqrt(10.0 / 11.0), wn = std::sqrt(1.0 / 11.0);
  EXPECT_NEAR(wl, 0.95346, 1e-5);
  EXPECT_NEAR(wn, 0.30151, 1e-5);
  EXPECT_LT((ch.h - (wl * los + wn * nlos)).norm(), 1e-12);
}

TEST(Channel, RicianLimits) {
  RandomSource rs(2, 3);
  const CMatrix los = los_dft(2);
  const CMatrix nlos = sample_nlos(2, rs);
  EXPECT_LT((rician_mix(los, nlos, kInfiniteK).h - los).norm(), 1e-15);
  EXPECT_LT((rician_mix(los, nlos, 0.0).h - nlos).norm(), 1e-15);
  EXPECT_THROW(rician_mix(los, sample_nlos(3, rs), 1.0), std::invalid_argument);
}

TEST(Channel, NlosEntriesUnitVariance) {
  RandomSource rs(4, 4);
  double power = 0.0;
  const int draws = 2000;
  for (int i = 0; i < draws; ++i) power += sample_nlos(4, rs).squaredNorm();
  EXPECT_NEAR(power / (draws * 16.0), 1.0, 0.03);
}
