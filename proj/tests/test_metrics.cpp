#include "losmimo/metrics.hpp"

#include <gtest/gtest.h>

using namespace losmimo;

namespace {

TrialResult sample(std::uint64_t err, std::uint64_t sym, double e, double r, double fe) {
  return TrialResult{err, sym, e, r, 1, fe};
}

}  // namespace

TEST(Merge, CommutativeAssociativeWithIdentity) {
  // dyadic values keep the floating-point sums exact
  const TrialResult a = sample(3, 100, 0.5, 64.0, 0.25);
  const TrialResult b = sample(0, 200, 0.125, 128.0, 0.0625);
  const TrialResult c = sample(7, 50, 2.0, 32.0, 0.5);
  EXPECT_EQ(a + b, b + a);
  EXPECT_EQ((a + b) + c, a + (b + c));
  EXPECT_EQ(a + TrialResult{}, a);
  const TrialResult t = a + b + c;
  EXPECT_EQ(t.symbol_errors, 10u);
  EXPECT_EQ(t.symbols, 350u);
  EXPECT_EQ(t.frames, 3u);
}

TEST(Metrics, NoiseVariance) {
  EXPECT_DOUBLE_EQ(noise_variance(0.0, 4), 4.0);
  EXPECT_NEAR(noise_variance(20.0, 4), 0.04, 1e-15);
  EXPECT_THROW(noise_variance(10.0, 0), std::invalid_argument);
}

TEST(Metrics, EvmDefinitions) {
  const TrialResult a = sample(0, 10, 1.0, 100.0, 0.1);
  const TrialResult b = sample(0, 10, 9.0, 100.0, 0.3);
  EXPECT_NEAR(evm(a + b), 0.2, 1e-15);
  EXPECT_NEAR(evm_pooled(a + b), std::sqrt(10.0 / 200.0), 1e-15);
  TrialResult pooled_only{0, 10, 4.0, 100.0, 0, 0.0};
  EXPECT_NEAR(evm(pooled_only), 0.2, 1e-15);
  EXPECT_THROW(evm(TrialResult{}), std::invalid_argument);
}

TEST(Metrics, SerAndImprovement) {
  EXPECT_DOUBLE_EQ(ser(sample(5, 1000, 0, 1, 0)), 0.005);
  EXPECT_THROW(ser(TrialResult{}), std::invalid_argument);
  EXPECT_DOUBLE_EQ(*rel_improvement(0.2, 0.05), 0.75);
  EXPECT_DOUBLE_EQ(*rel_improvement(0.2, 0.0), 1.0);
  EXPECT_FALSE(rel_improvement(0.0, 0.0).has_value());
  EXPECT_LT(*rel_improvement(0.1, 0.2), 0.0);
}
