#include "amm/fees.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <vector>

using namespace amm;

TEST(Fees, BpsConversion) {
  EXPECT_DOUBLE_EQ(bps(15), 0.0015);
  EXPECT_DOUBLE_EQ(bps(0), 0.0);
  EXPECT_DOUBLE_EQ(bps(10000), 1.0);
}

TEST(Fees, MakeDefaultsArbToCexFee) {
  auto f = FeeSchedule::make(bps(20), bps(15));
  EXPECT_DOUBLE_EQ(f.cex_fee, 0.0020);
  EXPECT_DOUBLE_EQ(f.amm_fee, 0.0015);
  EXPECT_DOUBLE_EQ(f.arb_fee, 0.0020);
  EXPECT_DOUBLE_EQ(f.hedge_fee, 0.0);
}

TEST(Fees, ValidateRejectsOutOfRange) {
  EXPECT_THROW(validate(FeeSchedule{-0.001, 0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(validate(FeeSchedule{0, 1.0, 0, 0}), std::invalid_argument);
  EXPECT_THROW(validate(FeeSchedule{0, 0, NAN, 0}), std::invalid_argument);
  EXPECT_NO_THROW(validate(FeeSchedule{0, 0, 0, 0}));
}

// Baseline 20/15 bps thresholds, all six frozen.
TEST(Fees, BaselineBounds) {
  auto b = region_bounds(FeeSchedule::make(bps(20), bps(15)));
  EXPECT_DOUBLE_EQ(b.buy_bound, 1.000499251123315);
  EXPECT_DOUBLE_EQ(b.sell_bound, 0.9994992488733099);
  EXPECT_DOUBLE_EQ(b.arb_low, 0.9965052421367947);
  EXPECT_DOUBLE_EQ(b.arb_high, 1.0035052578868302);
  EXPECT_DOUBLE_EQ(b.profit_low, 0.9985022466300548);
  EXPECT_DOUBLE_EQ(b.profit_high, 1.0015022533800702);
}

TEST(Fees, ZeroFeesCollapseEverythingToOne) {
  auto b = region_bounds(FeeSchedule{});
  EXPECT_DOUBLE_EQ(b.buy_bound, 1.0);
  EXPECT_DOUBLE_EQ(b.sell_bound, 1.0);
  EXPECT_DOUBLE_EQ(b.arb_low, 1.0);
  EXPECT_DOUBLE_EQ(b.arb_high, 1.0);
  EXPECT_DOUBLE_EQ(b.profit_low, 1.0);
  EXPECT_DOUBLE_EQ(b.profit_high, 1.0);
}

// The joint buy & sell band is non-empty exactly when the AMM undercuts the
// CEX fee; with hedge_fee <= arb_fee the profit band sits inside the
// no-arbitrage band.
TEST(Fees, BandOrderingAcrossFeeGrid) {
  std::vector<double> grid = {0.0, bps(1), bps(5), bps(10), bps(20), bps(50)};
  for (double e0 : grid)
    for (double e1 : grid) {
      auto b = region_bounds(FeeSchedule::make(e0, e1));
      EXPECT_LE(b.arb_low, b.profit_low);
      EXPECT_LE(b.profit_high, b.arb_high);
      EXPECT_LE(b.arb_low, b.sell_bound);
      EXPECT_LE(b.buy_bound, b.arb_high);
      if (e1 < e0)
        EXPECT_LT(b.sell_bound, b.buy_bound);
      else
        EXPECT_GE(b.sell_bound, b.buy_bound);
    }
}

TEST(Fees, BoundsMoveTheRightWay) {
  auto base = region_bounds(FeeSchedule::make(bps(20), bps(10)));
  auto more_amm = region_bounds(FeeSchedule::make(bps(20), bps(12)));
  auto more_cex = region_bounds(FeeSchedule::make(bps(25), bps(10)));
  // Raising the AMM fee shrinks the routing band and widens the arb band.
  EXPECT_LT(more_amm.buy_bound, base.buy_bound);
  EXPECT_GT(more_amm.sell_bound, base.sell_bound);
  EXPECT_LT(more_amm.arb_low, base.arb_low);
  EXPECT_GT(more_amm.arb_high, base.arb_high);
  // Raising the CEX fee does the opposite for the routing band.
  EXPECT_GT(more_cex.buy_bound, base.buy_bound);
  EXPECT_LT(more_cex.sell_bound, base.sell_bound);
}

// buy_bound is exactly the indifference point of a marginal buyer comparing
// all-in prices on both venues.
TEST(Fees, BuyBoundMatchesVenueIndifference) {
  auto f = FeeSchedule::make(bps(35), bps(10));
  auto b = region_bounds(f);
  double s0 = 2500.0;
  for (double eps : {-1e-6, 1e-6}) {
    double r = b.buy_bound + eps;
    double amm_cost = r * s0 * (1.0 + f.amm_fee);
    double cex_cost = s0 * (1.0 + f.cex_fee);
    if (eps < 0)
      EXPECT_LT(amm_cost, cex_cost);
    else
      EXPECT_GT(amm_cost, cex_cost);
  }
}
