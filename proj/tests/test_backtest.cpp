#include "amm/backtest.hpp"

#include <gtest/gtest.h>

#include <cmath>
#include <cstring>

#include "amm/market_data.hpp"
#include "fixture.hpp"

using namespace amm;

namespace {

SimConfig generator() {
  SimConfig cfg;
  cfg.n_steps = 500;
  cfg.horizon = 500.0 / 1440.0;
  cfg.seed = 777;
  return cfg;
}

const testfix::SyntheticMarket& market() {
  static testfix::SyntheticMarket m = testfix::make_market(generator());
  return m;
}

}  // namespace

TEST(Backtest, ReplaysTheGeneratingRunExactly) {
  const auto& m = market();
  SimConfig cfg = generator();
  auto bt = backtest(cex_path(m.data), cfg);

  // The reserve history was reconstructed from this very engine, so replaying
  // the same seed against the same prices must land on the same ratios.
  auto observed = empirical_log_ratio(m.data);
  ASSERT_EQ(bt.path.post_log_ratio.size() + 1, observed.size());
  for (size_t i = 0; i < bt.path.post_log_ratio.size(); ++i)
    EXPECT_NEAR(bt.path.post_log_ratio[i], observed[i + 1], 1e-12) << "step " << i;
}

TEST(Backtest, TakesItsShapeFromTheData) {
  const auto& m = market();
  auto bt = backtest(cex_path(m.data), generator());
  int n = int(m.data.t_ms.size()) - 1;
  EXPECT_EQ(bt.config.n_steps, n);
  EXPECT_DOUBLE_EQ(bt.config.horizon, n * m.data.dt);
  EXPECT_DOUBLE_EQ(bt.config.cex_price0, m.data.cex_price.front());
  EXPECT_EQ(bt.cex.values.size(), m.data.cex_price.size());
  for (size_t i = 0; i < bt.cex.values.size(); ++i)
    EXPECT_DOUBLE_EQ(bt.cex.values[i], m.data.cex_price[i]);
  auto b = region_bounds(generator().fees);
  EXPECT_DOUBLE_EQ(bt.bounds.buy_bound, b.buy_bound);
  EXPECT_DOUBLE_EQ(bt.bounds.arb_high, b.arb_high);
}

TEST(Backtest, RecordsTheFullPath) {
  const auto& m = market();
  auto bt = backtest(cex_path(m.data), generator());
  size_t n = size_t(bt.config.n_steps);
  ASSERT_EQ(bt.path.unhedged.size(), n + 1);
  ASSERT_EQ(bt.path.hedged.size(), n + 1);
  ASSERT_EQ(bt.path.fees.size(), n + 1);
  ASSERT_EQ(bt.path.pre_log_ratio.size(), n);
  ASSERT_EQ(bt.path.post_log_ratio.size(), n);
  EXPECT_FALSE(bt.path.trades.empty());
  const auto& st = bt.path.stats;
  EXPECT_NEAR(st.hedged_pnl, st.fees_total - st.tracking_error,
              1e-8 * (std::fabs(st.fees_total) + std::fabs(st.tracking_error)));
}

TEST(Backtest, ConfigCarriesTheSeriesItRan) {
  const auto& m = market();
  auto bt = backtest(cex_path(m.data), generator());
  const auto* h = std::get_if<HistoricalSeries>(&bt.config.model);
  ASSERT_NE(h, nullptr);
  ASSERT_NE(h->path, nullptr);
  ASSERT_EQ(h->path->values.size(), bt.cex.values.size());
  EXPECT_DOUBLE_EQ(h->path->values.back(), bt.cex.values.back());
}

TEST(Backtest, SeedOnlyMattersWhenOrderingDoes) {
  const auto& m = market();
  SimConfig cfg = generator();
  cfg.buy_demand = cfg.sell_demand = 0.0;  // arb only: no coin flips in play
  auto a = backtest(cex_path(m.data), cfg);
  cfg.seed = 31337;
  auto b = backtest(cex_path(m.data), cfg);
  EXPECT_EQ(std::memcmp(&a.path.stats, &b.path.stats, sizeof(PathStats)), 0);
}

TEST(Backtest, RejectsASeriesWithNoSteps) {
  PricePath p;
  p.dt = 1.0 / 1440.0;
  p.values = {3000.0};
  EXPECT_THROW(backtest(p, generator()), std::invalid_argument);
}
