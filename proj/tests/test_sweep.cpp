#include "amm/sweep.hpp"

#include <gtest/gtest.h>

#include <cstring>
#include <vector>

using namespace amm;

namespace {

SimConfig tiny_base() {
  SimConfig cfg;
  cfg.n_steps = 64;
  cfg.horizon = 64.0 / 1440.0;
  return cfg;
}

SweepAxes tiny_axes() {
  SweepAxes ax;
  ax.amm_fee = {bps(10), bps(15), bps(20)};
  ax.sigma = {0.03, 0.05};
  ax.demand = {4000.0, 10000.0};
  ax.cex_fee = {bps(20)};
  return ax;
}

SweepOptions tiny_opts() {
  SweepOptions opts;
  opts.paths_per_cell = 32;
  opts.workers = 1;
  return opts;
}

// A 1x1x1x3 surface with chosen fee-column pnls, for the selection logic.
PnlSurface toy_surface(std::vector<double> pnls) {
  PnlSurface surf;
  surf.axes.amm_fee = {bps(10), bps(20), bps(30)};
  surf.axes.sigma = {0.04};
  surf.axes.demand = {10000.0};
  surf.axes.cex_fee = {bps(20)};
  surf.cells.resize(3);
  for (int i = 0; i < 3; ++i) {
    auto& c = surf.cells[size_t(i)];
    c.i_amm_fee = i;
    c.amm_fee = surf.axes.amm_fee[size_t(i)];
    c.stats.mean_hedged_pnl = pnls[size_t(i)];
  }
  return surf;
}

}  // namespace

TEST(Sweep, GridIsRowMajorWithMatchingCoordinates) {
  auto surf = sweep(tiny_base(), tiny_axes(), tiny_opts());
  ASSERT_EQ(surf.cells.size(), 2u * 2u * 1u * 3u);
  for (int is = 0; is < 2; ++is)
    for (int id = 0; id < 2; ++id)
      for (int ie1 = 0; ie1 < 3; ++ie1) {
        const auto& c = surf.at(is, id, 0, ie1);
        EXPECT_EQ(c.i_sigma, is);
        EXPECT_EQ(c.i_demand, id);
        EXPECT_EQ(c.i_cex_fee, 0);
        EXPECT_EQ(c.i_amm_fee, ie1);
        EXPECT_DOUBLE_EQ(c.sigma, surf.axes.sigma[size_t(is)]);
        EXPECT_DOUBLE_EQ(c.demand, surf.axes.demand[size_t(id)]);
        EXPECT_DOUBLE_EQ(c.amm_fee, surf.axes.amm_fee[size_t(ie1)]);
        EXPECT_EQ(c.stats.n_paths, 32);
      }
}

TEST(Sweep, FeeColumnsShareRandomness) {
  SimConfig base = tiny_base();
  auto surf = sweep(base, tiny_axes(), tiny_opts());

  // Rebuild one cell by hand: same sub-seed (fee index excluded), same grid
  // values, same ensemble size.
  SimConfig cfg = base;
  cfg.seed = rng::mix_seed(base.seed, {1, 0, 0});
  std::get<GbmParams>(cfg.model).sigma = 0.05;
  cfg.buy_demand = cfg.sell_demand = 2000.0;
  cfg.fees.cex_fee = cfg.fees.arb_fee = bps(20);
  cfg.fees.amm_fee = bps(15);
  EnsembleOptions eopts;
  eopts.workers = 1;
  eopts.ratio_histogram = false;
  auto expect = summarize(run_ensemble(cfg, 32, eopts));

  const auto& got = surf.at(1, 0, 0, 1).stats;
  EXPECT_EQ(std::memcmp(&got, &expect, sizeof expect), 0);
}

TEST(Sweep, DegenerateCellIsExactlyZero) {
  SimConfig base = tiny_base();
  SweepAxes ax;
  ax.amm_fee = {bps(10), bps(30)};
  ax.sigma = {0.0};
  ax.demand = {0.0};
  ax.cex_fee = {bps(20)};
  auto surf = sweep(base, ax, tiny_opts());
  for (const auto& c : surf.cells) {
    EXPECT_DOUBLE_EQ(c.stats.mean_hedged_pnl, 0.0);
    EXPECT_DOUBLE_EQ(c.stats.mean_fees, 0.0);
    EXPECT_DOUBLE_EQ(c.stats.mean_volume, 0.0);
    EXPECT_DOUBLE_EQ(c.stats.p_arb, 0.0);
  }
  auto opt = optimal_fee(surf, 0, 0, 0);
  EXPECT_TRUE(opt.halt);
  EXPECT_DOUBLE_EQ(opt.amm_fee, bps(30));  // ties resolve to the larger fee
}

TEST(Sweep, ResumeReusesPrecomputedCells) {
  SimConfig base = tiny_base();
  auto axes = tiny_axes();

  std::vector<SweepCell> seen;
  SweepOptions first = tiny_opts();
  first.on_cell = [&](const SweepCell& c) { seen.push_back(c); };
  auto full = sweep(base, axes, first);
  ASSERT_EQ(seen.size(), full.cells.size());

  std::vector<SweepCell> half(seen.begin(), seen.begin() + 6);
  int recomputed = 0;
  SweepOptions resume = tiny_opts();
  resume.precomputed = half;
  resume.on_cell = [&](const SweepCell&) { ++recomputed; };
  auto again = sweep(base, axes, resume);
  EXPECT_EQ(recomputed, int(full.cells.size()) - 6);
  ASSERT_EQ(again.cells.size(), full.cells.size());
  for (size_t i = 0; i < full.cells.size(); ++i)
    EXPECT_EQ(std::memcmp(&again.cells[i].stats, &full.cells[i].stats,
                          sizeof(SummaryStats)),
              0)
        << "cell " << i;
}

TEST(Sweep, PrecomputedCellsAreTrustedVerbatim) {
  SimConfig base = tiny_base();
  auto axes = tiny_axes();
  SweepCell fake;
  fake.i_sigma = 0;
  fake.i_demand = 0;
  fake.i_cex_fee = 0;
  fake.i_amm_fee = 2;
  fake.stats.mean_hedged_pnl = 123456.0;
  SweepOptions opts = tiny_opts();
  opts.precomputed = {fake};
  auto surf = sweep(base, axes, opts);
  EXPECT_DOUBLE_EQ(surf.at(0, 0, 0, 2).stats.mean_hedged_pnl, 123456.0);

  fake.i_amm_fee = 99;
  opts.precomputed = {fake};
  EXPECT_THROW(sweep(base, axes, opts), std::invalid_argument);
}

TEST(Sweep, RejectsBadInputs) {
  SimConfig base = tiny_base();
  auto axes = tiny_axes();
  {
    auto broken = axes;
    broken.sigma.clear();
    EXPECT_THROW(sweep(base, broken, tiny_opts()), std::invalid_argument);
  }
  {
    auto broken = axes;
    broken.amm_fee = {bps(20), bps(10)};
    EXPECT_THROW(sweep(base, broken, tiny_opts()), std::invalid_argument);
  }
  {
    auto opts = tiny_opts();
    opts.paths_per_cell = 0;
    EXPECT_THROW(sweep(base, axes, opts), std::invalid_argument);
  }
  {
    auto hist = base;
    hist.model = HistoricalSeries{};
    EXPECT_THROW(sweep(hist, axes, tiny_opts()), std::invalid_argument);
  }
}

TEST(OptimalFee, PicksTheArgmax) {
  auto opt = optimal_fee(toy_surface({5.0, 9.0, 7.0}), 0, 0, 0);
  EXPECT_FALSE(opt.halt);
  EXPECT_DOUBLE_EQ(opt.amm_fee, bps(20));
  EXPECT_DOUBLE_EQ(opt.mean_pnl, 9.0);
}

TEST(OptimalFee, HaltsWhenNoFeeIsProfitable) {
  auto opt = optimal_fee(toy_surface({-1.0, -2.0, -3.0}), 0, 0, 0);
  EXPECT_TRUE(opt.halt);
  EXPECT_DOUBLE_EQ(opt.amm_fee, bps(10));
  EXPECT_DOUBLE_EQ(opt.mean_pnl, -1.0);
}

TEST(OptimalFee, TiesGoToTheLargerFee) {
  auto opt = optimal_fee(toy_surface({4.0, 4.0, 1.0}), 0, 0, 0);
  EXPECT_DOUBLE_EQ(opt.amm_fee, bps(20));
}

TEST(Regret, MeasuresTheCostOfAFixedFee) {
  auto surf = toy_surface({5.0, 9.0, 7.0});
  auto cells = regret(surf, bps(30));
  ASSERT_EQ(cells.size(), 1u);
  EXPECT_DOUBLE_EQ(cells[0].regret, 2.0);
  EXPECT_DOUBLE_EQ(cells[0].optimal_amm_fee, bps(20));
  auto at_opt = regret(surf, bps(20));
  EXPECT_DOUBLE_EQ(at_opt[0].regret, 0.0);
  EXPECT_THROW(regret(surf, bps(25)), std::invalid_argument);
}
