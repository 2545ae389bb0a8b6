#pragma once

#include <memory>
#include <utility>

#include "amm/historical.hpp"
#include "amm/sim.hpp"

namespace amm {

struct BacktestResult {
  SimConfig config;     // resolved configuration actually run
  RegionBounds bounds;
  PricePath cex;
  PathResult path;      // full series, ratios and trade log
};

// Replays the trade dynamics against an observed CEX price series: one fully
// recorded path whose randomness is only the per-step order coin flips.
inline BacktestResult backtest(PricePath cex, SimConfig cfg) {
  if (cex.steps() < 1) throw std::invalid_argument("price series too short");
  cfg.n_steps = cex.steps();
  cfg.horizon = cex.steps() * cex.dt;
  cfg.cex_price0 = cex.values.front();

  BacktestResult out;
  out.bounds = region_bounds(cfg.fees);
  PathRecording rec;
  rec.series = true;
  rec.trades = true;
  rec.ratio_samples = true;
  auto flags = make_order_flags(cfg.seed, 0, cfg.n_steps);
  out.path = run_path(cfg, cex, flags, rec);
  cfg.model = HistoricalSeries{std::make_shared<PricePath>(cex)};
  out.config = std::move(cfg);
  out.cex = std::move(cex);
  return out;
}

}  // namespace amm
