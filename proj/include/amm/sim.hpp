#pragma once

#include <cmath>
#include <cstdint>
#include <span>
#include <stdexcept>
#include <vector>

#include "amm/errors.hpp"
#include "amm/fees.hpp"
#include "amm/pool.hpp"
#include "amm/price_path.hpp"
#include "amm/routing.hpp"
#include "amm/rng.hpp"
#include "amm/version.hpp"

namespace amm {

struct SimConfig {
  FeeSchedule fees = FeeSchedule::make(bps(20), bps(15));
  double reserve_x0 = 3.0e7;
  double reserve_y0 = 1.0e4;
  double cex_price0 = 3000.0;
  int n_steps = 1440;
  double horizon = 1.0;        // days
  double buy_demand = 5000.0;  // fundamental buy flow, risky units per day
  double sell_demand = 5000.0; // fundamental sell flow per day (magnitude)
  double noise_volume = 0.0;   // uninformed round-trip flow per day
  PriceModel model = GbmParams{0.04, 0.0};
  uint64_t seed = kDefaultSeed;

  double dt() const { return horizon / n_steps; }
};

inline void validate(const SimConfig& c) {
  validate(c.fees);
  if (!(c.reserve_x0 > 0.0) || !(c.reserve_y0 > 0.0))
    throw std::invalid_argument("initial reserves must be positive");
  if (!(c.cex_price0 > 0.0))
    throw std::invalid_argument("initial price must be positive");
  if (c.n_steps < 1) throw std::invalid_argument("need at least one step");
  if (!(c.horizon > 0.0)) throw std::invalid_argument("horizon must be positive");
  if (!(c.buy_demand >= 0.0) || !(c.sell_demand >= 0.0) || !(c.noise_volume >= 0.0))
    throw std::invalid_argument("flow rates must be non-negative");
}

// Per-path scalars, cheap enough to keep for every path of a large ensemble.
struct PathStats {
  double unhedged_pnl = 0.0;       // terminal LP value change plus fees
  double hedged_pnl = 0.0;         // terminal, net of the hedge account
  double tracking_error = 0.0;     // terminal hedge shortfall
  double fees_total = 0.0;
  double volume_by_class[kTraderClassCount] = {};  // sum |delta_y| per class
  double fees_by_class[kTraderClassCount] = {};
  int64_t samples = 0;    // pre-trade ratio observations (== n_steps)
  int64_t in_profit = 0;  // ratio in [profit_low, profit_high)
  int64_t in_buysell = 0; // ratio in [sell_bound, buy_bound)
  int64_t arbed = 0;      // ratio outside [arb_low, arb_high)

  double volume_total() const {
    double v = 0.0;
    for (double x : volume_by_class) v += x;
    return v;
  }
  double volume_fundamental() const {
    return volume_by_class[size_t(TraderClass::kBuyer)] +
           volume_by_class[size_t(TraderClass::kSeller)];
  }
};

struct PathRecording {
  bool series = false;         // per-step pnl / tracking / fees series
  bool trades = false;         // full trade log
  bool ratio_samples = false;  // per-step log price ratios
};

struct PathResult {
  PathStats stats;
  // Step-indexed series, length n_steps+1, entry 0 is the initial state.
  std::vector<double> unhedged;
  std::vector<double> hedged;
  std::vector<double> tracking;
  std::vector<double> fees;
  // Step 1..n_steps observations.
  std::vector<double> pre_log_ratio;   // after the price move, before any trade
  std::vector<double> post_log_ratio;  // after all trades of the step
  std::vector<TradeFill> trades;
};

// Buyer-before-seller flags, one fair coin per step.
inline std::vector<uint8_t> make_order_flags(uint64_t seed, uint64_t path_index,
                                             int n_steps) {
  std::vector<uint8_t> flags(static_cast<size_t>(n_steps));
  for (int i = 0; i < n_steps; ++i)
    flags[size_t(i)] = rng::coin(seed, path_index, uint32_t(i + 1)) ? 1 : 0;
  return flags;
}

// One market path.  Each step: (1) the CEX price moves, (2) the arbitrageur
// closes any gap beyond the no-arbitrage band, (3) fundamental buyers and
// sellers arrive in coin-flip order and route their flow, then noise traders
// churn a round trip, (4) the LP hedge is rebalanced to the pool inventory.
inline PathResult run_path(const SimConfig& cfg, const PricePath& path,
                           std::span<const uint8_t> buyer_first,
                           const PathRecording& rec = {}) {
  validate(cfg);
  if (path.steps() != cfg.n_steps)
    throw std::invalid_argument("price path length does not match n_steps");
  if (int(buyer_first.size()) != cfg.n_steps)
    throw std::invalid_argument("order flag count does not match n_steps");
  if (!(path.values[0] > 0.0))
    throw std::invalid_argument("price path must start positive");

  const RegionBounds bounds = region_bounds(cfg.fees);
  const double dt = cfg.dt();
  const double buy_step = cfg.buy_demand * dt;
  const double sell_step = -cfg.sell_demand * dt;
  const double noise_half = 0.5 * cfg.noise_volume * dt;

  PoolState pool{cfg.reserve_x0, cfg.reserve_y0, 0.0};
  const double value0 = cfg.reserve_x0 + cfg.reserve_y0 * path.values[0];
  double hedge = value0;  // self-financing account holding the replica

  PathResult out;
  auto& st = out.stats;
  if (rec.series) {
    out.unhedged.reserve(size_t(cfg.n_steps) + 1);
    out.hedged.reserve(size_t(cfg.n_steps) + 1);
    out.tracking.reserve(size_t(cfg.n_steps) + 1);
    out.fees.reserve(size_t(cfg.n_steps) + 1);
    out.unhedged.push_back(0.0);
    out.hedged.push_back(0.0);
    out.tracking.push_back(0.0);
    out.fees.push_back(0.0);
  }
  if (rec.ratio_samples) {
    out.pre_log_ratio.reserve(size_t(cfg.n_steps));
    out.post_log_ratio.reserve(size_t(cfg.n_steps));
  }

  auto book = [&](const TradeFill& fill, int step) {
    st.volume_by_class[size_t(fill.cls)] += std::fabs(fill.delta_y);
    st.fees_by_class[size_t(fill.cls)] += fill.fee_x;
    if (rec.trades) {
      out.trades.push_back(fill);
      out.trades.back().step = step;
    }
  };

  for (int i = 1; i <= cfg.n_steps; ++i) {
    const double s_prev = path.values[size_t(i) - 1];
    const double s = path.values[size_t(i)];
    if (!std::isfinite(s) || !(s > 0.0))
      throw NumericError("non-finite CEX price at step " + std::to_string(i));
    const double y_prev = pool.reserve_y;

    // Ratio observed between the price move and any trading.
    double r = (pool.reserve_x / pool.reserve_y) / s;
    ++st.samples;
    if (r >= bounds.profit_low && r < bounds.profit_high) ++st.in_profit;
    if (r >= bounds.sell_bound && r < bounds.buy_bound) ++st.in_buysell;
    if (!(r >= bounds.arb_low && r < bounds.arb_high)) ++st.arbed;
    if (rec.ratio_samples) out.pre_log_ratio.push_back(std::log(r));

    if (!(r >= bounds.arb_low && r < bounds.arb_high)) {
      double d = arb_trade_size(pool, s, cfg.fees);
      if (d != 0.0) book(apply_trade(pool, d, cfg.fees, TraderClass::kArb), i);
    }

    auto do_buy = [&] {
      if (buy_step <= 0.0) return;
      double d = routed_buy_size(pool, s, cfg.fees, buy_step);
      if (d > 0.0) book(apply_trade(pool, d, cfg.fees, TraderClass::kBuyer), i);
    };
    auto do_sell = [&] {
      if (sell_step >= 0.0) return;
      double d = routed_sell_size(pool, s, cfg.fees, sell_step);
      if (d < 0.0) book(apply_trade(pool, d, cfg.fees, TraderClass::kSeller), i);
    };
    if (buyer_first[size_t(i) - 1]) {
      do_buy();
      do_sell();
    } else {
      do_sell();
      do_buy();
    }

    // Noise flow is uninformed and does not route: a buy and a matching sell
    // land the reserves back where they were, leaving only fee revenue.
    if (noise_half > 0.0) {
      book(apply_trade(pool, noise_half, cfg.fees, TraderClass::kNoise), i);
      book(apply_trade(pool, -noise_half, cfg.fees, TraderClass::kNoise), i);
    }

    if (!std::isfinite(pool.reserve_x) || !std::isfinite(pool.reserve_y))
      throw NumericError("non-finite reserves at step " + std::to_string(i));

    // Hedge: short y_prev units over the move, then rebalance at the new price.
    double rebalance_cost =
        cfg.fees.hedge_fee * s * std::fabs(pool.reserve_y - y_prev);
    hedge += y_prev * (s - s_prev) - rebalance_cost;

    if (rec.ratio_samples)
      out.post_log_ratio.push_back(std::log((pool.reserve_x / pool.reserve_y) / s));

    if (rec.series || i == cfg.n_steps) {
      double value = pool.reserve_x + pool.reserve_y * s;
      double unhedged = value - value0 + pool.fees_x;
      double tracking = hedge - value;
      double hedged = unhedged - (hedge - value0);
      if (rec.series) {
        out.unhedged.push_back(unhedged);
        out.hedged.push_back(hedged);
        out.tracking.push_back(tracking);
        out.fees.push_back(pool.fees_x);
      }
      if (i == cfg.n_steps) {
        st.unhedged_pnl = unhedged;
        st.hedged_pnl = hedged;
        st.tracking_error = tracking;
        st.fees_total = pool.fees_x;
      }
    }
  }
  return out;
}

// Convenience wrapper: draws the price path and order flags for path_index
// from the config seed.
inline PathResult run_path(const SimConfig& cfg, uint64_t path_index,
                           const PathRecording& rec = {}) {
  PricePath local;
  const PricePath* path = &local;
  if (const auto* h = std::get_if<HistoricalSeries>(&cfg.model)) {
    if (!h->path) throw std::invalid_argument("historical series not set");
    path = h->path.get();
  } else {
    local = make_path(cfg.model, cfg.cex_price0, cfg.n_steps, cfg.dt(),
                      cfg.seed, path_index);
  }
  auto flags = make_order_flags(cfg.seed, path_index, cfg.n_steps);
  return run_path(cfg, *path, flags, rec);
}

}  // namespace amm
