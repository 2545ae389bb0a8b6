#pragma once

#include <algorithm>
#include <cmath>

#include "amm/fees.hpp"
#include "amm/pool.hpp"

namespace amm {

namespace detail {

// sqrt(num/den) for ratios close to 1.  Falls back to exp(log/2) when the
// ratio strays outside e^+-0.1, which keeps the relative error bounded for
// extreme price gaps (never reached at realistic fees).
inline double boundary_root(double num, double den) {
  double q = num / den;
  if (q < 0.90483741803595957 || q > 1.1051709180756477)
    return std::exp(0.5 * std::log(q));
  return std::sqrt(q);
}

}  // namespace detail

// Profit-maximizing arbitrage size against a CEX quote.  Positive = buy on
// the AMM (sell on the CEX), negative = sell on the AMM.  The trade moves
// the pool price exactly onto the nearer edge of the no-arbitrage band; if
// the price already sits inside the band the size is zero.
inline double arb_trade_size(const PoolState& p, double cex_price,
                             const FeeSchedule& f) {
  double s1 = marginal_price(p);
  double sell = p.reserve_y *
                (1.0 - detail::boundary_root(s1 * (1.0 - f.amm_fee),
                                             cex_price * (1.0 + f.arb_fee)));
  if (sell < 0.0) return sell;
  double buy = p.reserve_y *
               (1.0 - detail::boundary_root(s1 * (1.0 + f.amm_fee),
                                            cex_price * (1.0 - f.arb_fee)));
  if (buy > 0.0) return buy;
  return 0.0;
}

// Cost-optimal AMM slice of a fundamental buy order of `demand` (> 0) risky
// units: fill on the AMM until its all-in price reaches the CEX all-in
// price, send the rest to the CEX.
inline double routed_buy_size(const PoolState& p, double cex_price,
                              const FeeSchedule& f, double demand) {
  double s1 = marginal_price(p);
  double cap = p.reserve_y *
               (1.0 - detail::boundary_root(s1 * (1.0 + f.amm_fee),
                                            cex_price * (1.0 + f.cex_fee)));
  return std::max(std::min(demand, cap), 0.0);
}

// Same for a sell order of `demand` (< 0) risky units.
inline double routed_sell_size(const PoolState& p, double cex_price,
                               const FeeSchedule& f, double demand) {
  double s1 = marginal_price(p);
  double cap = p.reserve_y *
               (1.0 - detail::boundary_root(s1 * (1.0 - f.amm_fee),
                                            cex_price * (1.0 - f.cex_fee)));
  return std::min(std::max(demand, cap), 0.0);
}

// Profit to a hedged liquidity provider from one marginal unit trade at the
// current prices, fees included.  Positive inside [profit_low, profit_high).
inline double marginal_lp_pnl(double delta_y, double cex_price,
                              double amm_price, const FeeSchedule& f) {
  double r = amm_price / cex_price;
  if (delta_y > 0.0)
    return delta_y * cex_price * ((1.0 + f.amm_fee) * r - (1.0 + f.hedge_fee));
  if (delta_y < 0.0)
    return delta_y * cex_price * ((1.0 - f.amm_fee) * r - (1.0 - f.hedge_fee));
  return 0.0;
}

}  // namespace amm
