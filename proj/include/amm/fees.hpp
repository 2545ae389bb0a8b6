#pragma once

#include <cmath>
#include <stdexcept>

namespace amm {

// Basis points to fraction: bps(15) == 0.0015.
constexpr double bps(double b) { return b * 1e-4; }

// All fees are proportional and quoted as fractions of notional.
struct FeeSchedule {
  double cex_fee = 0.0;    // cost of trading on the centralized exchange
  double amm_fee = 0.0;    // pool fee charged on every AMM fill
  double arb_fee = 0.0;    // CEX-side cost paid by the arbitrageur when unwinding
  double hedge_fee = 0.0;  // cost per unit notional of rebalancing the LP hedge

  // The arbitrageur usually faces the same CEX cost as everyone else.
  static FeeSchedule make(double cex_fee, double amm_fee) {
    return {cex_fee, amm_fee, cex_fee, 0.0};
  }
};

inline void validate(const FeeSchedule& f) {
  for (double v : {f.cex_fee, f.amm_fee, f.arb_fee, f.hedge_fee}) {
    if (!(v >= 0.0 && v < 1.0) || !std::isfinite(v))
      throw std::invalid_argument("fee out of range [0,1)");
  }
}

// Thresholds on the price ratio R = amm_price / cex_price that partition
// trader behaviour.  All are pure functions of the fee schedule:
//   buyers route to the AMM while R <= buy_bound,
//   sellers while R >= sell_bound,
//   the arbitrageur fires when R leaves [arb_low, arb_high],
//   a marginal AMM trade profits the (hedged) LP inside [profit_low, profit_high].
struct RegionBounds {
  double buy_bound = 0.0;
  double sell_bound = 0.0;
  double arb_low = 0.0;
  double arb_high = 0.0;
  double profit_low = 0.0;
  double profit_high = 0.0;
};

inline RegionBounds region_bounds(const FeeSchedule& f) {
  validate(f);
  return {
      (1.0 + f.cex_fee) / (1.0 + f.amm_fee),
      (1.0 - f.cex_fee) / (1.0 - f.amm_fee),
      (1.0 - f.arb_fee) / (1.0 + f.amm_fee),
      (1.0 + f.arb_fee) / (1.0 - f.amm_fee),
      (1.0 + f.hedge_fee) / (1.0 + f.amm_fee),
      (1.0 - f.hedge_fee) / (1.0 - f.amm_fee),
  };
}

}  // namespace amm
