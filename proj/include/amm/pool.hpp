#pragma once

#include <cmath>
#include <cstddef>
#include <stdexcept>

#include "amm/fees.hpp"

namespace amm {

// Constant-product pool.  reserve_x is the numeraire (say USDC), reserve_y
// the risky asset.  Fees are collected in x and kept outside the reserves,
// so they never compound into the curve.
struct PoolState {
  double reserve_x = 0.0;
  double reserve_y = 0.0;
  double fees_x = 0.0;
};

inline double marginal_price(const PoolState& p) {
  if (!(p.reserve_x > 0.0) || !(p.reserve_y > 0.0))
    throw std::invalid_argument("pool reserves must be positive");
  return p.reserve_x / p.reserve_y;
}

enum class TraderClass { kArb = 0, kBuyer = 1, kSeller = 2, kNoise = 3 };
inline constexpr std::size_t kTraderClassCount = 4;

struct TradeFill {
  double delta_y = 0.0;     // risky units bought (>0) or sold (<0)
  double paid_x = 0.0;      // numeraire paid into (+) or out of (-) the pool
  double fee_x = 0.0;       // pool fee on this fill
  double exec_price = 0.0;  // average execution price paid_x / delta_y
  TraderClass cls = TraderClass::kNoise;
  int step = 0;             // filled in by the engine
};

// Executes a swap of delta_y risky units against the pool.  The buyer pays
// the average execution price X/(Y-d) per unit, which lands the reserves
// back on the same constant-product curve; the fee amm_fee * |d| * price is
// charged on top and accrues to fees_x.
inline TradeFill apply_trade(PoolState& p, double delta_y,
                             const FeeSchedule& fees,
                             TraderClass cls = TraderClass::kNoise) {
  if (!std::isfinite(delta_y))
    throw std::invalid_argument("trade size must be finite");
  if (!(p.reserve_x > 0.0) || !(p.reserve_y > 0.0))
    throw std::invalid_argument("pool reserves must be positive");
  if (delta_y >= p.reserve_y)
    throw std::invalid_argument("trade would drain the pool");

  TradeFill fill;
  fill.delta_y = delta_y;
  fill.cls = cls;
  if (delta_y == 0.0) {
    fill.exec_price = p.reserve_x / p.reserve_y;
    return fill;
  }
  double y_new = p.reserve_y - delta_y;
  double exec = p.reserve_x / y_new;
  fill.exec_price = exec;
  fill.paid_x = delta_y * exec;
  fill.fee_x = fees.amm_fee * std::fabs(delta_y) * exec;
  // x' = x*y/(y-d) keeps the product exact to rounding, unlike x + paid_x.
  p.reserve_x = p.reserve_x * p.reserve_y / y_new;
  p.reserve_y = y_new;
  p.fees_x += fill.fee_x;
  return fill;
}

}  // namespace amm
