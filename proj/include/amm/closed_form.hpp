#pragma once

#include <cmath>
#include <stdexcept>

namespace amm {

// Expected AMM fee revenue per period in the large-demand limit, where both
// fundamental sides fully exploit the routing band every step.  Grows like
// x0 * amm_fee * (2*cex_fee - 2*amm_fee) to second order, so revenue peaks
// near amm_fee = cex_fee / 2 and vanishes once amm_fee reaches cex_fee.
inline double infinite_demand_revenue(double cex_fee, double amm_fee,
                                      double reserve_x0) {
  if (!(cex_fee >= 0.0 && cex_fee < 1.0) || !(amm_fee >= 0.0 && amm_fee < 1.0))
    throw std::invalid_argument("fee out of range [0,1)");
  if (!(reserve_x0 > 0.0))
    throw std::invalid_argument("reserve must be positive");
  double up = std::sqrt((1.0 + cex_fee) * (1.0 - amm_fee) /
                        ((1.0 + amm_fee) * (1.0 - cex_fee)));
  double down = std::sqrt((1.0 - cex_fee) * (1.0 + amm_fee) /
                          ((1.0 - amm_fee) * (1.0 + cex_fee)));
  return 0.75 * reserve_x0 * amm_fee * (up - down);
}

struct FeeOptimum {
  double amm_fee = 0.0;
  double revenue = 0.0;  // per period, per unit of reserve_x0
};

// Revenue-maximizing pool fee in the large-demand limit, by golden-section
// search on [0, cex_fee] (the revenue is unimodal there and non-positive
// beyond).  Close to cex_fee / 2 for small fees.
inline FeeOptimum approx_optimal_fee(double cex_fee) {
  if (!(cex_fee >= 0.0 && cex_fee < 1.0))
    throw std::invalid_argument("fee out of range [0,1)");
  if (cex_fee == 0.0) return {0.0, 0.0};
  auto rev = [&](double f) { return infinite_demand_revenue(cex_fee, f, 1.0); };
  const double inv_phi = 0.6180339887498949;
  double a = 0.0, b = cex_fee;
  double c = b - inv_phi * (b - a);
  double d = a + inv_phi * (b - a);
  double fc = rev(c), fd = rev(d);
  for (int it = 0; it < 200 && (b - a) > 1e-12 * cex_fee; ++it) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - inv_phi * (b - a);
      fc = rev(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + inv_phi * (b - a);
      fd = rev(d);
    }
  }
  double mid = 0.5 * (a + b);
  return {mid, rev(mid)};
}

}  // namespace amm
