#pragma once

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

#include "amm/ensemble.hpp"
#include "amm/histogram.hpp"
#include "amm/market_data.hpp"
#include "amm/sim.hpp"
#include "amm/version.hpp"

namespace amm {

// Search grid for (sigma, cex_fee, demand); demand is total fundamental flow
// per day.  The AMM fee is known (it is posted on-chain) and held fixed.
struct CalibrationGrid {
  std::vector<double> sigma;
  std::vector<double> cex_fee;
  std::vector<double> demand;
};

struct CalibrationOptions {
  double amm_fee = bps(30);
  int paths_per_point = 8;
  int bins = 101;
  int refine_passes = 1;
  bool historical_prices = false;  // drive every simulation with the observed
                                   // CEX path; only (cex_fee, demand) vary
  uint64_t seed = kDefaultSeed;
  int workers = 0;
};

struct CalibrationPoint {
  double sigma = 0, cex_fee = 0, demand = 0;
  double distance = 0;
};

struct CalibrationResult {
  double sigma = 0, cex_fee = 0, demand = 0;
  double distance = 0;
  std::vector<CalibrationPoint> trace;  // every point evaluated, in order
  HistogramSpec spec;                   // shared bin edges
  Histogram empirical;
  Histogram fitted;  // simulated histogram at the reported parameters
};

namespace detail {

inline double percentile(std::vector<double> v, double q) {
  std::sort(v.begin(), v.end());
  double pos = q * double(v.size() - 1);
  size_t lo = size_t(pos);
  size_t hi = std::min(lo + 1, v.size() - 1);
  double frac = pos - double(lo);
  return v[lo] * (1.0 - frac) + v[hi] * frac;
}

}  // namespace detail

// Picks the parameters whose simulated log price-ratio distribution is
// closest (L2 on shared bins) to the observed one.  Exhaustive grid search
// plus refine_passes rounds of halving the spacing around the incumbent.
// Every point runs on a sub-seed derived from its coordinate values, so the
// search order never changes any point's result.
inline CalibrationResult calibrate(const MarketData& data,
                                   const CalibrationGrid& grid,
                                   const CalibrationOptions& opts) {
  if (grid.sigma.empty() || grid.cex_fee.empty() || grid.demand.empty())
    throw std::invalid_argument("calibration grid has an empty axis");
  if (opts.historical_prices && grid.sigma.size() != 1)
    throw std::invalid_argument(
        "historical-price calibration searches cex_fee and demand only; "
        "give a single sigma");
  if (opts.paths_per_point < 1)
    throw std::invalid_argument("paths_per_point must be positive");
  if (opts.bins < 2) throw std::invalid_argument("need at least two bins");

  auto samples = empirical_log_ratio(data);
  double lo = detail::percentile(samples, 0.001);
  double hi = detail::percentile(samples, 0.999);
  if (!(lo < hi)) {
    lo -= 1e-6;
    hi += 1e-6;
  }
  HistogramSpec spec{lo, hi, opts.bins};
  Histogram empirical(spec);
  for (double s : samples) empirical.add(s);

  const int n_steps = int(data.t_ms.size()) - 1;
  PriceModel historical = HistoricalSeries{
      std::make_shared<PricePath>(cex_path(data))};

  auto evaluate = [&](double sigma, double cex_fee, double demand) {
    SimConfig cfg;
    cfg.fees = FeeSchedule::make(cex_fee, opts.amm_fee);
    cfg.reserve_x0 = data.mean_reserve_x;
    cfg.reserve_y0 = data.mean_reserve_y;
    cfg.cex_price0 = data.cex_price.front();
    cfg.n_steps = n_steps;
    cfg.horizon = n_steps * data.dt;
    cfg.buy_demand = 0.5 * demand;
    cfg.sell_demand = 0.5 * demand;
    cfg.noise_volume = 0.0;
    if (opts.historical_prices)
      cfg.model = historical;
    else
      cfg.model = GbmParams{sigma, 0.0};
    cfg.seed = rng::mix_seed(opts.seed, {std::bit_cast<uint64_t>(sigma),
                                         std::bit_cast<uint64_t>(cex_fee),
                                         std::bit_cast<uint64_t>(demand)});
    EnsembleOptions eo;
    eo.workers = opts.workers;
    eo.ratio_histogram = true;
    eo.post_trade_ratios = true;  // reserve snapshots in data are post-trade
    eo.ratio_spec = spec;
    auto ens = run_ensemble(cfg, opts.paths_per_point, eo);
    return std::move(ens.ratio_hist);
  };

  CalibrationResult res;
  res.spec = spec;
  res.empirical = empirical;
  res.distance = INFINITY;

  auto run_grid = [&](const std::vector<double>& sig,
                      const std::vector<double>& fee,
                      const std::vector<double>& dem) {
    for (double s : sig)
      for (double f : fee)
        for (double d : dem) {
          bool seen = false;
          for (const auto& p : res.trace)
            if (p.sigma == s && p.cex_fee == f && p.demand == d) seen = true;
          if (seen) continue;
          Histogram sim = evaluate(s, f, d);
          CalibrationPoint pt{s, f, d, histogram_l2(sim, empirical)};
          res.trace.push_back(pt);
          if (pt.distance < res.distance) {
            res.distance = pt.distance;
            res.sigma = s;
            res.cex_fee = f;
            res.demand = d;
            res.fitted = std::move(sim);
          }
        }
  };

  run_grid(grid.sigma, grid.cex_fee, grid.demand);

  // Candidates at half the local spacing on each side of the incumbent.
  auto refined_axis = [](const std::vector<double>& axis, double center) {
    std::vector<double> out{center};
    if (axis.size() < 2) return out;
    size_t j = 0;
    for (size_t i = 0; i < axis.size(); ++i)
      if (std::fabs(axis[i] - center) < std::fabs(axis[j] - center)) j = i;
    if (j > 0) out.push_back(center - 0.5 * (center - axis[j - 1]));
    if (j + 1 < axis.size()) out.push_back(center + 0.5 * (axis[j + 1] - center));
    std::sort(out.begin(), out.end());
    return out;
  };

  for (int pass = 0; pass < opts.refine_passes; ++pass)
    run_grid(refined_axis(grid.sigma, res.sigma),
             refined_axis(grid.cex_fee, res.cex_fee),
             refined_axis(grid.demand, res.demand));
  return res;
}

}  // namespace amm
