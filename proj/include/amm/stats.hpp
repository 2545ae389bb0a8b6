#pragma once

#include <cmath>
#include <span>
#include <stdexcept>
#include <vector>

#include "amm/ensemble.hpp"
#include "amm/sim.hpp"

namespace amm {

struct SummaryStats {
  int n_paths = 0;
  double mean_hedged_pnl = 0.0;
  double sd_hedged_pnl = 0.0;
  double se_hedged_pnl = 0.0;  // standard error of the mean
  double mean_unhedged_pnl = 0.0;
  double sd_unhedged_pnl = 0.0;
  double mean_tracking_error = 0.0;
  double mean_fees = 0.0;
  double mean_volume = 0.0;              // all trader classes
  double mean_volume_fundamental = 0.0;  // buyers + sellers only
  double mean_volume_by_class[kTraderClassCount] = {};
  double mean_fees_by_class[kTraderClassCount] = {};
  double p_profit = 0.0;   // fraction of observations in the LP-profit band
  double p_buysell = 0.0;  // ... in the joint buy & sell band
  double p_arb = 0.0;      // ... outside the no-arbitrage band
};

inline SummaryStats summarize(std::span<const PathStats> paths) {
  if (paths.empty()) throw std::invalid_argument("no paths to summarize");
  SummaryStats s;
  s.n_paths = int(paths.size());
  double sum_h = 0, sum_h2 = 0, sum_u = 0, sum_u2 = 0;
  int64_t samples = 0, in_profit = 0, in_buysell = 0, arbed = 0;
  for (const auto& p : paths) {
    sum_h += p.hedged_pnl;
    sum_h2 += p.hedged_pnl * p.hedged_pnl;
    sum_u += p.unhedged_pnl;
    sum_u2 += p.unhedged_pnl * p.unhedged_pnl;
    s.mean_tracking_error += p.tracking_error;
    s.mean_fees += p.fees_total;
    for (size_t c = 0; c < kTraderClassCount; ++c) {
      s.mean_volume_by_class[c] += p.volume_by_class[c];
      s.mean_fees_by_class[c] += p.fees_by_class[c];
    }
    samples += p.samples;
    in_profit += p.in_profit;
    in_buysell += p.in_buysell;
    arbed += p.arbed;
  }
  double n = double(paths.size());
  s.mean_hedged_pnl = sum_h / n;
  s.mean_unhedged_pnl = sum_u / n;
  s.mean_tracking_error /= n;
  s.mean_fees /= n;
  for (size_t c = 0; c < kTraderClassCount; ++c) {
    s.mean_volume_by_class[c] /= n;
    s.mean_fees_by_class[c] /= n;
    s.mean_volume += s.mean_volume_by_class[c];
  }
  s.mean_volume_fundamental = s.mean_volume_by_class[size_t(TraderClass::kBuyer)] +
                              s.mean_volume_by_class[size_t(TraderClass::kSeller)];
  if (n > 1) {
    s.sd_hedged_pnl = std::sqrt(std::max(0.0, (sum_h2 - n * s.mean_hedged_pnl * s.mean_hedged_pnl) / (n - 1)));
    s.sd_unhedged_pnl = std::sqrt(std::max(0.0, (sum_u2 - n * s.mean_unhedged_pnl * s.mean_unhedged_pnl) / (n - 1)));
    s.se_hedged_pnl = s.sd_hedged_pnl / std::sqrt(n);
  }
  if (samples > 0) {
    s.p_profit = double(in_profit) / double(samples);
    s.p_buysell = double(in_buysell) / double(samples);
    s.p_arb = double(arbed) / double(samples);
  }
  return s;
}

inline SummaryStats summarize(const EnsembleResult& e) { return summarize(std::span<const PathStats>(e.paths)); }

// Recomputes region occupancy from recorded pre-trade ratios instead of the
// engine counters; useful for re-slicing a kept ensemble under other bounds.
inline SummaryStats summarize(std::span<const PathResult> results,
                              const RegionBounds& bounds) {
  if (results.empty()) throw std::invalid_argument("no paths to summarize");
  std::vector<PathStats> paths;
  paths.reserve(results.size());
  for (const auto& r : results) {
    if (r.pre_log_ratio.empty())
      throw std::invalid_argument("paths were run without ratio recording");
    PathStats p = r.stats;
    p.samples = int64_t(r.pre_log_ratio.size());
    p.in_profit = p.in_buysell = p.arbed = 0;
    for (double lr : r.pre_log_ratio) {
      double ratio = std::exp(lr);
      if (ratio >= bounds.profit_low && ratio < bounds.profit_high) ++p.in_profit;
      if (ratio >= bounds.sell_bound && ratio < bounds.buy_bound) ++p.in_buysell;
      if (!(ratio >= bounds.arb_low && ratio < bounds.arb_high)) ++p.arbed;
    }
    paths.push_back(p);
  }
  return summarize(std::span<const PathStats>(paths));
}

// Histogram of recorded pre-trade log ratios across an ensemble.
inline Histogram log_ratio_histogram(std::span<const PathResult> results,
                                     const HistogramSpec& spec) {
  Histogram h(spec);
  for (const auto& r : results)
    for (double x : r.pre_log_ratio) h.add(x);
  return h;
}

// Histogram of terminal PnL across paths; bin range spans the observed data.
inline Histogram pnl_histogram(std::span<const PathStats> paths, int bins,
                               bool hedged = true) {
  if (paths.empty()) throw std::invalid_argument("no paths");
  if (bins < 1) throw std::invalid_argument("need at least one bin");
  double lo = INFINITY, hi = -INFINITY;
  for (const auto& p : paths) {
    double v = hedged ? p.hedged_pnl : p.unhedged_pnl;
    lo = std::min(lo, v);
    hi = std::max(hi, v);
  }
  if (!(lo < hi)) {  // constant PnL: widen so everything lands in one bin
    lo -= 0.5;
    hi += 0.5;
  }
  Histogram h({lo, hi, bins});
  for (const auto& p : paths) h.add(hedged ? p.hedged_pnl : p.unhedged_pnl);
  return h;
}

}  // namespace amm
