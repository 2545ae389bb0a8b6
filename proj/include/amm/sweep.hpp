#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

#include "amm/ensemble.hpp"
#include "amm/stats.hpp"

namespace amm {

// Grid axes for the profitability surface.  Values are fractions (fees),
// per-sqrt(day) volatility, and total fundamental flow per day (split evenly
// between the buy and sell side).
struct SweepAxes {
  std::vector<double> amm_fee;
  std::vector<double> sigma;
  std::vector<double> demand;
  std::vector<double> cex_fee;
};

namespace detail {

inline void check_axis(const std::vector<double>& a, const char* name) {
  if (a.empty()) throw std::invalid_argument(std::string(name) + " axis is empty");
  for (size_t i = 0; i < a.size(); ++i) {
    if (!std::isfinite(a[i]))
      throw std::invalid_argument(std::string(name) + " axis has a non-finite value");
    if (i > 0 && !(a[i] > a[i - 1]))
      throw std::invalid_argument(std::string(name) + " axis must be strictly increasing");
  }
}

}  // namespace detail

struct SweepCell {
  int i_sigma = 0, i_demand = 0, i_cex_fee = 0, i_amm_fee = 0;
  double sigma = 0, demand = 0, cex_fee = 0, amm_fee = 0;
  SummaryStats stats;
};

struct SweepOptions {
  int paths_per_cell = 5000;
  int workers = 0;
  // Called after each freshly computed cell; resume hooks persist them here.
  std::function<void(const SweepCell&)> on_cell;
  // Cells already computed in an earlier run, keyed by axis indices; they are
  // reused verbatim and on_cell is not re-fired for them.
  std::vector<SweepCell> precomputed;
};

struct PnlSurface {
  SweepAxes axes;
  std::vector<SweepCell> cells;  // row-major over (sigma, demand, cex_fee, amm_fee)

  size_t index(int is, int id, int ie0, int ie1) const {
    return ((size_t(is) * axes.demand.size() + size_t(id)) * axes.cex_fee.size() +
            size_t(ie0)) * axes.amm_fee.size() + size_t(ie1);
  }
  const SweepCell& at(int is, int id, int ie0, int ie1) const {
    return cells[index(is, id, ie0, ie1)];
  }
};

// Evaluates the ensemble summary on every grid point.  All cells sharing a
// (sigma, demand, cex_fee) coordinate run on a common sub-seed that does not
// involve the pool fee, so fee columns see identical price paths and order
// flips and their differences are pure fee effects.
inline PnlSurface sweep(const SimConfig& base, const SweepAxes& axes,
                        const SweepOptions& opts = {}) {
  validate(base);
  detail::check_axis(axes.amm_fee, "amm_fee");
  detail::check_axis(axes.sigma, "sigma");
  detail::check_axis(axes.demand, "demand");
  detail::check_axis(axes.cex_fee, "cex_fee");
  if (opts.paths_per_cell < 1)
    throw std::invalid_argument("paths_per_cell must be positive");
  if (!std::holds_alternative<GbmParams>(base.model))
    throw std::invalid_argument("sweep expects a GBM base model");
  const bool arb_tracks_cex = base.fees.arb_fee == base.fees.cex_fee;

  PnlSurface surf;
  surf.axes = axes;
  surf.cells.resize(axes.sigma.size() * axes.demand.size() *
                    axes.cex_fee.size() * axes.amm_fee.size());
  std::vector<uint8_t> have(surf.cells.size(), 0);
  for (const auto& c : opts.precomputed) {
    size_t k = surf.index(c.i_sigma, c.i_demand, c.i_cex_fee, c.i_amm_fee);
    if (k >= surf.cells.size()) throw std::invalid_argument("precomputed cell off grid");
    surf.cells[k] = c;
    have[k] = 1;
  }

  EnsembleOptions eopts;
  eopts.workers = opts.workers;
  eopts.ratio_histogram = false;

  for (size_t is = 0; is < axes.sigma.size(); ++is)
    for (size_t id = 0; id < axes.demand.size(); ++id)
      for (size_t ie0 = 0; ie0 < axes.cex_fee.size(); ++ie0) {
        uint64_t sub_seed = rng::mix_seed(base.seed, {is, id, ie0});
        for (size_t ie1 = 0; ie1 < axes.amm_fee.size(); ++ie1) {
          size_t k = surf.index(int(is), int(id), int(ie0), int(ie1));
          if (have[k]) continue;
          SimConfig cfg = base;
          cfg.seed = sub_seed;
          std::get<GbmParams>(cfg.model).sigma = axes.sigma[is];
          cfg.buy_demand = 0.5 * axes.demand[id];
          cfg.sell_demand = 0.5 * axes.demand[id];
          cfg.fees.cex_fee = axes.cex_fee[ie0];
          if (arb_tracks_cex) cfg.fees.arb_fee = axes.cex_fee[ie0];
          cfg.fees.amm_fee = axes.amm_fee[ie1];
          SweepCell cell;
          cell.i_sigma = int(is);
          cell.i_demand = int(id);
          cell.i_cex_fee = int(ie0);
          cell.i_amm_fee = int(ie1);
          cell.sigma = axes.sigma[is];
          cell.demand = axes.demand[id];
          cell.cex_fee = axes.cex_fee[ie0];
          cell.amm_fee = axes.amm_fee[ie1];
          cell.stats = summarize(run_ensemble(cfg, opts.paths_per_cell, eopts));
          surf.cells[k] = cell;
          have[k] = 1;
          if (opts.on_cell) opts.on_cell(surf.cells[k]);
        }
      }
  return surf;
}

struct OptimalFee {
  bool halt = false;    // no fee on the axis earns a positive expected profit
  double amm_fee = 0.0; // argmax (ties resolved toward the larger fee)
  double mean_pnl = 0.0;
};

inline OptimalFee optimal_fee(const PnlSurface& surf, int i_sigma, int i_demand,
                              int i_cex_fee) {
  const auto& axis = surf.axes.amm_fee;
  if (axis.empty()) throw std::invalid_argument("empty fee axis");
  OptimalFee best;
  for (size_t ie1 = 0; ie1 < axis.size(); ++ie1) {
    const auto& c = surf.at(i_sigma, i_demand, i_cex_fee, int(ie1));
    if (ie1 == 0 || c.stats.mean_hedged_pnl >= best.mean_pnl) {
      best.amm_fee = c.amm_fee;
      best.mean_pnl = c.stats.mean_hedged_pnl;
    }
  }
  best.halt = !(best.mean_pnl > 0.0);
  return best;
}

struct RegretCell {
  int i_sigma = 0, i_demand = 0, i_cex_fee = 0;
  double sigma = 0, demand = 0, cex_fee = 0;
  double optimal_amm_fee = 0.0;
  double regret = 0.0;  // optimal mean PnL minus mean PnL at the fixed fee
};

// Expected profit forgone by holding amm_fee fixed instead of re-optimizing
// per environment.  fixed_amm_fee must lie on the fee axis.
inline std::vector<RegretCell> regret(const PnlSurface& surf, double fixed_amm_fee) {
  const auto& axis = surf.axes.amm_fee;
  size_t fixed = axis.size();
  for (size_t i = 0; i < axis.size(); ++i)
    if (std::fabs(axis[i] - fixed_amm_fee) <= 1e-12) fixed = i;
  if (fixed == axis.size())
    throw std::invalid_argument("fixed fee is not on the sweep axis");
  std::vector<RegretCell> out;
  for (size_t is = 0; is < surf.axes.sigma.size(); ++is)
    for (size_t id = 0; id < surf.axes.demand.size(); ++id)
      for (size_t ie0 = 0; ie0 < surf.axes.cex_fee.size(); ++ie0) {
        OptimalFee opt = optimal_fee(surf, int(is), int(id), int(ie0));
        const auto& at_fixed = surf.at(int(is), int(id), int(ie0), int(fixed));
        RegretCell r;
        r.i_sigma = int(is);
        r.i_demand = int(id);
        r.i_cex_fee = int(ie0);
        r.sigma = surf.axes.sigma[is];
        r.demand = surf.axes.demand[id];
        r.cex_fee = surf.axes.cex_fee[ie0];
        r.optimal_amm_fee = opt.amm_fee;
        r.regret = opt.mean_pnl - at_fixed.stats.mean_hedged_pnl;
        out.push_back(r);
      }
  return out;
}

}  // namespace amm
