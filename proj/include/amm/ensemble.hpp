#pragma once

#include <atomic>
#include <cmath>
#include <cstdint>
#include <exception>
#include <mutex>
#include <thread>
#include <vector>

#include "amm/histogram.hpp"
#include "amm/sim.hpp"

namespace amm {

// Default binning for the log price-ratio histogram: 201 bins spanning 1.5x
// the no-arbitrage half-width, where nearly all of the mass lives.
inline HistogramSpec default_ratio_spec(const RegionBounds& b, int bins = 201) {
  double half = std::max(std::fabs(std::log(b.arb_high)),
                         std::fabs(std::log(b.arb_low)));
  if (!(half > 0.0)) half = 1e-4;  // all fees zero: degenerate band
  return {-1.5 * half, 1.5 * half, bins};
}

struct EnsembleOptions {
  int workers = 0;                 // 0 = one per hardware thread
  bool ratio_histogram = true;
  bool post_trade_ratios = false;  // bin end-of-step ratios instead of pre-trade
  HistogramSpec ratio_spec{};      // default: derived from the fee bounds
  bool keep_paths = false;         // retain full PathResults (memory heavy)
  PathRecording recording{};       // applied when keep_paths is set
};

struct EnsembleResult {
  std::vector<PathStats> paths;   // indexed by path id, independent of scheduling
  Histogram ratio_hist;
  std::vector<PathResult> full;   // only when keep_paths
};

// Runs n_paths independent paths.  Results land in path-indexed slots and
// histogram counts are integers, so the output is identical for any worker
// count or scheduling order.
inline EnsembleResult run_ensemble(const SimConfig& cfg, int n_paths,
                                   const EnsembleOptions& opts = {}) {
  validate(cfg);
  if (n_paths < 1) throw std::invalid_argument("need at least one path");

  int workers = opts.workers > 0
                    ? opts.workers
                    : int(std::max(1u, std::thread::hardware_concurrency()));
  workers = std::min(workers, n_paths);

  HistogramSpec spec = opts.ratio_spec;
  if (!spec.valid()) spec = default_ratio_spec(region_bounds(cfg.fees));

  EnsembleResult out;
  out.paths.resize(size_t(n_paths));
  if (opts.ratio_histogram) out.ratio_hist = Histogram(spec);
  if (opts.keep_paths) out.full.resize(size_t(n_paths));

  PathRecording rec = opts.keep_paths ? opts.recording : PathRecording{};
  rec.ratio_samples = rec.ratio_samples || opts.ratio_histogram;

  const PricePath* shared_path = nullptr;
  if (const auto* h = std::get_if<HistoricalSeries>(&cfg.model)) {
    if (!h->path) throw std::invalid_argument("historical series not set");
    shared_path = h->path.get();
  }

  std::atomic<int> next{0};
  std::mutex err_mu;
  std::exception_ptr error;
  std::vector<Histogram> worker_hist(static_cast<size_t>(workers));
  for (auto& h : worker_hist)
    if (opts.ratio_histogram) h = Histogram(spec);

  auto work = [&](int w) {
    try {
      constexpr int kChunk = 16;
      for (;;) {
        int begin = next.fetch_add(kChunk);
        if (begin >= n_paths) return;
        int end = std::min(begin + kChunk, n_paths);
        for (int i = begin; i < end; ++i) {
          PricePath local;
          const PricePath* path = shared_path;
          if (!path) {
            local = make_path(cfg.model, cfg.cex_price0, cfg.n_steps,
                              cfg.dt(), cfg.seed, uint64_t(i));
            path = &local;
          }
          auto flags = make_order_flags(cfg.seed, uint64_t(i), cfg.n_steps);
          PathResult res = run_path(cfg, *path, flags, rec);
          if (opts.ratio_histogram) {
            const auto& samples = opts.post_trade_ratios ? res.post_log_ratio
                                                         : res.pre_log_ratio;
            for (double x : samples) worker_hist[size_t(w)].add(x);
          }
          out.paths[size_t(i)] = res.stats;
          if (opts.keep_paths) out.full[size_t(i)] = std::move(res);
        }
      }
    } catch (...) {
      std::lock_guard<std::mutex> lk(err_mu);
      if (!error) error = std::current_exception();
    }
  };

  if (workers == 1) {
    work(0);
  } else {
    std::vector<std::thread> pool;
    pool.reserve(size_t(workers));
    for (int w = 0; w < workers; ++w) pool.emplace_back(work, w);
    for (auto& t : pool) t.join();
  }
  if (error) std::rethrow_exception(error);

  if (opts.ratio_histogram)
    for (auto& h : worker_hist) out.ratio_hist.merge(h);
  return out;
}

}  // namespace amm
