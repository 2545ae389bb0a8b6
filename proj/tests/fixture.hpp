#pragma once

// Synthetic joint CEX/AMM market data for the data-driven tests.  A recorded
// simulation provides the "observed" history: the fee account sits outside
// the pool, so the reserve product never moves and the reserves at each
// snapshot follow from the recorded post-trade pool price alone.

#include <cmath>
#include <cstdint>
#include <cstdio>
#include <fstream>
#include <sstream>
#include <string>
#include <utility>

#include "amm/market_data.hpp"
#include "amm/sim.hpp"

namespace testfix {

struct SyntheticMarket {
  amm::SimConfig truth;  // generator configuration
  std::string cex_csv;   // timestamp,price
  std::string dex_csv;   // timestamp,reserve_x,reserve_y
  amm::MarketData data;  // the two files joined back through the loader
};

// Grid spacing must be a whole number of minutes so the loader's
// nearest-minute join maps rows one to one.
inline SyntheticMarket make_market(const amm::SimConfig& cfg,
                                   uint64_t path_index = 0,
                                   int64_t t0_ms = 1704067200000ll) {
  auto path = amm::make_path(cfg.model, cfg.cex_price0, cfg.n_steps, cfg.dt(),
                             cfg.seed, path_index);
  auto flags = amm::make_order_flags(cfg.seed, path_index, cfg.n_steps);
  amm::PathRecording rec;
  rec.ratio_samples = true;
  auto res = amm::run_path(cfg, path, flags, rec);

  const int64_t step_ms = std::llround(cfg.dt() * 86400000.0);
  const double k = cfg.reserve_x0 * cfg.reserve_y0;

  char buf[160];
  std::string cex = "timestamp,price\n";
  std::string dex = "timestamp,reserve_x,reserve_y\n";
  auto row = [&](int64_t t, double s, double x, double y) {
    std::snprintf(buf, sizeof buf, "%lld,%.17g\n", (long long)t, s);
    cex += buf;
    std::snprintf(buf, sizeof buf, "%lld,%.17g,%.17g\n", (long long)t, x, y);
    dex += buf;
  };
  row(t0_ms, path.values[0], cfg.reserve_x0, cfg.reserve_y0);
  for (int i = 1; i <= cfg.n_steps; ++i) {
    double s = path.values[size_t(i)];
    double pool_price = std::exp(res.post_log_ratio[size_t(i) - 1]) * s;
    double x = std::sqrt(k * pool_price);
    double y = std::sqrt(k / pool_price);
    row(t0_ms + int64_t(i) * step_ms, s, x, y);
  }

  SyntheticMarket out;
  out.truth = cfg;
  out.cex_csv = std::move(cex);
  out.dex_csv = std::move(dex);
  std::istringstream ci(out.cex_csv), di(out.dex_csv);
  out.data = amm::load_market_data(ci, "cex", di, "dex");
  return out;
}

inline void write_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  out << content;
}

}  // namespace testfix
