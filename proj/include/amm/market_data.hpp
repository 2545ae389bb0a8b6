#pragma once

#include <cstdint>
#include <fstream>
#include <map>
#include <string>
#include <vector>

#include "amm/csv.hpp"
#include "amm/errors.hpp"
#include "amm/historical.hpp"

namespace amm {

// Joint CEX / AMM observations on a common minute grid.
struct MarketData {
  std::vector<int64_t> t_ms;
  std::vector<double> cex_price;
  std::vector<double> reserve_x;
  std::vector<double> reserve_y;
  double dt = 0.0;  // modal spacing in days
  double mean_reserve_x = 0.0;
  double mean_reserve_y = 0.0;
};

// Joins a CEX price CSV (timestamp,price) and an AMM reserve CSV
// (timestamp,reserve_x,reserve_y) by nearest-minute timestamp.  Rows present
// in only one file are dropped.
inline MarketData load_market_data(std::istream& cex_in, const std::string& cex_name,
                                   std::istream& dex_in, const std::string& dex_name) {
  auto cex = detail::read_raw_series(cex_in, cex_name, 1);
  auto dex = detail::read_raw_series(dex_in, dex_name, 2);

  auto to_minute = [](int64_t t) { return (t + 30000) / 60000; };
  std::map<int64_t, double> px;
  for (size_t i = 0; i < cex.t_ms.size(); ++i) {
    if (!(cex.cols[0][i] > 0.0))
      throw DataError(cex_name + ": non-positive price");
    px[to_minute(cex.t_ms[i])] = cex.cols[0][i];
  }

  MarketData out;
  for (size_t i = 0; i < dex.t_ms.size(); ++i) {
    auto it = px.find(to_minute(dex.t_ms[i]));
    if (it == px.end()) continue;
    double x = dex.cols[0][i], y = dex.cols[1][i];
    if (!(x > 0.0) || !(y > 0.0))
      throw DataError(dex_name + ": non-positive reserve");
    out.t_ms.push_back(it->first * 60000);
    out.cex_price.push_back(it->second);
    out.reserve_x.push_back(x);
    out.reserve_y.push_back(y);
  }
  if (out.t_ms.size() < 2)
    throw DataError("fewer than two overlapping observations between " +
                    cex_name + " and " + dex_name);

  for (size_t i = 0; i < out.t_ms.size(); ++i) {
    out.mean_reserve_x += out.reserve_x[i];
    out.mean_reserve_y += out.reserve_y[i];
  }
  out.mean_reserve_x /= double(out.t_ms.size());
  out.mean_reserve_y /= double(out.t_ms.size());
  out.dt = double(detail::modal_spacing(out.t_ms)) / 86400000.0;
  return out;
}

inline MarketData load_market_data(const std::string& cex_path,
                                   const std::string& dex_path) {
  std::ifstream cex(cex_path);
  if (!cex) throw DataError("cannot open " + cex_path);
  std::ifstream dex(dex_path);
  if (!dex) throw DataError("cannot open " + dex_path);
  return load_market_data(cex, cex_path, dex, dex_path);
}

// log(amm price / cex price) at every joint observation.
inline std::vector<double> empirical_log_ratio(const MarketData& m) {
  std::vector<double> out;
  out.reserve(m.t_ms.size());
  for (size_t i = 0; i < m.t_ms.size(); ++i)
    out.push_back(std::log((m.reserve_x[i] / m.reserve_y[i]) / m.cex_price[i]));
  return out;
}

// The observed CEX leg as a uniform path (for historical-price calibration
// and backtests driven by the joint data).
inline PricePath cex_path(const MarketData& m) {
  PricePath p;
  p.t0_ms = m.t_ms.front();
  p.dt = m.dt;
  p.values = m.cex_price;
  return p;
}

}  // namespace amm
