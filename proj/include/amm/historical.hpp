#pragma once

#include <cstdint>
#include <fstream>
#include <istream>
#include <map>
#include <string>
#include <vector>

#include "amm/csv.hpp"
#include "amm/errors.hpp"
#include "amm/price_path.hpp"

namespace amm {

namespace detail {

struct RawSeries {
  std::vector<int64_t> t_ms;
  std::vector<std::vector<double>> cols;  // numeric columns after the timestamp
};

// Reads "timestamp,v1[,v2...]" rows.  A single header line is skipped when
// its first field is not a timestamp.  Rows must be strictly increasing in
// time and every value must parse; anything else is a data error.
inline RawSeries read_raw_series(std::istream& in, const std::string& name,
                                 size_t value_cols) {
  RawSeries out;
  std::string line;
  size_t lineno = 0;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty() || line == "\r") continue;
    auto fields = csv::split_line(line);
    if (fields.size() < value_cols + 1)
      throw DataError(name + ":" + std::to_string(lineno) + ": expected " +
                      std::to_string(value_cols + 1) + " columns");
    if (lineno == 1 && !csv::is_number(fields[1])) continue;  // header
    int64_t t;
    try {
      t = csv::parse_timestamp_ms(fields[0]);
    } catch (const DataError& e) {
      throw DataError(name + ":" + std::to_string(lineno) + ": " + e.what());
    }
    if (!out.t_ms.empty() && t <= out.t_ms.back())
      throw DataError(name + ":" + std::to_string(lineno) +
                      ": timestamps must be strictly increasing");
    out.t_ms.push_back(t);
    if (out.cols.empty()) out.cols.resize(value_cols);
    for (size_t c = 0; c < value_cols; ++c) {
      if (!csv::is_number(fields[c + 1]))
        throw DataError(name + ":" + std::to_string(lineno) +
                        ": bad value '" + fields[c + 1] + "'");
      out.cols[c].push_back(std::stod(fields[c + 1]));
    }
  }
  if (out.t_ms.empty()) throw DataError(name + ": no data rows");
  return out;
}

// Most frequent spacing between consecutive timestamps; ties go to the
// smaller spacing.
inline int64_t modal_spacing(const std::vector<int64_t>& t) {
  if (t.size() < 2) return 60000;  // lone observation: assume one minute
  std::map<int64_t, int> freq;
  for (size_t i = 1; i < t.size(); ++i) ++freq[t[i] - t[i - 1]];
  int64_t best = 0;
  int best_n = -1;
  for (auto [d, n] : freq)
    if (n > best_n) best = d, best_n = n;
  return best;
}

}  // namespace detail

// Loads a price CSV onto a uniform grid at the modal spacing of the file,
// forward-filling gaps.  Column order: timestamp, price.
inline PricePath load_price_csv(std::istream& in, const std::string& name) {
  auto raw = detail::read_raw_series(in, name, 1);
  const auto& px = raw.cols[0];
  for (size_t i = 0; i < px.size(); ++i)
    if (!(px[i] > 0.0))
      throw DataError(name + ": non-positive price at row " + std::to_string(i + 1));

  int64_t d = detail::modal_spacing(raw.t_ms);
  if (d <= 0) throw DataError(name + ": cannot infer grid spacing");
  PricePath out;
  out.t0_ms = raw.t_ms.front();
  out.dt = double(d) / 86400000.0;
  size_t row = 0;
  for (int64_t t = raw.t_ms.front(); t <= raw.t_ms.back(); t += d) {
    while (row + 1 < raw.t_ms.size() && raw.t_ms[row + 1] <= t) ++row;
    out.values.push_back(px[row]);
  }
  if (out.values.size() < 2)
    throw DataError(name + ": need at least two grid points");
  return out;
}

inline PricePath load_price_csv(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw DataError("cannot open " + path);
  return load_price_csv(in, path);
}

}  // namespace amm
