#pragma once

#include <cctype>
#include <cstdint>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <string>
#include <vector>

#include "amm/errors.hpp"

namespace amm::csv {

inline std::vector<std::string> split_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  for (char c : line) {
    if (c == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (c != '\r') {
      cur += c;
    }
  }
  out.push_back(cur);
  for (auto& f : out) {
    size_t a = f.find_first_not_of(" \t");
    size_t b = f.find_last_not_of(" \t");
    f = a == std::string::npos ? std::string() : f.substr(a, b - a + 1);
  }
  return out;
}

inline bool is_number(const std::string& s) {
  if (s.empty()) return false;
  char* end = nullptr;
  std::strtod(s.c_str(), &end);
  return end == s.c_str() + s.size();
}

namespace detail {

// Days since 1970-01-01 for a civil date (standard proleptic Gregorian).
inline int64_t days_from_civil(int y, int m, int d) {
  y -= m <= 2;
  int64_t era = (y >= 0 ? y : y - 399) / 400;
  int yoe = int(y - era * 400);
  int doy = (153 * (m + (m > 2 ? -3 : 9)) + 2) / 5 + d - 1;
  int64_t doe = int64_t(yoe) * 365 + yoe / 4 - yoe / 100 + doy;
  return era * 146097 + doe - 719468;
}

}  // namespace detail

// Accepts integer Unix milliseconds or ISO-8601 (YYYY-MM-DD[ T]HH:MM[:SS[.mmm]][Z]).
inline int64_t parse_timestamp_ms(const std::string& s) {
  if (s.empty()) throw DataError("empty timestamp");
  bool digits = true;
  for (char c : s)
    if (!std::isdigit(static_cast<unsigned char>(c))) digits = false;
  if (digits) {
    try {
      return std::stoll(s);
    } catch (const std::exception&) {
      throw DataError("timestamp out of range: " + s);
    }
  }
  int y = 0, mo = 0, d = 0, h = 0, mi = 0;
  double sec = 0.0;
  char sep = 0;
  int n = std::sscanf(s.c_str(), "%d-%d-%d%c%d:%d:%lf", &y, &mo, &d, &sep, &h, &mi, &sec);
  if (n < 3 || mo < 1 || mo > 12 || d < 1 || d > 31)
    throw DataError("unparseable timestamp: " + s);
  if (n >= 4 && sep != 'T' && sep != ' ')
    throw DataError("unparseable timestamp: " + s);
  int64_t ms = detail::days_from_civil(y, mo, d) * 86400000ll;
  ms += int64_t(h) * 3600000 + int64_t(mi) * 60000 + int64_t(sec * 1000.0 + 0.5);
  return ms;
}

// Writes via a temp file and renames into place, so readers never observe a
// partially written file.
inline void atomic_write(const std::filesystem::path& path,
                         const std::function<void(std::ostream&)>& fill) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw DataError("cannot open for writing: " + tmp.string());
    fill(out);
    out.flush();
    if (!out) throw DataError("write failed: " + tmp.string());
  }
  std::filesystem::rename(tmp, path);
}

}  // namespace amm::csv
