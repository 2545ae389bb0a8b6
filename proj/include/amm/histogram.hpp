#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <stdexcept>
#include <vector>

namespace amm {

struct HistogramSpec {
  double lo = 0.0;
  double hi = 0.0;
  int bins = 0;

  bool valid() const { return bins >= 1 && lo < hi && std::isfinite(lo) && std::isfinite(hi); }
  bool operator==(const HistogramSpec&) const = default;
};

// Fixed uniform binning with integer counts.  Bins are [left, right) and
// samples outside the range pile up in the edge bins, so the total count is
// always the number of samples added.  Integer counts make merges across
// worker threads order-independent.
class Histogram {
 public:
  Histogram() = default;
  explicit Histogram(HistogramSpec spec) : spec_(spec) {
    if (!spec.valid()) throw std::invalid_argument("bad histogram spec");
    counts_.assign(size_t(spec.bins), 0);
  }

  void add(double x) {
    int i = int(std::floor((x - spec_.lo) / width() ));
    i = std::clamp(i, 0, spec_.bins - 1);
    ++counts_[size_t(i)];
    ++total_;
  }

  void merge(const Histogram& other) {
    if (!(other.spec_ == spec_))
      throw std::invalid_argument("histogram binning mismatch");
    for (size_t i = 0; i < counts_.size(); ++i) counts_[i] += other.counts_[i];
    total_ += other.total_;
  }

  const HistogramSpec& spec() const { return spec_; }
  const std::vector<int64_t>& counts() const { return counts_; }
  int64_t total() const { return total_; }
  double width() const { return (spec_.hi - spec_.lo) / spec_.bins; }
  double bin_left(int i) const { return spec_.lo + i * width(); }
  double bin_right(int i) const { return spec_.lo + (i + 1) * width(); }
  double bin_center(int i) const { return spec_.lo + (i + 0.5) * width(); }

  // Bin masses normalized to sum to one.
  std::vector<double> mass() const {
    if (total_ == 0) throw std::invalid_argument("empty histogram");
    std::vector<double> m(counts_.size());
    for (size_t i = 0; i < counts_.size(); ++i)
      m[i] = double(counts_[i]) / double(total_);
    return m;
  }

 private:
  HistogramSpec spec_;
  std::vector<int64_t> counts_;
  int64_t total_ = 0;
};

// L2 distance between two unit-mass histograms on identical bins.
inline double histogram_l2(const Histogram& a, const Histogram& b) {
  if (!(a.spec() == b.spec()))
    throw std::invalid_argument("histogram binning mismatch");
  auto ma = a.mass();
  auto mb = b.mass();
  double s = 0.0;
  for (size_t i = 0; i < ma.size(); ++i) {
    double d = ma[i] - mb[i];
    s += d * d;
  }
  return std::sqrt(s);
}

}  // namespace amm
