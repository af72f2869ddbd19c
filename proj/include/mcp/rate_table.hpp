#pragma once

#include <cmath>
#include <cstdint>
#include <vector>

#include "mcp/lattice.hpp"
#include "mcp/rng.hpp"

namespace mcp {

// Flat per-site rate array with sqrt(N) bucket partial sums.  Point updates are
// O(1); proportional selection walks one bucket row plus one bucket.  Partial
// sums are rebuilt from the site rates on a fixed cadence so incremental
// floating-point drift cannot accumulate.
class RateTable {
 public:
  explicit RateTable(Site n) : n_(n) {
    bucket_size_ = 1;
    while (bucket_size_ * bucket_size_ < n) ++bucket_size_;
    rates_.assign(static_cast<std::size_t>(n), 0.0);
    bucket_.assign(static_cast<std::size_t>((n + bucket_size_ - 1) / bucket_size_), 0.0);
  }

  double rate(Site s) const { return rates_[static_cast<std::size_t>(s)]; }
  double total() const { return total_; }

  void set(Site s, double r) {
    double delta = r - rates_[static_cast<std::size_t>(s)];
    rates_[static_cast<std::size_t>(s)] = r;
    bucket_[static_cast<std::size_t>(s / bucket_size_)] += delta;
    total_ += delta;
  }

  // Recompute bucket sums and the total exactly from the site rates.
  void refresh() {
    double tot = 0.0;
    for (std::size_t b = 0; b < bucket_.size(); ++b) {
      double sum = 0.0;
      Site lo = static_cast<Site>(b) * bucket_size_;
      Site hi = std::min<Site>(lo + bucket_size_, n_);
      for (Site s = lo; s < hi; ++s) sum += rates_[static_cast<std::size_t>(s)];
      bucket_[b] = sum;
      tot += sum;
    }
    total_ = tot;
  }

  void maybe_refresh() {
    if (++since_refresh_ >= kRefreshEvery) {
      refresh();
      since_refresh_ = 0;
    }
  }

  // Site with cumulative-rate position u in [0, total); clamps overshoot from
  // floating-point drift onto the last positive-rate site.
  Site select(double u) const {
    std::size_t b = 0;
    for (; b + 1 < bucket_.size(); ++b) {
      if (u < bucket_[b]) break;
      u -= bucket_[b];
    }
    Site lo = static_cast<Site>(b) * bucket_size_;
    Site hi = std::min<Site>(lo + bucket_size_, n_);
    for (Site s = lo; s < hi; ++s) {
      double r = rates_[static_cast<std::size_t>(s)];
      if (u < r) return s;
      u -= r;
    }
    for (Site s = n_ - 1; s >= 0; --s) {
      if (rates_[static_cast<std::size_t>(s)] > 0) return s;
    }
    return -1;
  }

  double max_abs_diff_against(const std::vector<double>& fresh) const {
    double m = 0.0;
    for (std::size_t i = 0; i < rates_.size(); ++i) m = std::max(m, std::abs(rates_[i] - fresh[i]));
    return m;
  }

 private:
  static constexpr int kRefreshEvery = 4096;

  Site n_;
  Site bucket_size_;
  std::vector<double> rates_;
  std::vector<double> bucket_;
  double total_ = 0.0;
  int since_refresh_ = 0;
};

}  // namespace mcp
