#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <vector>

namespace mcp {

struct MeanSe {
  double mean = 0, se = 0;
  std::size_t n = 0;

  double ci_lo(double z = 1.959963984540054) const { return mean - z * se; }
  double ci_hi(double z = 1.959963984540054) const { return mean + z * se; }
};

inline MeanSe mean_se(const std::vector<double>& xs) {
  MeanSe r;
  r.n = xs.size();
  if (r.n == 0) throw std::invalid_argument("mean_se: empty sample");
  double m = 0;
  for (double x : xs) m += x;
  m /= static_cast<double>(r.n);
  double ss = 0;
  for (double x : xs) ss += (x - m) * (x - m);
  r.mean = m;
  r.se = r.n > 1 ? std::sqrt(ss / (static_cast<double>(r.n) * (static_cast<double>(r.n) - 1))) : 0.0;
  return r;
}

inline double proportion_se(double p, std::size_t n) {
  return std::sqrt(std::max(p * (1 - p), 0.0) / static_cast<double>(n));
}

// Kolmogorov tail Q(t) = 2 sum_{k>=1} (-1)^{k-1} exp(-2 k^2 t^2).
inline double kolmogorov_q(double t) {
  if (t < 1e-8) return 1.0;
  double sum = 0.0;
  for (int k = 1; k <= 200; ++k) {
    double term = 2.0 * std::exp(-2.0 * k * k * t * t);
    sum += (k % 2 == 1) ? term : -term;
    if (term < 1e-16) break;
  }
  return std::min(std::max(sum, 0.0), 1.0);
}

struct KsResult {
  double d = 0;  // sup-distance
  double p = 1;  // asymptotic tail probability
};

// Two-sample Kolmogorov-Smirnov with the usual finite-n correction.
inline KsResult ks_two_sample(std::vector<double> a, std::vector<double> b) {
  if (a.empty() || b.empty()) throw std::invalid_argument("ks_two_sample: empty sample");
  std::sort(a.begin(), a.end());
  std::sort(b.begin(), b.end());
  double na = static_cast<double>(a.size()), nb = static_cast<double>(b.size());
  std::size_t i = 0, j = 0;
  double d = 0;
  while (i < a.size() && j < b.size()) {
    double x = std::min(a[i], b[j]);
    while (i < a.size() && a[i] <= x) ++i;
    while (j < b.size() && b[j] <= x) ++j;
    d = std::max(d, std::abs(i / na - j / nb));
  }
  double ne = std::sqrt(na * nb / (na + nb));
  KsResult r;
  r.d = d;
  r.p = kolmogorov_q((ne + 0.12 + 0.11 / ne) * d);
  return r;
}

// One-sample KS against a continuous CDF.
inline KsResult ks_one_sample(std::vector<double> xs, const std::function<double(double)>& cdf) {
  if (xs.empty()) throw std::invalid_argument("ks_one_sample: empty sample");
  std::sort(xs.begin(), xs.end());
  double n = static_cast<double>(xs.size());
  double d = 0;
  for (std::size_t k = 0; k < xs.size(); ++k) {
    double f = cdf(xs[k]);
    d = std::max(d, std::abs((k + 1) / n - f));
    d = std::max(d, std::abs(f - k / n));
  }
  double sn = std::sqrt(n);
  KsResult r;
  r.d = d;
  r.p = kolmogorov_q((sn + 0.12 + 0.11 / sn) * d);
  return r;
}

inline double poisson_pmf(int k, double mu) {
  if (k < 0) return 0.0;
  double p = std::exp(-mu);
  for (int i = 1; i <= k; ++i) p *= mu / i;
  return p;
}

// P(X <= k) by direct summation of pmf terms.
inline double poisson_cdf(int k, double mu) {
  if (k < 0) return 0.0;
  double term = std::exp(-mu);
  double sum = term;
  for (int i = 1; i <= k; ++i) {
    term *= mu / i;
    sum += term;
  }
  return std::min(sum, 1.0);
}

inline double poisson_tail_ge(int n, double mu) {
  if (n <= 0) return 1.0;
  return std::max(0.0, 1.0 - poisson_cdf(n - 1, mu));
}

struct TrendResult {
  long long s = 0;     // Mann-Kendall S statistic
  double z = 0;        // normal approximation
  double p_increasing = 1;  // one-sided p-value for an increasing trend
};

// Mann-Kendall trend test with tie correction.
inline TrendResult mann_kendall(const std::vector<double>& xs) {
  std::size_t n = xs.size();
  if (n < 3) throw std::invalid_argument("mann_kendall: need at least 3 points");
  long long s = 0;
  for (std::size_t i = 0; i + 1 < n; ++i) {
    for (std::size_t j = i + 1; j < n; ++j) {
      if (xs[j] > xs[i]) ++s;
      else if (xs[j] < xs[i]) --s;
    }
  }
  std::vector<double> sorted(xs);
  std::sort(sorted.begin(), sorted.end());
  double var = static_cast<double>(n) * (n - 1) * (2.0 * n + 5) / 18.0;
  std::size_t i = 0;
  while (i < n) {
    std::size_t j = i;
    while (j < n && sorted[j] == sorted[i]) ++j;
    double t = static_cast<double>(j - i);
    if (t > 1) var -= t * (t - 1) * (2 * t + 5) / 18.0;
    i = j;
  }
  TrendResult r;
  r.s = s;
  if (var <= 0) {
    r.z = 0;
    r.p_increasing = s > 0 ? 0.0 : 1.0;
    return r;
  }
  double z = 0;
  if (s > 0) z = (s - 1) / std::sqrt(var);
  else if (s < 0) z = (s + 1) / std::sqrt(var);
  r.z = z;
  r.p_increasing = 0.5 * std::erfc(z / std::sqrt(2.0));
  return r;
}

}  // namespace mcp
