#pragma once

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

#include "mcp/errors.hpp"
#include "mcp/lattice.hpp"
#include "mcp/rng.hpp"
#include "mcp/stats.hpp"

namespace mcp {

// Boost rate of a one-sided double-arrow class on the line: lambda (e^{a/2} - 1) / 2.
inline double interface_epsilon(double lambda, double a) {
  return lambda * (std::exp(a / 2.0) - 1.0) / 2.0;
}

struct InterfaceParams {
  double lambda = 4.0;
  double a11 = 0, a12 = 0, a21 = 0, a22 = 0;  // all must be >= 0 (nonnegative boost rates)
  double horizon = 300.0;
  std::uint64_t seed = 1;
  int window_half_width = 500;  // simulate on [center - W, center + W]
  int edge_buffer = 10;         // an edge this close to the window boundary aborts the run
  bool record_rows = true;
  bool record_applied = false;  // keep a log of applied birth events for rule audits
};

enum : int {
  kIfDeath = 0,
  kIfSingle = 1,
  kIf11 = 2,
  kIf22 = 3,
  kIf12 = 4,
  kIf21 = 5,
};

struct TraceRow {
  double t;
  std::int64_t R, L;
  double X;
  bool contact;
};

struct SeparationRecord {
  double t;          // a sigma time: the contact just ended
  bool one_died;     // true if the rightmost 1 died, false if the leftmost 2 died
  std::int64_t R_after, L_after;
};

struct ContactSample {
  double t;
  std::size_t index;      // which tau this is (0 = initial contact)
  std::uint8_t mask_one;  // bit x-1 set iff site R - x holds a 1, x = 1..6
  std::uint8_t mask_two;  // bit x-1 set iff site L + x holds a 2
};

struct AppliedBirth {
  double t;
  int cls;
  std::int64_t target;
  State born;
  std::int64_t R_before, L_before;
};

// One Heaviside run: 1s fill the left half-line, 2s the right, and the trace
// follows the rightmost 1 (R), the leftmost 2 (L), and the midpoint X.
// tau[i] is the i-th time the two fronts come into contact (gap exactly 1,
// tau[0] = 0); sigma[k] is the (k+1)-th time they separate.  Strict
// alternation tau[i] < sigma[i] < tau[i+1] holds by construction.
struct InterfaceTrace {
  InterfaceParams params;
  std::vector<TraceRow> rows;
  std::vector<double> sigma;
  struct TauRecord {
    double t;
    double x;
  };
  std::vector<TauRecord> tau;
  std::vector<SeparationRecord> separations;
  std::vector<ContactSample> contact_samples;
  std::vector<AppliedBirth> applied;  // only when record_applied
  bool terminal = false;              // one type vanished from the window
  bool window_violation = false;
  double end_time = 0;
};

// Thrown when an interface edge reaches the window buffer; carries the
// partial trace so completed excursions stay usable.
class window_violation_error : public window_error {
 public:
  window_violation_error(const std::string& what, InterfaceTrace trace)
      : window_error(what), trace_(std::make_shared<InterfaceTrace>(std::move(trace))) {}
  const InterfaceTrace& trace() const { return *trace_; }

 private:
  std::shared_ptr<InterfaceTrace> trace_;
};

namespace detail {

class InterfaceRun {
 public:
  explicit InterfaceRun(const InterfaceParams& p) : p_(p) {
    if (!(p.lambda > 0)) throw std::invalid_argument("run_heaviside: lambda must be > 0");
    if (p.a11 < 0 || p.a12 < 0 || p.a21 < 0 || p.a22 < 0)
      throw std::invalid_argument("run_heaviside: payoff entries must be >= 0");
    if (p.window_half_width < 32) throw std::invalid_argument("run_heaviside: window too small");
    if (p.edge_buffer < 6 || p.edge_buffer >= p.window_half_width / 4)
      throw std::invalid_argument("run_heaviside: bad edge buffer");
    e11_ = interface_epsilon(p.lambda, p.a11);
    e22_ = interface_epsilon(p.lambda, p.a22);
    e12_ = interface_epsilon(p.lambda, p.a12);
    e21_ = interface_epsilon(p.lambda, p.a21);
    n_ = 2 * p.window_half_width + 1;
    win_.assign(static_cast<std::size_t>(n_), kEmpty);
    base_ = -p.window_half_width;
    for (std::int64_t s = base_; s < base_ + n_; ++s) win_at(s) = s <= 0 ? kOne : kTwo;
    R_ = 0;
    L_ = 1;
    trace_.params = p;
    trace_.tau.push_back({0.0, 0.5});
    record_contact_sample(0.0, 0);
    push_row(0.0);
  }

  InterfaceTrace run() {
    CounterRng rng = CounterRng::derive(p_.seed, 0x696669656c6431ull, 7);
    double per_site = 1.0 + p_.lambda + 2 * e11_ + 2 * e22_ + e12_ + e21_;
    double total = per_site * static_cast<double>(n_);
    double t = 0;
    bool contact = true;  // gap == 1 at start
    for (;;) {
      t += rng.exponential(total);
      if (t > p_.horizon) {
        trace_.end_time = p_.horizon;
        break;
      }
      std::int64_t s = base_ + static_cast<std::int64_t>(rng.uniform_below(static_cast<std::uint64_t>(n_)));
      double u = rng.uniform01() * per_site;
      std::int64_t old_R = R_, old_L = L_;
      if (u < 1.0) {
        apply_death(t, s);
      } else if (u < 1.0 + p_.lambda) {
        bool right = rng.uniform_below(2) == 1;
        apply_single(t, s, right);
      } else if (u < 1.0 + p_.lambda + 2 * e11_) {
        bool right = rng.uniform_below(2) == 1;
        apply_double_same(t, s, kOne, right, kIf11);
      } else if (u < 1.0 + p_.lambda + 2 * e11_ + 2 * e22_) {
        bool right = rng.uniform_below(2) == 1;
        apply_double_same(t, s, kTwo, right, kIf22);
      } else if (u < 1.0 + p_.lambda + 2 * e11_ + 2 * e22_ + e12_) {
        apply_cross12(t, s);
      } else {
        apply_cross21(t, s);
      }
      if (trace_.terminal) {
        trace_.end_time = t;
        break;
      }
      if (R_ >= L_) throw std::logic_error("run_heaviside: fronts interleaved");
      bool now_contact = (L_ - R_ == 1);
      if (contact && !now_contact) {
        trace_.sigma.push_back(t);
        trace_.separations.push_back({t, R_ != old_R, R_, L_});
      } else if (!contact && now_contact) {
        trace_.tau.push_back({t, midpoint()});
        record_contact_sample(t, trace_.tau.size() - 1);
      }
      bool edge_moved = (R_ != old_R) || (L_ != old_L);
      if (edge_moved || contact != now_contact) push_row(t);
      contact = now_contact;
      if (edge_moved) {
        recenter_if_needed();
        check_buffer(t);
      }
    }
    return std::move(trace_);
  }

 private:
  State& win_at(std::int64_t s) { return win_[static_cast<std::size_t>(s - base_)]; }
  State win_get(std::int64_t s) const { return win_[static_cast<std::size_t>(s - base_)]; }
  bool inside(std::int64_t s) const { return s >= base_ && s < base_ + n_; }
  double midpoint() const { return 0.5 * static_cast<double>(R_ + L_); }

  void push_row(double t) {
    if (p_.record_rows) trace_.rows.push_back({t, R_, L_, midpoint(), L_ - R_ == 1});
  }

  void record_contact_sample(double t, std::size_t index) {
    std::uint8_t m1 = 0, m2 = 0;
    for (int x = 1; x <= 6; ++x) {
      if (inside(R_ - x) && win_get(R_ - x) == kOne) m1 = static_cast<std::uint8_t>(m1 | (1u << (x - 1)));
      if (inside(L_ + x) && win_get(L_ + x) == kTwo) m2 = static_cast<std::uint8_t>(m2 | (1u << (x - 1)));
    }
    trace_.contact_samples.push_back({t, index, m1, m2});
  }

  void log_birth(double t, int cls, std::int64_t target, State born) {
    if (p_.record_applied) trace_.applied.push_back({t, cls, target, born, R_, L_});
  }

  void apply_death(double t, std::int64_t s) {
    (void)t;
    if (win_get(s) == kEmpty) return;
    bool was_R = (s == R_), was_L = (s == L_);
    win_at(s) = kEmpty;
    if (was_R) {
      std::int64_t r = s - 1;
      while (r >= base_ && win_get(r) != kOne) --r;
      if (r < base_) {
        trace_.terminal = true;
        return;
      }
      R_ = r;
    }
    if (was_L) {
      std::int64_t l = s + 1;
      while (l < base_ + n_ && win_get(l) != kTwo) ++l;
      if (l >= base_ + n_) {
        trace_.terminal = true;
        return;
      }
      L_ = l;
    }
  }

  void birth(double t, int cls, std::int64_t target, State born) {
    log_birth(t, cls, target, born);
    win_at(target) = born;
    if (born == kOne && target > R_) R_ = target;
    if (born == kTwo && target < L_) L_ = target;
  }

  void apply_single(double t, std::int64_t s, bool right) {
    State i = win_get(s);
    if (i == kEmpty) return;
    std::int64_t target = right ? s + 1 : s - 1;
    if (!inside(target) || win_get(target) != kEmpty) return;
    birth(t, kIfSingle, target, i);
  }

  // Same-type boost: helper and center both of type `kind`, target on the
  // opposite side of the center empty.
  void apply_double_same(double t, std::int64_t s, State kind, bool right, int cls) {
    if (win_get(s) != kind) return;
    std::int64_t helper = right ? s - 1 : s + 1;
    std::int64_t target = right ? s + 1 : s - 1;
    if (!inside(helper) || !inside(target)) return;
    if (win_get(helper) != kind || win_get(target) != kEmpty) return;
    birth(t, cls, target, kind);
  }

  // A 1 at s backed by a 2 at s+1 births leftward onto s-1.
  void apply_cross12(double t, std::int64_t s) {
    if (win_get(s) != kOne) return;
    if (!inside(s + 1) || !inside(s - 1)) return;
    if (win_get(s + 1) != kTwo || win_get(s - 1) != kEmpty) return;
    birth(t, kIf12, s - 1, kOne);
  }

  // A 2 at s backed by a 1 at s-1 births rightward onto s+1.
  void apply_cross21(double t, std::int64_t s) {
    if (win_get(s) != kTwo) return;
    if (!inside(s - 1) || !inside(s + 1)) return;
    if (win_get(s - 1) != kOne || win_get(s + 1) != kEmpty) return;
    birth(t, kIf21, s + 1, kTwo);
  }

  void recenter_if_needed() {
    std::int64_t center = base_ + p_.window_half_width;
    double drift = midpoint() - static_cast<double>(center);
    if (std::abs(drift) < p_.window_half_width / 2.0) return;
    std::int64_t delta = static_cast<std::int64_t>(std::llround(drift));
    if (delta > 0) {
      std::copy(win_.begin() + delta, win_.end(), win_.begin());
      std::fill(win_.end() - delta, win_.end(), kTwo);  // entering on the right: deep 2 territory
    } else {
      std::copy_backward(win_.begin(), win_.end() + delta, win_.end());
      std::fill(win_.begin(), win_.begin() - delta, kOne);  // entering on the left: deep 1 territory
    }
    base_ += delta;
  }

  void check_buffer(double t) {
    if (R_ - base_ >= p_.edge_buffer && (base_ + n_ - 1) - L_ >= p_.edge_buffer) return;
    trace_.window_violation = true;
    trace_.end_time = t;
    throw window_violation_error("interface edge reached the window buffer", std::move(trace_));
  }

  InterfaceParams p_;
  double e11_, e22_, e12_, e21_;
  std::int64_t n_, base_;
  std::vector<State> win_;
  std::int64_t R_, L_;
  InterfaceTrace trace_;
};

}  // namespace detail

inline InterfaceTrace run_heaviside(const InterfaceParams& params) {
  return detail::InterfaceRun(params).run();
}

struct DriftEstimate {
  MeanSe x_increment;    // pooled X(tau_{i+1}) - X(tau_i), i >= 1
  MeanSe tau_increment;  // pooled tau_{i+1} - tau_i, i >= 1
  std::vector<double> contact_durations;  // pooled sigma_{i+1} - tau_i, i >= 1
  std::size_t excursions_used = 0;
  std::size_t excursions_truncated = 0;  // in progress at a window violation, terminal stop, or the horizon
  std::size_t traces_used = 0;
};

// Pools completed excursions across traces.  The initial excursion (between
// tau_0 = 0 and tau_1) reflects the deterministic start and is excluded.
inline DriftEstimate estimate_drift(const std::vector<InterfaceTrace>& traces) {
  DriftEstimate out;
  std::vector<double> xs, taus;
  for (const InterfaceTrace& tr : traces) {
    ++out.traces_used;
    const auto& tau = tr.tau;
    for (std::size_t i = 1; i + 1 < tau.size(); ++i) {
      xs.push_back(tau[i + 1].x - tau[i].x);
      taus.push_back(tau[i + 1].t - tau[i].t);
      ++out.excursions_used;
    }
    if (!tau.empty()) ++out.excursions_truncated;  // the excursion in progress at the stop
    for (std::size_t i = 1; i < tau.size() && i < tr.sigma.size(); ++i)
      out.contact_durations.push_back(tr.sigma[i] - tau[i].t);
  }
  if (xs.empty()) throw std::runtime_error("estimate_drift: no completed excursions");
  out.x_increment = mean_se(xs);
  out.tau_increment = mean_se(taus);
  return out;
}

struct ProbeRow {
  std::vector<int> sites;
  double p_behind_one = 0, se_behind_one = 0;  // all probed sites behind R hold 1s
  double p_behind_two = 0, se_behind_two = 0;  // all probed sites beyond L hold 2s
  double gap = 0, gap_se = 0;                  // paired difference (one-side minus two-side)
  std::size_t samples = 0;
};

// At re-contact times (tau_i, i >= 1), estimates the probability that every
// probed offset behind the 1-front holds a 1, and mirrored for the 2-front;
// reports the paired difference as a diagnostic.
inline std::vector<ProbeRow> mirror_domination_probe(const std::vector<InterfaceTrace>& traces,
                                                     const std::vector<std::vector<int>>& site_sets) {
  for (const auto& set : site_sets)
    for (int x : set)
      if (x < 1 || x > 6) throw std::invalid_argument("mirror_domination_probe: offsets must lie in 1..6");
  std::vector<ProbeRow> out;
  for (const auto& set : site_sets) {
    ProbeRow row;
    row.sites = set;
    std::vector<double> left, right, diff;
    for (const InterfaceTrace& tr : traces) {
      for (const ContactSample& cs : tr.contact_samples) {
        if (cs.index == 0) continue;
        bool l = true, r = true;
        for (int x : set) {
          if (!(cs.mask_one >> (x - 1) & 1u)) l = false;
          if (!(cs.mask_two >> (x - 1) & 1u)) r = false;
        }
        left.push_back(l ? 1.0 : 0.0);
        right.push_back(r ? 1.0 : 0.0);
        diff.push_back((l ? 1.0 : 0.0) - (r ? 1.0 : 0.0));
      }
    }
    row.samples = left.size();
    if (!left.empty()) {
      MeanSe ml = mean_se(left), mr = mean_se(right), md = mean_se(diff);
      row.p_behind_one = ml.mean;
      row.se_behind_one = ml.se;
      row.p_behind_two = mr.mean;
      row.se_behind_two = mr.se;
      row.gap = md.mean;
      row.gap_se = md.se;
    }
    out.push_back(std::move(row));
  }
  return out;
}

inline void write_trace_csv(const InterfaceTrace& trace, std::ostream& os) {
  os << "time,R,L,X,phase\n";
  for (const TraceRow& r : trace.rows)
    os << r.t << ',' << r.R << ',' << r.L << ',' << r.X << ','
       << (r.contact ? "contact" : "separated") << '\n';
}

}  // namespace mcp
