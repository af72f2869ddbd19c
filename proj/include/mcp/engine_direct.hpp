#pragma once

#include <cassert>
#include <optional>
#include <vector>

#include "mcp/lattice.hpp"
#include "mcp/payoff.hpp"
#include "mcp/rate_table.hpp"
#include "mcp/rng.hpp"
#include "mcp/trajectory.hpp"

namespace mcp {

// Exact continuous-time simulation by the direct method.  Rates live on
// occupied sites: r(y) = 1 + fitness(y) * (#vacant neighbors) / 2d, so a state
// change at z invalidates only {z} union N(z).  Holding times are exponential
// in the cached total; the event site is chosen proportionally to r.
class SimState {
 public:
  SimState(Configuration init, FitnessSpec fs, PayoffMatrix m, CounterRng rng,
           bool suppress_births = false)
      : config_(std::move(init)),
        fs_(std::move(fs)),
        m_(m),
        rng_(rng),
        suppress_births_(suppress_births),
        rates_(config_.geometry().size()) {
    for (Site s = 0; s < config_.geometry().size(); ++s) rates_.set(s, fresh_rate(s));
    rates_.refresh();
  }

  const Configuration& config() const { return config_; }
  double time() const { return time_; }
  double total_rate() const { return rates_.total(); }
  std::uint64_t events_applied() const { return events_; }

  double fresh_rate(Site y) const {
    if (config_.at(y) == kEmpty) return 0.0;
    double r = 1.0;
    if (!suppress_births_) {
      int vac = config_.neighbor_count(y, kEmpty);
      if (vac > 0) r += fitness(config_, y, fs_, m_) * vac / config_.geometry().degree();
    }
    return r;
  }

  struct Applied {
    double t;
    Site site;     // changed site
    bool death;
    State born;    // type placed when !death
  };

  // Advances to the next event if it occurs by t_max; otherwise the clock
  // moves to t_max (memorylessness keeps the law exact across calls).
  std::optional<Applied> step(double t_max) {
    double total = rates_.total();
    if (total <= 0.0) {  // absorbing: nothing can ever happen again
      time_ = t_max;
      return std::nullopt;
    }
    double t_next = time_ + rng_.exponential(total);
    if (t_next > t_max) {
      time_ = t_max;
      return std::nullopt;
    }
    if (observer_) observer_->advance(t_next, config_);
    Site y = rates_.select(rng_.uniform01() * total);
    assert(y >= 0 && config_.at(y) != kEmpty);
    double ry = rates_.rate(y);
    Applied ev;
    ev.t = t_next;
    if (rng_.uniform01() * ry < 1.0 || suppress_births_) {
      ev.site = y;
      ev.death = true;
      ev.born = kEmpty;
      config_.set(y, kEmpty);
      invalidate_around(y);
    } else {
      int vac = config_.neighbor_count(y, kEmpty);
      assert(vac > 0);
      int pick = static_cast<int>(rng_.uniform_below(static_cast<std::uint64_t>(vac)));
      const TorusGeometry& g = config_.geometry();
      Site target = -1;
      for (int k = 0; k < g.degree(); ++k) {
        Site x = g.neighbor(y, k);
        if (config_.at(x) == kEmpty && pick-- == 0) {
          target = x;
          break;
        }
      }
      ev.site = target;
      ev.death = false;
      ev.born = config_.at(y);
      config_.set(target, ev.born);
      invalidate_around(target);
    }
    time_ = t_next;
    ++events_;
    rates_.maybe_refresh();
#ifndef NDEBUG
    if ((events_ & 511) == 0) assert(audit_rates() == 0.0);
#endif
    return ev;
  }

  // Observation times are flushed with the pre-event state inside step(), so a
  // sample falling strictly between two events sees the earlier configuration.
  TrajectoryStats run(double horizon, const ObserverSpec& obs) {
    TrajectoryStats out;
    ObserverCursor cur(obs, out);
    observer_ = &cur;
    while (time_ < horizon && step(horizon)) {
    }
    observer_ = nullptr;
    cur.finish(config_);
    return out;
  }

  // Recomputes every cached rate from scratch; returns the largest deviation
  // found (0 when the incremental cache is coherent).
  double audit_rates() {
    std::vector<double> fresh(static_cast<std::size_t>(config_.geometry().size()));
    for (Site s = 0; s < config_.geometry().size(); ++s) fresh[static_cast<std::size_t>(s)] = fresh_rate(s);
    double diff = rates_.max_abs_diff_against(fresh);
    for (Site s = 0; s < config_.geometry().size(); ++s) rates_.set(s, fresh[static_cast<std::size_t>(s)]);
    rates_.refresh();
    return diff;
  }

 private:
  void invalidate_around(Site z) {
    rates_.set(z, fresh_rate(z));
    const TorusGeometry& g = config_.geometry();
    for (int k = 0; k < g.degree(); ++k) {
      Site y = g.neighbor(z, k);
      rates_.set(y, fresh_rate(y));
    }
  }

  Configuration config_;
  FitnessSpec fs_;
  PayoffMatrix m_;
  CounterRng rng_;
  bool suppress_births_;
  RateTable rates_;
  ObserverCursor* observer_ = nullptr;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
};

// Fully occupied voter-game dynamics: each site flips to the opposite type at
// voter_game_rate.  A flip at z shifts neighbor payoffs, so rates within
// graph distance 2 of z are invalidated.
class VoterState {
 public:
  VoterState(Configuration init, SelectionSpec sel, PayoffMatrix m, CounterRng rng)
      : config_(std::move(init)), sel_(sel), m_(m), rng_(rng), rates_(config_.geometry().size()) {
    for (Site s = 0; s < config_.geometry().size(); ++s) {
      if (config_.at(s) == kEmpty)
        throw std::invalid_argument("VoterState: configuration must be fully occupied");
    }
    for (Site s = 0; s < config_.geometry().size(); ++s) rates_.set(s, fresh_rate(s));
    rates_.refresh();
  }

  const Configuration& config() const { return config_; }
  double time() const { return time_; }
  double total_rate() const { return rates_.total(); }

  double fresh_rate(Site x) const {
    State other = config_.at(x) == kOne ? kTwo : kOne;
    return voter_game_rate(config_, x, other, sel_, m_);
  }

  struct Applied {
    double t;
    Site site;
    State to;
  };

  std::optional<Applied> step(double t_max) {
    double total = rates_.total();
    if (total <= 0.0) {
      time_ = t_max;
      return std::nullopt;
    }
    double t_next = time_ + rng_.exponential(total);
    if (t_next > t_max) {
      time_ = t_max;
      return std::nullopt;
    }
    if (observer_) observer_->advance(t_next, config_);
    Site x = rates_.select(rng_.uniform01() * total);
    assert(x >= 0);
    Applied ev{t_next, x, config_.at(x) == kOne ? kTwo : kOne};
    config_.set(x, ev.to);
    invalidate_radius2(x);
    time_ = t_next;
    ++events_;
    rates_.maybe_refresh();
    return ev;
  }

  TrajectoryStats run(double horizon, const ObserverSpec& obs) {
    TrajectoryStats out;
    ObserverCursor cur(obs, out);
    observer_ = &cur;
    while (time_ < horizon && step(horizon)) {
    }
    observer_ = nullptr;
    cur.finish(config_);
    return out;
  }

  double audit_rates() {
    std::vector<double> fresh(static_cast<std::size_t>(config_.geometry().size()));
    for (Site s = 0; s < config_.geometry().size(); ++s) fresh[static_cast<std::size_t>(s)] = fresh_rate(s);
    double diff = rates_.max_abs_diff_against(fresh);
    for (Site s = 0; s < config_.geometry().size(); ++s) rates_.set(s, fresh[static_cast<std::size_t>(s)]);
    rates_.refresh();
    return diff;
  }

 private:
  void invalidate_radius2(Site z) {
    const TorusGeometry& g = config_.geometry();
    touched_.clear();
    auto push = [&](Site s) {
      for (Site t : touched_)
        if (t == s) return;
      touched_.push_back(s);
    };
    push(z);
    for (int k = 0; k < g.degree(); ++k) {
      Site y = g.neighbor(z, k);
      push(y);
      for (int k2 = 0; k2 < g.degree(); ++k2) push(g.neighbor(y, k2));
    }
    for (Site s : touched_) rates_.set(s, fresh_rate(s));
  }

  Configuration config_;
  SelectionSpec sel_;
  PayoffMatrix m_;
  CounterRng rng_;
  RateTable rates_;
  ObserverCursor* observer_ = nullptr;
  std::vector<Site> touched_;
  double time_ = 0.0;
  std::uint64_t events_ = 0;
};

inline TrajectoryStats run_voter_game(Configuration init, SelectionSpec sel, PayoffMatrix m,
                                      CounterRng rng, double horizon, const ObserverSpec& obs) {
  VoterState st(std::move(init), sel, m, rng);
  return st.run(horizon, obs);
}

}  // namespace mcp
