#pragma once

#include <algorithm>
#include <cstdint>
#include <memory>
#include <stdexcept>
#include <vector>

#include "mcp/coupling.hpp"
#include "mcp/engine_graphical.hpp"
#include "mcp/lattice.hpp"
#include "mcp/payoff.hpp"
#include "mcp/rng.hpp"
#include "mcp/trajectory.hpp"

namespace mcp {

// Per-ordered-pair rate of the helper-boost channel in the reduced process
// (exponential profile): lambda (e^{a11/2d} - 1) / (2d)^2.
inline double epsilon_rate(double lambda, double a11, int d) {
  if (!(lambda > 0) || d < 1) throw std::invalid_argument("epsilon_rate: bad parameters");
  double q = 2.0 * d;
  return lambda * (std::exp(a11 / q) - 1.0) / (q * q);
}

enum : std::uint8_t { kZDeath = 0, kZSingle = 1, kZDouble = 2 };

struct ZetaEvent {
  double t;
  Site site;        // death site / arrow tail / double-arrow center x
  std::uint8_t kind;
  std::uint8_t dy;  // head direction: single head, or double delivery y
  std::uint8_t dz;  // double-arrow helper direction z
};

// Reduced graphical noise: death marks (rate 1/site), type-blind single arrows
// (rate lambda/2d per directed edge), and centered double arrows z -> x -> y
// (rate epsilon per ordered neighbor pair (y, z) of x, y = z included).
class ZetaStream {
 public:
  std::shared_ptr<const TorusGeometry> geo;
  double lambda = 0, a11 = 0, T = 0;
  std::uint64_t seed = 0;
  std::vector<ZetaEvent> events;

  double epsilon() const { return epsilon_rate(lambda, a11, geo->dim()); }

  static ZetaStream build(std::shared_ptr<const TorusGeometry> geo, double lambda, double a11,
                          double T, std::uint64_t seed) {
    ZetaStream st;
    st.geo = std::move(geo);
    st.lambda = lambda;
    st.a11 = a11;
    st.T = T;
    st.seed = seed;
    const TorusGeometry& g = *st.geo;
    int deg = g.degree();
    double eps = st.epsilon();
    double per_site = 1.0 + lambda + deg * deg * eps;
    double total = per_site * static_cast<double>(g.size());
    CounterRng rng = CounterRng::derive(seed, 0x7a65746173ull, 2);
    st.events.reserve(static_cast<std::size_t>(total * T * 1.02) + 64);
    double t = 0;
    for (;;) {
      t += rng.exponential(total);
      if (t > T) break;
      ZetaEvent ev;
      ev.t = t;
      ev.site = static_cast<Site>(rng.uniform_below(static_cast<std::uint64_t>(g.size())));
      double u = rng.uniform01() * per_site;
      if (u < 1.0) {
        ev.kind = kZDeath;
        ev.dy = ev.dz = 0;
      } else if (u < 1.0 + lambda) {
        ev.kind = kZSingle;
        ev.dy = static_cast<std::uint8_t>(rng.uniform_below(deg));
        ev.dz = 0;
      } else {
        ev.kind = kZDouble;
        ev.dy = static_cast<std::uint8_t>(rng.uniform_below(deg));
        ev.dz = static_cast<std::uint8_t>(rng.uniform_below(deg));
      }
      st.events.push_back(ev);
    }
    return st;
  }
};

// Dynamics using all double arrows: the boost fires only when both the center
// and the helper hold 1s.
inline void apply_zeta_event(Configuration& c, const ZetaEvent& ev) {
  const TorusGeometry& g = c.geometry();
  switch (ev.kind) {
    case kZDeath:
      c.set(ev.site, kEmpty);
      return;
    case kZSingle: {
      State i = c.at(ev.site);
      if (i == kEmpty) return;
      Site y = g.neighbor(ev.site, ev.dy);
      if (c.at(y) == kEmpty) c.set(y, i);
      return;
    }
    default: {
      Site y = g.neighbor(ev.site, ev.dy);
      Site z = g.neighbor(ev.site, ev.dz);
      if (c.at(ev.site) == kOne && c.at(z) == kOne && c.at(y) == kEmpty) c.set(y, kOne);
      return;
    }
  }
}

// Dynamics using only labeled double arrows, fired as type-1-exclusive arrows
// with no helper condition.
inline void apply_eta_event(Configuration& c, const ZetaEvent& ev, bool good) {
  const TorusGeometry& g = c.geometry();
  switch (ev.kind) {
    case kZDeath:
      c.set(ev.site, kEmpty);
      return;
    case kZSingle: {
      State i = c.at(ev.site);
      if (i == kEmpty) return;
      Site y = g.neighbor(ev.site, ev.dy);
      if (c.at(y) == kEmpty) c.set(y, i);
      return;
    }
    default: {
      if (!good) return;
      Site y = g.neighbor(ev.site, ev.dy);
      if (c.at(ev.site) == kOne && c.at(y) == kEmpty) c.set(y, kOne);
      return;
    }
  }
}

inline Site zeta_changed_site(const TorusGeometry& g, const ZetaEvent& ev) {
  return ev.kind == kZDeath ? ev.site : g.neighbor(ev.site, ev.dy);
}

inline TrajectoryStats run_zeta(Configuration& c, const ZetaStream& st, const ObserverSpec& obs = {}) {
  TrajectoryStats out;
  ObserverCursor cur(obs, out);
  for (const ZetaEvent& ev : st.events) {
    cur.advance(ev.t, c);
    apply_zeta_event(c, ev);
  }
  cur.finish(c);
  return out;
}

inline TrajectoryStats run_eta(Configuration& c, const ZetaStream& st, const std::vector<char>& good,
                               const ObserverSpec& obs = {}) {
  if (good.size() != st.events.size()) throw std::invalid_argument("run_eta: label arity mismatch");
  TrajectoryStats out;
  ObserverCursor cur(obs, out);
  for (std::size_t i = 0; i < st.events.size(); ++i) {
    cur.advance(st.events[i].t, c);
    apply_eta_event(c, st.events[i], good[i] != 0);
  }
  cur.finish(c);
  return out;
}

// Couples the full dynamics (payoff a11 only) with the reduced dynamics on one
// arrow stream carrying direction marks: arrows with U <= lambda act as single
// arrows for both; the band lambda < U <= lambda e^{a11/2d} acts for the
// reduced process only when the marked helper site holds a 1.  Site-wise the
// reduced process keeps fewer 1s and more 2s, checked after every event.
inline CouplingReport coupled_xi_zeta(Configuration xi, Configuration zeta, double lambda,
                                      double a11, const EventStream& st) {
  if (!(a11 > 0)) throw std::invalid_argument("coupled_xi_zeta: a11 must be > 0");
  if (!st.with_v) throw std::invalid_argument("coupled_xi_zeta: stream lacks direction marks");
  double need = lambda * std::exp(a11);
  if (st.M < need - 1e-12) throw std::invalid_argument("coupled_xi_zeta: stream ceiling too small");
  if (!dominates(zeta, xi)) throw std::invalid_argument("coupled_xi_zeta: initial states not ordered");

  FitnessSpec fs = FitnessSpec::exponential(lambda);
  PayoffMatrix m{a11, 0, 0, 0};
  const TorusGeometry& g = *st.geo;
  double band_top = lambda * std::exp(a11 / g.degree());

  CouplingReport rep(zeta, xi);
  for (const StreamEvent& ev : st.events) {
    apply_stream_event(xi, ev, fs, m);
    if (ev.kind == kEvDeath) {
      zeta.set(ev.site, kEmpty);
    } else {
      State j = zeta.at(ev.site);
      if (j != kEmpty) {
        Site y = g.neighbor(ev.site, ev.dir);
        if (zeta.at(y) == kEmpty) {
          if (ev.u <= lambda) {
            zeta.set(y, j);
          } else if (j == kOne && ev.u <= band_top) {
            Site z = g.neighbor(ev.site, ev.vdir);
            if (zeta.at(z) == kOne) zeta.set(y, kOne);
          }
        }
      }
    }
    Site changed = ev.kind == kEvDeath ? ev.site : g.neighbor(ev.site, ev.dir);
    ++rep.events_checked;
    State a = zeta.at(changed), b = xi.at(changed);
    if ((a == kOne && b != kOne) || (b == kTwo && a != kTwo)) {
      rep.ok = false;
      rep.t_violation = ev.t;
      rep.violation_site = changed;
      rep.what = "reduced/full domination broken";
      break;
    }
  }
  if (rep.ok && !dominates(zeta, xi)) {
    rep.ok = false;
    rep.t_violation = st.T;
    rep.what = "final sweep domination broken";
  }
  rep.final_lower = std::move(zeta);
  rep.final_upper = std::move(xi);
  return rep;
}

// Reads the reduced stream induced by an arrow stream with direction marks:
// U <= lambda gives a single arrow, the band gives a centered double arrow
// whose helper is the marked direction.  Times and order are preserved, so
// running the reduced dynamics on the result reproduces the coupled marginal
// decision for decision.
inline ZetaStream extract_zeta(const EventStream& st, double lambda, double a11) {
  if (!st.with_v) throw std::invalid_argument("extract_zeta: stream lacks direction marks");
  ZetaStream out;
  out.geo = st.geo;
  out.lambda = lambda;
  out.a11 = a11;
  out.T = st.T;
  out.seed = st.seed;
  double band_top = lambda * std::exp(a11 / st.geo->degree());
  for (const StreamEvent& ev : st.events) {
    ZetaEvent z;
    z.t = ev.t;
    z.site = ev.site;
    if (ev.kind == kEvDeath) {
      z.kind = kZDeath;
      z.dy = z.dz = 0;
    } else if (ev.u <= lambda) {
      z.kind = kZSingle;
      z.dy = ev.dir;
      z.dz = 0;
    } else if (ev.u <= band_top) {
      z.kind = kZDouble;
      z.dy = ev.dir;
      z.dz = ev.vdir;
    } else {
      continue;
    }
    out.events.push_back(z);
  }
  return out;
}

inline CouplingReport coupled_zeta_eta(Configuration zeta, Configuration eta, const ZetaStream& st,
                                       const std::vector<char>& good) {
  if (good.size() != st.events.size())
    throw std::invalid_argument("coupled_zeta_eta: label arity mismatch");
  if (!dominates(eta, zeta)) throw std::invalid_argument("coupled_zeta_eta: initial states not ordered");
  const TorusGeometry& g = *st.geo;
  CouplingReport rep(eta, zeta);
  for (std::size_t i = 0; i < st.events.size(); ++i) {
    const ZetaEvent& ev = st.events[i];
    apply_zeta_event(zeta, ev);
    apply_eta_event(eta, ev, good[i] != 0);
    Site changed = zeta_changed_site(g, ev);
    ++rep.events_checked;
    State a = eta.at(changed), b = zeta.at(changed);
    if ((a == kOne && b != kOne) || (b == kTwo && a != kTwo)) {
      rep.ok = false;
      rep.t_violation = ev.t;
      rep.violation_site = changed;
      rep.what = "labeled/reduced domination broken";
      break;
    }
  }
  if (rep.ok && !dominates(eta, zeta)) {
    rep.ok = false;
    rep.t_violation = st.T;
    rep.what = "final sweep domination broken";
  }
  rep.final_lower = std::move(eta);
  rep.final_upper = std::move(zeta);
  return rep;
}

struct GoodArrowLabel {
  std::size_t event_index;
  double s;
  Site x, y, z;
  double death_time;   // witnessing death at z in (s-2, s-1)
  double arrow_time;   // witnessing single arrow x -> z in (s-1, s)
};

struct GoodArrowLabeling {
  std::vector<char> good;               // one flag per stream event
  std::vector<GoodArrowLabel> labels;
  std::uint64_t doubles_total = 0;
  std::uint64_t doubles_eligible = 0;   // y != z and s > 2
};

// Deterministic isolation test for each double arrow z -> x -> y at time s:
//  - one death mark at z in (s-2, s-1) and one single arrow x -> z in (s-1, s)
//    (the witnesses);
//  - no other death marks at x, y, z, no other single arrows entering x, y, z,
//    and no other double arrows delivering onto x, y, z anywhere in [s-2, s].
// Window boundaries are closed against the disturbance checks, so an event
// exactly on a boundary (probability 0) disqualifies rather than slipping
// through either window convention.  Under this rule a labeled arrow is
// usable by 1s exactly when the center is a 1 (the helper state is then
// forced), which is what the labeled/reduced coupling relies on.
inline GoodArrowLabeling label_good_arrows(const ZetaStream& st) {
  const TorusGeometry& g = *st.geo;
  std::size_t n = static_cast<std::size_t>(g.size());
  std::vector<std::vector<double>> deaths(n);
  std::vector<std::vector<std::pair<double, Site>>> singles_in(n);
  std::vector<std::vector<double>> doubles_in(n);
  for (const ZetaEvent& ev : st.events) {
    if (ev.kind == kZDeath) {
      deaths[static_cast<std::size_t>(ev.site)].push_back(ev.t);
    } else if (ev.kind == kZSingle) {
      Site head = g.neighbor(ev.site, ev.dy);
      singles_in[static_cast<std::size_t>(head)].push_back({ev.t, ev.site});
    } else {
      Site head = g.neighbor(ev.site, ev.dy);
      doubles_in[static_cast<std::size_t>(head)].push_back(ev.t);
    }
  }

  GoodArrowLabeling out;
  out.good.assign(st.events.size(), 0);

  auto deaths_in_window = [&](Site w, double lo, double hi, std::vector<double>& hit) {
    const auto& v = deaths[static_cast<std::size_t>(w)];
    auto it = std::lower_bound(v.begin(), v.end(), lo);
    for (; it != v.end() && *it <= hi; ++it) hit.push_back(*it);
  };

  for (std::size_t idx = 0; idx < st.events.size(); ++idx) {
    const ZetaEvent& ev = st.events[idx];
    if (ev.kind != kZDouble) continue;
    ++out.doubles_total;
    double s = ev.t;
    Site x = ev.site;
    Site y = g.neighbor(x, ev.dy);
    Site z = g.neighbor(x, ev.dz);
    if (y == z || s <= 2.0) continue;
    ++out.doubles_eligible;
    double lo = s - 2.0, mid = s - 1.0;

    std::vector<double> dz;
    deaths_in_window(z, lo, s, dz);
    if (dz.size() != 1) continue;
    double death_t = dz[0];
    if (!(death_t > lo && death_t < mid)) continue;

    std::vector<double> dx, dy2;
    deaths_in_window(x, lo, s, dx);
    if (!dx.empty()) continue;
    deaths_in_window(y, lo, s, dy2);
    if (!dy2.empty()) continue;

    bool ok = true;
    double arrow_t = -1;
    {
      const auto& v = singles_in[static_cast<std::size_t>(z)];
      auto it = std::lower_bound(v.begin(), v.end(), std::pair<double, Site>{lo, -1});
      int witnesses = 0;
      for (; it != v.end() && it->first <= s; ++it) {
        if (it->second == x && it->first > mid && it->first < s && witnesses == 0) {
          ++witnesses;
          arrow_t = it->first;
        } else {
          ok = false;
          break;
        }
      }
      if (witnesses != 1) ok = false;
    }
    if (!ok) continue;
    for (Site w : {x, y}) {
      const auto& v = singles_in[static_cast<std::size_t>(w)];
      auto it = std::lower_bound(v.begin(), v.end(), std::pair<double, Site>{lo, -1});
      if (it != v.end() && it->first <= s) ok = false;
      if (!ok) break;
    }
    if (!ok) continue;
    for (Site w : {x, y, z}) {
      const auto& v = doubles_in[static_cast<std::size_t>(w)];
      auto it = std::lower_bound(v.begin(), v.end(), lo);
      for (; it != v.end() && *it <= s; ++it) {
        if (w == y && *it == s) continue;  // the arrow being labeled
        ok = false;
        break;
      }
      if (!ok) break;
    }
    if (!ok) continue;

    out.good[idx] = 1;
    out.labels.push_back({idx, s, x, y, z, death_t, arrow_t});
  }
  return out;
}

// Closed-form isolation probability written as a product of five independent
// Poisson window factors (deaths at the helper; arrows entering the helper;
// remaining death exposure; remaining entering-arrow exposure; double-arrow
// deliveries).  The entering-arrow witness factor counts arrows from any
// neighbor; the labeling rule above additionally pins the tail, which costs
// one factor of 1/(2d) (see good_arrow_probability_strict_tail).
inline double good_arrow_probability(double lambda, double a11, int d) {
  double q = 2.0 * d;
  double eps = epsilon_rate(lambda, a11, d);
  return lambda * std::exp(-6.0 * (1.0 + lambda + q * q * eps));
}

inline double good_arrow_probability_strict_tail(double lambda, double a11, int d) {
  return good_arrow_probability(lambda, a11, d) / (2.0 * d);
}

}  // namespace mcp
