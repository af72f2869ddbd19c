#pragma once

#include <cstdint>
#include <limits>
#include <memory>
#include <stdexcept>
#include <unordered_map>
#include <vector>

#include "mcp/errors.hpp"
#include "mcp/lattice.hpp"
#include "mcp/zeta.hpp"

namespace mcp {

// Forward state of the labeled-arrow dynamics at time t (state after all
// events with time <= t).
inline Configuration eta_forward(Configuration c, const ZetaStream& st,
                                 const std::vector<char>& good, double t) {
  if (good.size() != st.events.size()) throw std::invalid_argument("eta_forward: label arity mismatch");
  for (std::size_t i = 0; i < st.events.size(); ++i) {
    if (st.events[i].t > t) break;
    apply_eta_event(c, st.events[i], good[i] != 0);
  }
  return c;
}

struct DualJump {
  double t_event;
  std::uint8_t op;  // 0 = leave (death mark), 1 = join (single-arrow tail), 2 = join (labeled-arrow center)
  Site site;
};

// Set-valued ancestry of one space-time point (root, t), read off the event
// list backward: a death mark drops its site from the set, an arrow whose head
// is in the set pulls in its tail.  Labeled double arrows act through their
// center; unlabeled ones are invisible to the labeled dynamics and are
// skipped.  members_at(s) replays the first s units of backward time.
struct DualSet {
  std::shared_ptr<const TorusGeometry> geo;
  Site root = 0;
  double t = 0;
  std::vector<DualJump> jumps;                 // decreasing event time
  std::vector<double> one_arrow_touch_times;   // labeled arrow head met the set

  bool used_one_arrow() const { return !one_arrow_touch_times.empty(); }

  std::vector<Site> members_at(double s) const {
    double cut = t - s;
    std::vector<std::uint8_t> in(static_cast<std::size_t>(geo->size()), 0);
    in[static_cast<std::size_t>(root)] = 1;
    for (const DualJump& j : jumps) {
      if (!(j.t_event > cut)) break;
      in[static_cast<std::size_t>(j.site)] = j.op == 0 ? 0 : 1;
    }
    std::vector<Site> out;
    for (std::size_t i = 0; i < in.size(); ++i)
      if (in[i]) out.push_back(static_cast<Site>(i));
    return out;
  }
};

inline DualSet dual_set(const ZetaStream& st, const std::vector<char>& good, Site root, double t,
                        double s_max = std::numeric_limits<double>::infinity()) {
  if (good.size() != st.events.size()) throw std::invalid_argument("dual_set: label arity mismatch");
  const TorusGeometry& g = *st.geo;
  DualSet d;
  d.geo = st.geo;
  d.root = root;
  d.t = t;
  double cut = t - s_max;
  std::vector<std::uint8_t> in(static_cast<std::size_t>(g.size()), 0);
  in[static_cast<std::size_t>(root)] = 1;
  for (std::size_t k = st.events.size(); k-- > 0;) {
    const ZetaEvent& ev = st.events[k];
    if (ev.t > t) continue;
    if (!(ev.t > cut)) break;
    switch (ev.kind) {
      case kZDeath:
        if (in[static_cast<std::size_t>(ev.site)]) {
          in[static_cast<std::size_t>(ev.site)] = 0;
          d.jumps.push_back({ev.t, 0, ev.site});
        }
        break;
      case kZSingle: {
        Site head = g.neighbor(ev.site, ev.dy);
        if (in[static_cast<std::size_t>(head)] && !in[static_cast<std::size_t>(ev.site)]) {
          in[static_cast<std::size_t>(ev.site)] = 1;
          d.jumps.push_back({ev.t, 1, ev.site});
        }
        break;
      }
      default: {
        if (!good[k]) break;
        Site head = g.neighbor(ev.site, ev.dy);
        if (in[static_cast<std::size_t>(head)]) {
          d.one_arrow_touch_times.push_back(ev.t);
          if (!in[static_cast<std::size_t>(ev.site)]) {
            in[static_cast<std::size_t>(ev.site)] = 1;
            d.jumps.push_back({ev.t, 2, ev.site});
          }
        }
        break;
      }
    }
  }
  return d;
}

struct ConeReplay {
  State state = kEmpty;      // root's state at time t recomputed from the cone
  std::size_t cone_events = 0;
  std::size_t cone_sites = 0;
};

// Recomputes the labeled dynamics at one space-time point from its influence
// cone alone.  Backward pass: grow a site set W monotonically (deaths never
// shrink it) and record every event that can reach the point — deaths on W,
// arrows whose head lies in W (their tails join W).  Forward pass: replay the
// recorded events in time order on the initial data restricted to W.  The
// result equals the full forward state at (root, t); the event budget guards
// against supercritical cones.
inline ConeReplay influence_cone_replay(const ZetaStream& st, const std::vector<char>& good,
                                        const Configuration& init, Site root, double t,
                                        std::size_t budget = 1000000) {
  if (good.size() != st.events.size())
    throw std::invalid_argument("influence_cone_replay: label arity mismatch");
  if (init.geometry().size() != st.geo->size())
    throw std::invalid_argument("influence_cone_replay: geometry mismatch");
  const TorusGeometry& g = *st.geo;
  std::vector<std::uint8_t> inW(static_cast<std::size_t>(g.size()), 0);
  inW[static_cast<std::size_t>(root)] = 1;
  std::size_t n_sites = 1;
  std::vector<std::size_t> recorded;  // descending event time
  for (std::size_t k = st.events.size(); k-- > 0;) {
    const ZetaEvent& ev = st.events[k];
    if (ev.t > t) continue;
    bool keep = false;
    switch (ev.kind) {
      case kZDeath:
        keep = inW[static_cast<std::size_t>(ev.site)];
        break;
      case kZSingle: {
        Site head = g.neighbor(ev.site, ev.dy);
        if (inW[static_cast<std::size_t>(head)]) {
          keep = true;
          if (!inW[static_cast<std::size_t>(ev.site)]) {
            inW[static_cast<std::size_t>(ev.site)] = 1;
            ++n_sites;
          }
        }
        break;
      }
      default: {
        if (!good[k]) break;
        Site head = g.neighbor(ev.site, ev.dy);
        if (inW[static_cast<std::size_t>(head)]) {
          keep = true;
          if (!inW[static_cast<std::size_t>(ev.site)]) {
            inW[static_cast<std::size_t>(ev.site)] = 1;
            ++n_sites;
          }
        }
        break;
      }
    }
    if (keep) {
      recorded.push_back(k);
      if (recorded.size() > budget) throw resource_error("influence cone budget exhausted", recorded.size());
    }
  }

  std::unordered_map<Site, State> state;
  state.reserve(n_sites * 2);
  for (std::size_t i = 0; i < inW.size(); ++i)
    if (inW[i]) state[static_cast<Site>(i)] = init.at(static_cast<Site>(i));

  for (std::size_t r = recorded.size(); r-- > 0;) {
    const ZetaEvent& ev = st.events[recorded[r]];
    switch (ev.kind) {
      case kZDeath:
        state[ev.site] = kEmpty;
        break;
      case kZSingle: {
        Site head = g.neighbor(ev.site, ev.dy);
        State i = state[ev.site];
        if (i != kEmpty && state[head] == kEmpty) state[head] = i;
        break;
      }
      default: {
        Site head = g.neighbor(ev.site, ev.dy);
        if (state[ev.site] == kOne && state[head] == kEmpty) state[head] = kOne;
        break;
      }
    }
  }

  ConeReplay out;
  out.state = state[root];
  out.cone_events = recorded.size();
  out.cone_sites = n_sites;
  return out;
}

}  // namespace mcp
