#pragma once

#include <string>

#include "mcp/engine_graphical.hpp"

namespace mcp {

// Matrix ordering under which the one-type-favoring domination is preserved:
// the upper process boosts 1s (larger a11, nonnegative a12 vs nonpositive) and
// handicaps 2s (nonpositive a21/a22 vs nonnegative).
inline bool ordering_holds(const PayoffMatrix& lower, const PayoffMatrix& upper) {
  return upper.a11 >= lower.a11 && lower.a11 >= 0 &&
         upper.a12 >= 0 && 0 >= lower.a12 &&
         upper.a21 <= 0 && 0 <= lower.a21 &&
         upper.a22 <= 0 && 0 <= lower.a22;
}

inline bool dominates(const Configuration& lower, const Configuration& upper) {
  for (Site s = 0; s < lower.geometry().size(); ++s) {
    State a = lower.at(s), b = upper.at(s);
    if (a == kOne && b != kOne) return false;  // upper must keep every 1
    if (b == kTwo && a != kTwo) return false;  // upper may not add 2s
  }
  return true;
}

struct CouplingReport {
  std::uint64_t events_checked = 0;
  bool ok = true;
  double t_violation = -1;
  Site violation_site = -1;
  std::string what;
  Configuration final_lower, final_upper;

  CouplingReport(Configuration fl, Configuration fu)
      : final_lower(std::move(fl)), final_upper(std::move(fu)) {}
};

struct CouplingOptions {
  // Test hook: the upper process drops type-1 births, which destroys the
  // domination and must surface as a detected violation.
  bool corrupt_upper = false;
};

// Runs both processes against one shared stream and asserts the site-wise
// domination after every event.  Only the event's target site can newly break
// the inclusion, so the per-event check there is exact; full sweeps guard the
// ends.
inline CouplingReport coupled_run(Configuration lower, Configuration upper,
                                  const PayoffMatrix& m_lower, const PayoffMatrix& m_upper,
                                  const FitnessSpec& fs, const EventStream& st,
                                  const CouplingOptions& opt = {}) {
  if (!ordering_holds(m_lower, m_upper))
    throw std::invalid_argument("coupled_run: matrix ordering violated");
  if (st.M < max_rate_joint(fs, m_lower, m_upper) - 1e-12)
    throw std::invalid_argument("coupled_run: stream ceiling below joint maximal rate");
  if (!dominates(lower, upper))
    throw std::invalid_argument("coupled_run: initial configurations not ordered");

  auto check_site = [&](Site s) {
    State a = lower.at(s), b = upper.at(s);
    if (a == kOne && b != kOne) return false;
    if (b == kTwo && a != kTwo) return false;
    return true;
  };

  auto flag = [&](CouplingReport& rep, double t, Site s, const char* what) {
    if (!rep.ok) return;
    rep.ok = false;
    rep.t_violation = t;
    rep.violation_site = s;
    rep.what = what;
  };

  CouplingReport rep(lower, upper);
  for (const StreamEvent& ev : st.events) {
    apply_stream_event(lower, ev, fs, m_lower);
    if (opt.corrupt_upper && ev.kind == kEvArrow && upper.at(ev.site) == kOne) {
      // corrupted rule: ignore this birth opportunity in the upper process
    } else {
      apply_stream_event(upper, ev, fs, m_upper);
    }
    Site changed = ev.kind == kEvDeath ? ev.site : lower.geometry().neighbor(ev.site, ev.dir);
    ++rep.events_checked;
    if (!check_site(changed)) {
      flag(rep, ev.t, changed, "site-wise domination broken");
      break;
    }
  }
  if (rep.ok && !dominates(lower, upper)) flag(rep, st.T, -1, "final sweep domination broken");
  rep.final_lower = std::move(lower);
  rep.final_upper = std::move(upper);
  return rep;
}

}  // namespace mcp
