#pragma once

#include <limits>
#include <vector>

#include "mcp/lattice.hpp"

namespace mcp {

struct ObserverSpec {
  std::vector<double> sample_times;    // record (n1, n2) at these times
  std::vector<double> snapshot_times;  // record full configurations at these times

  static ObserverSpec uniform(double horizon, int n) {
    ObserverSpec o;
    o.sample_times.reserve(n);
    for (int i = 1; i <= n; ++i) o.sample_times.push_back(horizon * i / n);
    return o;
  }
};

struct TrajectoryStats {
  std::vector<double> times;
  std::vector<Site> n1, n2;
  std::vector<double> snapshot_times;
  std::vector<Configuration> snapshots;
};

// Flushes due observation times before each event is applied; the state of the
// chain at time s is the configuration after all events with time <= s.
class ObserverCursor {
 public:
  ObserverCursor(const ObserverSpec& spec, TrajectoryStats& out) : spec_(spec), out_(out) {}

  void advance(double t_next, const Configuration& c) {
    while (si_ < spec_.sample_times.size() && spec_.sample_times[si_] < t_next) {
      out_.times.push_back(spec_.sample_times[si_]);
      out_.n1.push_back(c.count(kOne));
      out_.n2.push_back(c.count(kTwo));
      ++si_;
    }
    while (pi_ < spec_.snapshot_times.size() && spec_.snapshot_times[pi_] < t_next) {
      out_.snapshot_times.push_back(spec_.snapshot_times[pi_]);
      out_.snapshots.push_back(c);
      ++pi_;
    }
  }

  void finish(const Configuration& c) { advance(std::numeric_limits<double>::infinity(), c); }

 private:
  const ObserverSpec& spec_;
  TrajectoryStats& out_;
  std::size_t si_ = 0, pi_ = 0;
};

}  // namespace mcp
