#pragma once

#include <cstdint>
#include <cstring>
#include <istream>
#include <memory>
#include <ostream>
#include <stdexcept>
#include <vector>

#include "mcp/lattice.hpp"
#include "mcp/payoff.hpp"
#include "mcp/rng.hpp"
#include "mcp/trajectory.hpp"

namespace mcp {

// Ceiling for per-arrow acceptance thresholds: birth payoffs are convex-ish
// combinations bounded by the largest positive entry, so lambda * g of that
// bound dominates every threshold the dynamics can produce.
inline double max_rate(const FitnessSpec& fs, const PayoffMatrix& m) {
  return fs.fitness_of_payoff(m.max_entry_or_zero());
}

inline double max_rate_joint(const FitnessSpec& fs, const PayoffMatrix& a, const PayoffMatrix& b) {
  return fs.fitness_of_payoff(std::max(a.max_entry_or_zero(), b.max_entry_or_zero()));
}

enum : std::uint8_t { kEvDeath = 0, kEvArrow = 1 };

struct StreamEvent {
  double t;
  Site site;         // death site, or arrow tail
  std::uint8_t kind;
  std::uint8_t dir;  // arrow head direction
  std::uint8_t vdir; // auxiliary direction mark (helper-site pointer)
  double u;          // raw uniform(0, M) mark; verdicts are never precomputed
};

// Space-time driving noise: death marks at rate 1 per site, arrows at rate
// M/2d per directed edge with uniform(0, M) marks.  Generated as one exact
// superposition walk, so events come out already in global time order, the
// whole stream is a pure function of (seed, geometry, M, T), and extending T
// extends the sequence without disturbing its prefix.
class EventStream {
 public:
  std::shared_ptr<const TorusGeometry> geo;
  double M = 0, T = 0;
  std::uint64_t seed = 0;
  bool with_v = false;
  std::vector<StreamEvent> events;

  static EventStream build(std::shared_ptr<const TorusGeometry> geo, double M, double T,
                           std::uint64_t seed, bool with_v = false) {
    if (!(M > 0) || !(T > 0)) throw std::invalid_argument("EventStream: M and T must be positive");
    EventStream st;
    st.geo = std::move(geo);
    st.M = M;
    st.T = T;
    st.seed = seed;
    st.with_v = with_v;
    const TorusGeometry& g = *st.geo;
    double n = static_cast<double>(g.size());
    double total = n * (1.0 + M);
    CounterRng rng = CounterRng::derive(seed, 0x73747265616d31ull);  // stream channel tag
    st.events.reserve(static_cast<std::size_t>(total * T * 1.02) + 64);
    double t = 0;
    for (;;) {
      t += rng.exponential(total);
      if (t > T) break;
      StreamEvent ev;
      ev.t = t;
      if (rng.uniform01() * (1.0 + M) < 1.0) {
        ev.kind = kEvDeath;
        ev.site = static_cast<Site>(rng.uniform_below(static_cast<std::uint64_t>(g.size())));
        ev.dir = 0;
        ev.vdir = 0;
        ev.u = 0;
      } else {
        ev.kind = kEvArrow;
        ev.site = static_cast<Site>(rng.uniform_below(static_cast<std::uint64_t>(g.size())));
        ev.dir = static_cast<std::uint8_t>(rng.uniform_below(g.degree()));
        ev.u = rng.uniform01() * M;
        ev.vdir = with_v ? static_cast<std::uint8_t>(rng.uniform_below(g.degree())) : 0;
      }
      st.events.push_back(ev);
    }
    return st;
  }

  // Versioned little-endian binary dump for replay debugging.
  void dump(std::ostream& os) const {
    auto put = [&](const void* p, std::size_t n) { os.write(static_cast<const char*>(p), n); };
    os.write("MCPSTRM\x01", 8);
    std::uint32_t version = 1;
    put(&version, 4);
    put(&seed, 8);
    put(&M, 8);
    put(&T, 8);
    std::uint8_t wv = with_v ? 1 : 0;
    put(&wv, 1);
    std::uint32_t d = static_cast<std::uint32_t>(geo->dim());
    put(&d, 4);
    for (int s : geo->sides()) {
      std::uint32_t side = static_cast<std::uint32_t>(s);
      put(&side, 4);
    }
    std::uint64_t count = events.size();
    put(&count, 8);
    for (const StreamEvent& ev : events) {
      put(&ev.t, 8);
      put(&ev.kind, 1);
      std::uint64_t site = static_cast<std::uint64_t>(ev.site);
      put(&site, 8);
      put(&ev.dir, 1);
      put(&ev.u, 8);
      put(&ev.vdir, 1);
    }
  }

  static EventStream load(std::istream& is) {
    auto get = [&](void* p, std::size_t n) {
      is.read(static_cast<char*>(p), n);
      if (!is) throw std::runtime_error("EventStream::load: truncated stream file");
    };
    char magic[8];
    get(magic, 8);
    if (std::memcmp(magic, "MCPSTRM\x01", 8) != 0)
      throw std::runtime_error("EventStream::load: bad magic");
    std::uint32_t version;
    get(&version, 4);
    if (version != 1) throw std::runtime_error("EventStream::load: unsupported version");
    EventStream st;
    get(&st.seed, 8);
    get(&st.M, 8);
    get(&st.T, 8);
    std::uint8_t wv;
    get(&wv, 1);
    st.with_v = wv != 0;
    std::uint32_t d;
    get(&d, 4);
    std::vector<int> sides(d);
    for (std::uint32_t k = 0; k < d; ++k) {
      std::uint32_t side;
      get(&side, 4);
      sides[k] = static_cast<int>(side);
    }
    st.geo = std::make_shared<TorusGeometry>(sides);
    std::uint64_t count;
    get(&count, 8);
    st.events.resize(count);
    for (std::uint64_t i = 0; i < count; ++i) {
      StreamEvent& ev = st.events[i];
      get(&ev.t, 8);
      get(&ev.kind, 1);
      std::uint64_t site;
      get(&site, 8);
      ev.site = static_cast<Site>(site);
      get(&ev.dir, 1);
      get(&ev.u, 8);
      get(&ev.vdir, 1);
    }
    return st;
  }
};

// One step of the thinning dynamics; shared by solo evolution and couplings so
// marginals of a coupled run are bit-identical to solo runs by construction.
inline void apply_stream_event(Configuration& c, const StreamEvent& ev, const FitnessSpec& fs,
                               const PayoffMatrix& m) {
  if (ev.kind == kEvDeath) {
    c.set(ev.site, kEmpty);
    return;
  }
  State i = c.at(ev.site);
  if (i == kEmpty) return;
  Site head = c.geometry().neighbor(ev.site, ev.dir);
  if (c.at(head) != kEmpty) return;
  auto f = c.local_fractions(ev.site);
  double thresh = fs.fitness_of_payoff(m.entry(i, 1) * f[1] + m.entry(i, 2) * f[2]);
  if (ev.u <= thresh) c.set(head, i);
}

inline TrajectoryStats evolve(Configuration& c, const EventStream& st, const FitnessSpec& fs,
                              const PayoffMatrix& m, const ObserverSpec& obs = {}) {
  if (st.M < max_rate(fs, m) - 1e-12)
    throw std::invalid_argument("evolve: stream ceiling M below the model's maximal birth rate");
  if (c.geometry_ptr().get() != st.geo.get() && !(c.geometry().sides() == st.geo->sides()))
    throw std::invalid_argument("evolve: configuration and stream geometries differ");
  TrajectoryStats out;
  ObserverCursor cur(obs, out);
  for (const StreamEvent& ev : st.events) {
    cur.advance(ev.t, c);
    apply_stream_event(c, ev, fs, m);
  }
  cur.finish(c);
  return out;
}

}  // namespace mcp
