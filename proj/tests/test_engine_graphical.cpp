#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <memory>
#include <sstream>
#include <vector>

#include "mcp/engine_direct.hpp"
#include "mcp/engine_graphical.hpp"
#include "mcp/stats.hpp"

using namespace mcp;

namespace {

std::shared_ptr<TorusGeometry> torus(std::vector<int> sides) {
  return std::make_shared<TorusGeometry>(std::move(sides));
}

bool same_events(const std::vector<StreamEvent>& a, const std::vector<StreamEvent>& b) {
  if (a.size() != b.size()) return false;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const auto& x = a[i];
    const auto& y = b[i];
    if (x.t != y.t || x.site != y.site || x.kind != y.kind || x.dir != y.dir ||
        x.vdir != y.vdir || x.u != y.u)
      return false;
  }
  return true;
}

}  // namespace

TEST_CASE("rate ceilings from the payoff matrix") {
  auto fs = FitnessSpec::exponential(2.0);
  PayoffMatrix m{1.0, 0.5, -2.0, 0.0};
  CHECK(max_rate(fs, m) == Catch::Approx(5.4365636569180905).epsilon(1e-15));
  // All-negative payoffs floor the exponent at zero.
  CHECK(max_rate(fs, PayoffMatrix{-1, -2, -3, -4}) == Catch::Approx(2.0).epsilon(1e-15));
  PayoffMatrix m2{0.2, 0.1, 2.0, 0.3};
  CHECK(max_rate_joint(fs, m, m2) == Catch::Approx(2.0 * std::exp(2.0)).epsilon(1e-14));
}

TEST_CASE("stream statistics match the generating intensities") {
  auto geo = torus({8, 8});
  const double M = 3.0, T = 10.0;
  auto st = EventStream::build(geo, M, T, 123);
  const double mean = 64 * (1.0 + M) * T;  // 2560
  CHECK(std::abs(double(st.events.size()) - mean) < 5 * std::sqrt(mean));

  double prev = 0.0;
  std::size_t deaths = 0;
  for (const auto& ev : st.events) {
    REQUIRE(ev.t > prev);
    REQUIRE(ev.t <= T);
    prev = ev.t;
    REQUIRE(ev.site >= 0);
    REQUIRE(ev.site < 64);
    if (ev.kind == kEvDeath) {
      ++deaths;
    } else {
      REQUIRE(ev.kind == kEvArrow);
      REQUIRE(ev.dir < 4);
      REQUIRE(ev.u >= 0.0);
      REQUIRE(ev.u < M);
      REQUIRE(ev.vdir == 0);  // built without auxiliary marks
    }
  }
  double p_death = 1.0 / (1.0 + M);
  double n = double(st.events.size());
  CHECK(std::abs(deaths / n - p_death) < 5 * proportion_se(p_death, st.events.size()));
}

TEST_CASE("streams are deterministic and prefix-stable in the horizon") {
  auto geo = torus({6, 6});
  auto a = EventStream::build(geo, 2.5, 5.0, 77);
  auto b = EventStream::build(geo, 2.5, 5.0, 77);
  REQUIRE(same_events(a.events, b.events));

  auto longer = EventStream::build(geo, 2.5, 10.0, 77);
  REQUIRE(longer.events.size() > a.events.size());
  std::vector<StreamEvent> prefix(longer.events.begin(),
                                  longer.events.begin() + static_cast<std::ptrdiff_t>(a.events.size()));
  REQUIRE(same_events(a.events, prefix));
  // The next event of the longer stream falls beyond the shorter horizon.
  CHECK(longer.events[a.events.size()].t > 5.0);

  auto other_seed = EventStream::build(geo, 2.5, 5.0, 78);
  CHECK(!same_events(a.events, other_seed.events));

  CHECK_THROWS_AS(EventStream::build(geo, 0.0, 5.0, 1), std::invalid_argument);
  CHECK_THROWS_AS(EventStream::build(geo, 2.0, -1.0, 1), std::invalid_argument);
}

TEST_CASE("stream dump and load round-trip exactly") {
  auto geo = torus({5, 4});
  auto st = EventStream::build(geo, 1.75, 3.0, 991, /*with_v=*/true);
  std::ostringstream os(std::ios::binary);
  st.dump(os);
  std::istringstream is(os.str(), std::ios::binary);
  auto back = EventStream::load(is);
  CHECK(back.M == st.M);
  CHECK(back.T == st.T);
  CHECK(back.seed == st.seed);
  CHECK(back.with_v == st.with_v);
  CHECK(back.geo->sides() == st.geo->sides());
  REQUIRE(same_events(back.events, st.events));

  std::istringstream bad("HELLO\x01\x02\x03 more garbage", std::ios::binary);
  CHECK_THROWS_AS(EventStream::load(bad), std::runtime_error);
  std::string cut = os.str().substr(0, os.str().size() / 2);
  std::istringstream trunc(cut, std::ios::binary);
  CHECK_THROWS_AS(EventStream::load(trunc), std::runtime_error);
}

TEST_CASE("auxiliary direction marks are drawn only when requested") {
  auto geo = torus({6, 6});
  auto st = EventStream::build(geo, 2.0, 4.0, 55, /*with_v=*/true);
  bool any_nonzero = false;
  for (const auto& ev : st.events)
    if (ev.kind == kEvArrow) any_nonzero |= ev.vdir != 0;
  CHECK(any_nonzero);
  for (const auto& ev : st.events) REQUIRE(ev.vdir < 4);
}

TEST_CASE("thinned event application follows the acceptance rule") {
  auto geo = torus({6});
  auto fs = FitnessSpec::exponential(2.0);
  PayoffMatrix m{1.0, 0.0, 0.0, 0.0};
  Configuration c(geo);
  c.set(0, kOne);
  c.set(1, kOne);

  // Site 1 (type 1) has one type-1 neighbor: payoff 1/2, threshold 2e^{1/2}.
  double thr = 2.0 * std::exp(0.5);
  StreamEvent ok{0.5, 1, kEvArrow, 1, 0, thr - 1e-9};  // head = site 2, accept
  auto c1 = c;
  apply_stream_event(c1, ok, fs, m);
  CHECK(c1.at(2) == kOne);

  StreamEvent high{0.5, 1, kEvArrow, 1, 0, thr + 1e-9};  // mark above threshold
  auto c2 = c;
  apply_stream_event(c2, high, fs, m);
  CHECK(c2.at(2) == kEmpty);

  StreamEvent into_occupied{0.5, 1, kEvArrow, 0, 0, 0.01};  // head = site 0
  auto c3 = c;
  apply_stream_event(c3, into_occupied, fs, m);
  CHECK(c3 == c);

  StreamEvent from_vacant{0.5, 3, kEvArrow, 1, 0, 0.01};
  auto c4 = c;
  apply_stream_event(c4, from_vacant, fs, m);
  CHECK(c4 == c);

  StreamEvent death{0.5, 1, kEvDeath, 0, 0, 0.0};
  auto c5 = c;
  apply_stream_event(c5, death, fs, m);
  CHECK(c5.at(1) == kEmpty);
  CHECK(c5.occupied() == 1);
}

TEST_CASE("evolve validates ceiling and geometry, and empty stays empty") {
  auto geo = torus({8, 8});
  auto fs = FitnessSpec::exponential(2.0);
  PayoffMatrix m{1.0, 0.0, 0.0, 0.0};
  auto st = EventStream::build(geo, max_rate(fs, m), 2.0, 3);

  Configuration empty(geo);
  auto stats = evolve(empty, st, fs, m, {});
  CHECK(empty.occupied() == 0);
  (void)stats;

  // Ceiling below the attainable maximum must be rejected.
  auto low = EventStream::build(geo, max_rate(fs, m) * 0.5, 2.0, 3);
  Configuration c(geo, kOne);
  CHECK_THROWS_AS(evolve(c, low, fs, m, {}), std::invalid_argument);

  auto other_geo = torus({8, 4});
  Configuration oc(other_geo, kOne);
  CHECK_THROWS_AS(evolve(oc, st, fs, m, {}), std::invalid_argument);
}

TEST_CASE("graphical evolution is deterministic in the stream") {
  auto geo = torus({10, 10});
  auto fs = FitnessSpec::exponential(1.6);
  PayoffMatrix m{0.5, -0.2, 0.1, 0.4};
  auto st = EventStream::build(geo, max_rate(fs, m), 4.0, 2718);
  CounterRng ir(12);
  auto init = Configuration::bernoulli(geo, 0.3, 0.3, ir);
  auto c1 = init;
  auto c2 = init;
  evolve(c1, st, fs, m, {});
  evolve(c2, st, fs, m, {});
  CHECK(c1 == c2);
  CHECK(c1.occupied() > 0);

  // Label symmetry: swapping types and the matrix commutes with evolution
  // under the same driving noise.
  auto cs = init.label_swapped();
  evolve(cs, st, fs, m.label_swapped(), {});
  CHECK(cs == c1.label_swapped());
}

TEST_CASE("direct and graphical engines agree in law on a small ring") {
  auto geo = torus({32});
  auto fs = FitnessSpec::exponential(1.5);
  PayoffMatrix m{0.5, 0.0, 0.0, 0.3};
  const double T = 3.0;
  const int reps = 80;
  std::vector<double> direct_n1, graph_n1;
  for (int r = 0; r < reps; ++r) {
    CounterRng ir = CounterRng::derive(900, 1, r);
    auto init = Configuration::bernoulli(geo, 0.4, 0.3, ir);
    SimState sim(init, fs, m, CounterRng::derive(900, 2, r));
    sim.run(T, {});
    direct_n1.push_back(double(sim.config().count(kOne)));

    auto st = EventStream::build(geo, max_rate(fs, m), T, 7000 + r);
    auto c = init;
    evolve(c, st, fs, m, {});
    graph_n1.push_back(double(c.count(kOne)));
  }
  auto ks = ks_two_sample(direct_n1, graph_n1);
  CHECK(ks.p > 1e-3);
}
