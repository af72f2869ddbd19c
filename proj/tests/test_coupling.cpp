#include <catch2/catch_amalgamated.hpp>

#include <memory>

#include "mcp/coupling.hpp"

using namespace mcp;

namespace {

std::shared_ptr<TorusGeometry> torus(std::vector<int> sides) {
  return std::make_shared<TorusGeometry>(std::move(sides));
}

// Shared-threshold initial pair: upper gets every 1 the lower has plus more,
// lower gets every 2 the upper has plus more.
std::pair<Configuration, Configuration> ordered_pair(std::shared_ptr<TorusGeometry> geo,
                                                     CounterRng& rng) {
  Configuration lower(geo), upper(geo);
  for (Site s = 0; s < geo->size(); ++s) {
    double u = rng.uniform01();
    if (u < 0.25) {
      lower.set(s, kOne);
      upper.set(s, kOne);
    } else if (u < 0.4) {
      upper.set(s, kOne);
    } else if (u < 0.55) {
      lower.set(s, kTwo);
      upper.set(s, kTwo);
    } else if (u < 0.7) {
      lower.set(s, kTwo);
    }
  }
  return {lower, upper};
}

}  // namespace

TEST_CASE("matrix ordering predicate") {
  PayoffMatrix lo{0.5, -0.3, 0.2, 0.1};
  PayoffMatrix hi{1.0, 0.4, -0.2, -0.1};
  CHECK(ordering_holds(lo, hi));
  CHECK(!ordering_holds(hi, lo));
  // Equal neutral matrices are ordered both ways.
  PayoffMatrix z{};
  CHECK(ordering_holds(z, z));
  // Negative lower a11 breaks the precondition.
  CHECK(!ordering_holds(PayoffMatrix{-0.1, 0, 0, 0}, hi));
  // Upper a12 must be nonnegative.
  CHECK(!ordering_holds(lo, PayoffMatrix{1.0, -0.1, -0.2, -0.1}));
}

TEST_CASE("configuration domination predicate") {
  auto geo = torus({6});
  Configuration lo(geo), hi(geo);
  CHECK(dominates(lo, hi));
  lo.set(0, kOne);
  CHECK(!dominates(lo, hi));  // upper lost a 1
  hi.set(0, kOne);
  CHECK(dominates(lo, hi));
  hi.set(1, kTwo);
  CHECK(!dominates(lo, hi));  // upper gained a 2 the lower lacks
  lo.set(1, kTwo);
  CHECK(dominates(lo, hi));
  // Lower may hold extra 2s and upper extra 1s.
  lo.set(2, kTwo);
  hi.set(3, kOne);
  CHECK(dominates(lo, hi));
}

TEST_CASE("coupled run preserves domination and reproduces solo marginals") {
  auto geo = torus({12, 12});
  auto fs = FitnessSpec::exponential(2.0);
  PayoffMatrix m_lo{0.4, -0.5, 0.3, 0.2};
  PayoffMatrix m_hi{0.9, 0.6, -0.1, -0.3};
  REQUIRE(ordering_holds(m_lo, m_hi));

  CounterRng ir(31);
  auto [lower, upper] = ordered_pair(geo, ir);
  REQUIRE(dominates(lower, upper));

  auto st = EventStream::build(geo, max_rate_joint(fs, m_lo, m_hi), 6.0, 414);
  auto rep = coupled_run(lower, upper, m_lo, m_hi, fs, st);
  CHECK(rep.ok);
  CHECK(rep.events_checked == st.events.size());
  CHECK(dominates(rep.final_lower, rep.final_upper));

  // Marginals: each leg alone over the same stream gives bit-identical finals.
  auto solo_lo = lower;
  evolve(solo_lo, st, fs, m_lo, {});
  CHECK(solo_lo == rep.final_lower);
  auto solo_hi = upper;
  evolve(solo_hi, st, fs, m_hi, {});
  CHECK(solo_hi == rep.final_upper);
}

TEST_CASE("equal matrices and initial states stay glued forever") {
  auto geo = torus({8, 8});
  auto fs = FitnessSpec::exponential(1.5);
  PayoffMatrix m{0.7, 0.0, 0.0, 0.0};
  REQUIRE(ordering_holds(m, m));
  CounterRng ir(5);
  auto init = Configuration::bernoulli(geo, 0.3, 0.3, ir);
  auto st = EventStream::build(geo, max_rate(fs, m), 5.0, 99);
  auto rep = coupled_run(init, init, m, m, fs, st);
  CHECK(rep.ok);
  CHECK(rep.final_lower == rep.final_upper);
}

TEST_CASE("a corrupted upper rule is caught by the per-event check") {
  auto geo = torus({12, 12});
  auto fs = FitnessSpec::exponential(2.0);
  PayoffMatrix m_lo{0.4, -0.2, 0.1, 0.0};
  PayoffMatrix m_hi{0.8, 0.3, 0.0, 0.0};
  CounterRng ir(77);
  auto [lower, upper] = ordered_pair(geo, ir);
  auto st = EventStream::build(geo, max_rate_joint(fs, m_lo, m_hi), 8.0, 515);
  CouplingOptions opt;
  opt.corrupt_upper = true;
  auto rep = coupled_run(lower, upper, m_lo, m_hi, fs, st, opt);
  CHECK(!rep.ok);
  CHECK(rep.t_violation > 0.0);
  CHECK(rep.violation_site >= 0);
  CHECK(!rep.what.empty());
  CHECK(rep.events_checked < st.events.size());  // stopped at the violation
}

TEST_CASE("coupled run validates its preconditions") {
  auto geo = torus({6, 6});
  auto fs = FitnessSpec::exponential(2.0);
  PayoffMatrix m_lo{0.4, -0.2, 0.1, 0.0};
  PayoffMatrix m_hi{0.8, 0.3, 0.0, 0.0};
  Configuration a(geo), b(geo);
  auto st = EventStream::build(geo, max_rate_joint(fs, m_lo, m_hi), 1.0, 1);

  // Unordered matrices.
  CHECK_THROWS_AS(coupled_run(a, b, m_hi, m_lo, fs, st), std::invalid_argument);
  // Unordered initial configurations.
  a.set(0, kOne);
  CHECK_THROWS_AS(coupled_run(a, b, m_lo, m_hi, fs, st), std::invalid_argument);
  // Stream ceiling too small for the joint maximum.
  auto low = EventStream::build(geo, max_rate_joint(fs, m_lo, m_hi) * 0.5, 1.0, 1);
  b.set(0, kOne);
  CHECK_THROWS_AS(coupled_run(a, b, m_lo, m_hi, fs, low), std::invalid_argument);
}
