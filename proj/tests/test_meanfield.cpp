#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <numeric>
#include <sstream>

#include "mcp/meanfield.hpp"

using namespace mcp;

namespace {

const DenseMatrix kLogistic{{1.0, 1.0}, {0.0, 0.0}};  // phi1 = 1, phi2 = 0
const DenseMatrix kHawkDove{{0.0, 2.0}, {1.0, 0.0}};  // interior rest point at 2/3

double logistic_exact(double t) { return 1.0 / (1.0 + 9.0 * std::exp(-t)); }

}  // namespace

TEST_CASE("replicator vector field sums to zero and fixes the vertices") {
  DenseMatrix a{{0.3, -1.2, 0.7}, {2.0, 0.1, -0.4}, {-0.9, 0.5, 0.0}};
  std::vector<double> u{0.2, 0.5, 0.3};
  auto rhs = replicator_rhs(u, a);
  REQUIRE(rhs.size() == 3);
  double total = std::accumulate(rhs.begin(), rhs.end(), 0.0);
  CHECK(std::abs(total) < 1e-15);

  // Monomorphic states are exact rest points: every pair term carries u_i u_j.
  auto vertex = replicator_rhs({0.0, 1.0, 0.0}, a);
  for (double v : vertex) CHECK(v == 0.0);

  CHECK_THROWS_AS(replicator_rhs({}, {}), std::domain_error);
  CHECK_THROWS_AS(replicator_rhs({0.5, 0.5}, a), std::domain_error);
  DenseMatrix ragged{{1.0, 2.0}, {3.0}};
  CHECK_THROWS_AS(replicator_rhs({0.5, 0.5}, ragged), std::domain_error);
}

TEST_CASE("dominant-strategy flow reproduces the logistic curve") {
  // With phi1 - phi2 = 1 identically, u1 solves u' = u(1-u), so from u1(0) =
  // 0.1 the closed form is 1/(1 + 9 e^{-t}).
  auto traj = integrate_replicator({0.1, 0.9}, kLogistic, 10.0);
  REQUIRE(traj.times.size() == traj.states.size());
  REQUIRE(traj.times.size() == 10001);
  CHECK(traj.times.front() == 0.0);
  CHECK(traj.times.back() == Catch::Approx(10.0).margin(1e-12));

  struct Probe {
    std::size_t idx;
    double t, expect;
  };
  for (const Probe& p : {Probe{1000, 1.0, 0.23196931668407392},
                         Probe{5000, 5.0, 0.9428256185740149},
                         Probe{10000, 10.0, 0.9995915675173918}}) {
    CHECK(traj.times[p.idx] == Catch::Approx(p.t).margin(1e-12));
    CHECK(traj.states[p.idx][0] == Catch::Approx(p.expect).margin(1e-9));
    CHECK(traj.states[p.idx][0] == Catch::Approx(logistic_exact(p.t)).margin(1e-9));
  }
}

TEST_CASE("hawk-dove flow settles on the interior equilibrium") {
  auto traj = integrate_replicator({0.2, 0.8}, kHawkDove, 40.0);
  CHECK(traj.states.back()[0] == Catch::Approx(2.0 / 3.0).margin(1e-6));

  // The flow never leaves the simplex.
  for (const auto& s : traj.states) {
    double sum = s[0] + s[1];
    REQUIRE(std::abs(sum - 1.0) < 1e-9);
    REQUIRE(s[0] > -1e-12);
    REQUIRE(s[1] > -1e-12);
  }
}

TEST_CASE("integrator rejects bad initial data and bad steps") {
  CHECK_THROWS_AS(integrate_replicator({-0.1, 1.1}, kLogistic, 1.0), std::domain_error);
  CHECK_THROWS_AS(integrate_replicator({0.3, 0.3}, kLogistic, 1.0), std::domain_error);
  CHECK_THROWS_AS(integrate_replicator({0.5, 0.5}, kLogistic, 1.0, 0.0), std::invalid_argument);
  CHECK_THROWS_AS(integrate_replicator({0.5, 0.5}, kLogistic, -1.0), std::invalid_argument);
}

TEST_CASE("trajectory grid covers the horizon including ragged ends") {
  auto a = integrate_replicator({0.5, 0.5}, kHawkDove, 2.5);
  CHECK(a.times.size() == 2501);
  CHECK(a.times.back() == Catch::Approx(2.5).margin(1e-12));

  // Horizon shorter than one step: a single closing step lands exactly on it.
  auto b = integrate_replicator({0.5, 0.5}, kHawkDove, 0.0005);
  REQUIRE(b.times.size() == 2);
  CHECK(b.times.back() == 0.0005);

  auto c = integrate_replicator({0.5, 0.5}, kHawkDove, 0.0);
  REQUIRE(c.times.size() == 1);
  CHECK(c.times[0] == 0.0);
}

TEST_CASE("fixed-step error shrinks at fourth order") {
  double exact = logistic_exact(1.0);
  auto at = [&](double dt) {
    return integrate_replicator({0.1, 0.9}, kLogistic, 1.0, dt).states.back()[0];
  };
  double coarse = std::abs(at(0.2) - exact);
  double fine = std::abs(at(0.1) - exact);
  REQUIRE(coarse > 0.0);
  REQUIRE(fine > 0.0);
  double ratio = coarse / fine;
  CHECK(ratio > 12.0);
  CHECK(ratio < 20.0);
}

TEST_CASE("csv writer emits one labeled column per frequency") {
  auto traj = integrate_replicator({0.1, 0.9}, kLogistic, 0.0);
  std::ostringstream os;
  write_meanfield_csv(traj, os);
  CHECK(os.str() == "time,u1,u2\n0,0.1,0.9\n");
}
