#include <catch2/catch_amalgamated.hpp>

#include <memory>
#include <vector>

#include "mcp/lattice.hpp"
#include "mcp/rng.hpp"

using mcp::Configuration;
using mcp::CounterRng;
using mcp::Site;
using mcp::TorusGeometry;

TEST_CASE("torus geometry validates its sides") {
  CHECK_THROWS_AS(TorusGeometry({}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGeometry({3}), std::invalid_argument);
  CHECK_THROWS_AS(TorusGeometry({8, 2}), std::invalid_argument);
  CHECK_NOTHROW(TorusGeometry({4}));
  TorusGeometry g({6, 4, 5});
  CHECK(g.dim() == 3);
  CHECK(g.degree() == 6);
  CHECK(g.size() == 120);
}

TEST_CASE("site indexing round-trips through coordinates") {
  TorusGeometry g({5, 7, 4});
  for (Site s = 0; s < g.size(); ++s) {
    auto c = g.coords(s);
    REQUIRE(g.site_at(c) == s);
  }
  // Negative and overflowing coordinates wrap.
  CHECK(g.site_at({-1, 0, 0}) == g.site_at({4, 0, 0}));
  CHECK(g.site_at({5, 7, 4}) == g.site_at({0, 0, 0}));
  CHECK_THROWS_AS(g.site_at({1, 2}), std::invalid_argument);
}

TEST_CASE("neighbor table matches coordinate arithmetic and is involutive") {
  TorusGeometry g({6, 5});
  for (Site s = 0; s < g.size(); ++s) {
    auto c = g.coords(s);
    for (int k = 0; k < g.dim(); ++k) {
      auto down = c, up = c;
      down[k] -= 1;
      up[k] += 1;
      REQUIRE(g.neighbor(s, 2 * k) == g.site_at(down));
      REQUIRE(g.neighbor(s, 2 * k + 1) == g.site_at(up));
      // Stepping -e_k then +e_k returns to s.
      REQUIRE(g.neighbor(g.neighbor(s, 2 * k), 2 * k + 1) == s);
    }
  }
}

TEST_CASE("configuration tracks counts through mutation") {
  auto geo = std::make_shared<TorusGeometry>(std::vector<int>{8, 8});
  Configuration c(geo);
  CHECK(c.count(mcp::kEmpty) == 64);
  CHECK(c.occupied() == 0);

  c.set(0, mcp::kOne);
  c.set(1, mcp::kTwo);
  c.set(2, mcp::kTwo);
  CHECK(c.count(mcp::kOne) == 1);
  CHECK(c.count(mcp::kTwo) == 2);
  CHECK(c.occupied() == 3);

  c.set(1, mcp::kEmpty);
  c.set(0, mcp::kTwo);
  CHECK(c.count(mcp::kOne) == 0);
  CHECK(c.count(mcp::kTwo) == 2);

  // Counts must agree with a raw recount at all times.
  Site n1 = 0, n2 = 0;
  for (auto v : c.raw()) {
    n1 += v == mcp::kOne;
    n2 += v == mcp::kTwo;
  }
  CHECK(n1 == c.count(mcp::kOne));
  CHECK(n2 == c.count(mcp::kTwo));
}

TEST_CASE("local fractions and neighbor counts agree") {
  auto geo = std::make_shared<TorusGeometry>(std::vector<int>{4, 4});
  Configuration c(geo);
  Site x = geo->site_at({1, 1});
  c.set(geo->site_at({0, 1}), mcp::kOne);
  c.set(geo->site_at({2, 1}), mcp::kOne);
  c.set(geo->site_at({1, 0}), mcp::kTwo);

  auto f = c.local_fractions(x);
  CHECK(f[0] == 0.25);
  CHECK(f[1] == 0.5);
  CHECK(f[2] == 0.25);
  CHECK(c.neighbor_count(x, mcp::kOne) == 2);
  CHECK(c.neighbor_count(x, mcp::kTwo) == 1);
  CHECK(c.neighbor_count(x, mcp::kEmpty) == 1);
}

TEST_CASE("bernoulli fill is deterministic in the rng and validates probabilities") {
  auto geo = std::make_shared<TorusGeometry>(std::vector<int>{16, 16});
  CounterRng r1(5), r2(5);
  auto a = Configuration::bernoulli(geo, 0.3, 0.2, r1);
  auto b = Configuration::bernoulli(geo, 0.3, 0.2, r2);
  CHECK(a == b);
  CHECK(a.occupied() > 0);
  CHECK(a.count(mcp::kOne) > 20);  // mean 76.8, sd ~7.3
  CHECK(a.count(mcp::kTwo) > 10);  // mean 51.2

  CounterRng r3(5);
  CHECK_THROWS_AS(Configuration::bernoulli(geo, -0.1, 0.2, r3), std::invalid_argument);
  CHECK_THROWS_AS(Configuration::bernoulli(geo, 0.7, 0.6, r3), std::invalid_argument);
}

TEST_CASE("label swap is an involution that exchanges counts") {
  auto geo = std::make_shared<TorusGeometry>(std::vector<int>{10, 10});
  CounterRng r(9);
  auto c = Configuration::bernoulli(geo, 0.4, 0.2, r);
  auto s = c.label_swapped();
  CHECK(s.count(mcp::kOne) == c.count(mcp::kTwo));
  CHECK(s.count(mcp::kTwo) == c.count(mcp::kOne));
  CHECK(s.label_swapped() == c);
  for (Site x = 0; x < geo->size(); ++x) {
    if (c.at(x) == mcp::kEmpty) REQUIRE(s.at(x) == mcp::kEmpty);
  }
}
