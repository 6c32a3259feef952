#include <catch2/catch_amalgamated.hpp>

#include <cmath>
#include <set>
#include <vector>

#include "brmlab/core.hpp"
#include "helpers.hpp"

using namespace brmlab;

namespace {

// Stars-and-bars oracle: number of ways to write `units` as an ordered sum of
// `parts` non-negative integers, counted by direct recursion.
long count_compositions(long units, int parts) {
  if (parts == 1) return 1;
  long total = 0;
  for (long k = 0; k <= units; ++k) total += count_compositions(units - k, parts - 1);
  return total;
}

}  // namespace

TEST_CASE("make_strategy validates the simplex", "[core]") {
  const StrategyVector solo = make_strategy({1.0, 0.0, 0.0, 0.0});
  CHECK(solo.solo() == 1.0);
  CHECK(solo.pools() == 3);
  CHECK(solo.active_count() == 1);

  // Bitcoin-style split: solo rest, then the three big pools.
  const StrategyVector btc = make_strategy({0.41, 0.29, 0.16, 0.14});
  CHECK(btc[1] == 0.29);

  CHECK_THROWS_MATCHES(make_strategy({0.5, 0.6, -0.1}), ModelError,
                       Catch::Matchers::Predicate<ModelError>(
                           [](const ModelError& e) { return e.code() == Err::negative_weight; }));
  CHECK_THROWS_MATCHES(make_strategy({0.5, 0.4}), ModelError,
                       Catch::Matchers::Predicate<ModelError>(
                           [](const ModelError& e) { return e.code() == Err::sum_not_one; }));
  CHECK_THROWS_AS(make_strategy({}), ModelError);
}

TEST_CASE("canonical grid enumeration", "[core]") {
  SECTION("p=1, alpha=0.5 lists the three points") {
    const auto pts = enumerate_grid(1, 0.5);
    REQUIRE(pts.size() == 3);
    CHECK(pts[0].approx_equal(make_strategy({0.0, 1.0})));
    CHECK(pts[1].approx_equal(make_strategy({0.5, 0.5})));
    CHECK(pts[2].approx_equal(make_strategy({1.0, 0.0})));
  }
  SECTION("sizes match the stars-and-bars count") {
    CHECK(enumerate_grid(2, 0.25).size() == static_cast<std::size_t>(count_compositions(4, 3)));
    CHECK(enumerate_grid(2, 0.25).size() == 15);
    const AlphaGrid g = AlphaGrid::canonical(3, 0.1);
    CHECK(g.size() == static_cast<std::size_t>(count_compositions(10, 4)));
    CHECK(g.size() == 286);
    CHECK(g.points().size() == g.size());
  }
  SECTION("bad alpha") {
    CHECK_THROWS_MATCHES(enumerate_grid(2, 0.3), ModelError,
                         Catch::Matchers::Predicate<ModelError>([](const ModelError& e) {
                           return e.code() == Err::alpha_not_unit_fraction;
                         }));
    CHECK_THROWS_AS(enumerate_grid(2, -0.1), ModelError);
  }
}

TEST_CASE("every grid point is a valid simplex point, enumerated once", "[core]") {
  const AlphaGrid grid = AlphaGrid::canonical(3, 0.1);
  std::set<std::vector<long>> seen;
  grid.for_each([&](const StrategyVector& g, std::span<const long> units) {
    double sum = 0.0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      CHECK(g[i] >= 0.0);
      sum += g[i];
    }
    CHECK(std::abs(sum - 1.0) <= kSimplexTol);
    seen.insert(std::vector<long>(units.begin(), units.end()));
  });
  CHECK(seen.size() == grid.size());
}

TEST_CASE("grid soundness: coordinate differences are multiples of alpha", "[core]") {
  const auto check_grid = [](const AlphaGrid& grid) {
    const auto pts = grid.points();
    const double alpha = grid.alpha();
    for (std::size_t a = 0; a < pts.size(); ++a) {
      for (std::size_t b = a + 1; b < pts.size(); ++b) {
        for (std::size_t i = 0; i < pts[a].size(); ++i) {
          const double d = std::abs(pts[a][i] - pts[b][i]) / alpha;
          CHECK(std::abs(d - std::round(d)) < 1e-9);
        }
      }
    }
  };
  check_grid(AlphaGrid::canonical(2, 0.25));
  check_grid(AlphaGrid::anchored(make_strategy({0.0, 0.41, 0.33, 0.26}), 0.1));
}

TEST_CASE("anchored grids keep the anchor and shrink by the residue mass", "[core]") {
  const StrategyVector f = make_strategy({0.0, 0.41, 0.33, 0.26});
  const AlphaGrid grid = AlphaGrid::anchored(f, 0.1);
  CHECK(grid.contains(f));
  // residues 0.01+0.03+0.06 eat one alpha unit: 9 units over 4 slots.
  CHECK(grid.base_units() == 9);
  CHECK(grid.size() == static_cast<std::size_t>(count_compositions(9, 4)));
  CHECK(grid.size() == 220);
  CHECK_FALSE(grid.contains(StrategyVector::vertex(3, 0)));

  const AlphaGrid aligned = AlphaGrid::anchored(make_strategy({0.0, 0.5, 0.3, 0.2}), 0.1);
  CHECK(aligned.size() == 286);
  CHECK(aligned.contains(StrategyVector::vertex(3, 0)));
}

TEST_CASE("grid membership", "[core]") {
  const AlphaGrid grid = AlphaGrid::canonical(2, 0.25);
  for (const auto& p : grid.points()) CHECK(grid.contains(p));
  CHECK_FALSE(grid.contains(make_strategy({0.1, 0.9, 0.0})));
  CHECK_FALSE(grid.contains(make_strategy({0.5, 0.5})));  // wrong arity
  CHECK(grid.units_of(make_strategy({0.25, 0.5, 0.25}))[1] == 2);
}

TEST_CASE("parity_complete derives the full-block reward", "[core]") {
  SECTION("r_block=1, ratio 10, r_partial=0.05") {
    const FruitchainParams p = parity_complete(1.0, 10.0, 100.0, 0.05);
    CHECK(p.r_full == Catch::Approx(0.5).margin(1e-12));
  }
  SECTION("oversized partial reward") {
    CHECK_THROWS_MATCHES(parity_complete(1.0, 10.0, 1000.0, 0.02), ModelError,
                         Catch::Matchers::Predicate<ModelError>([](const ModelError& e) {
                           return e.code() == Err::partial_reward_too_large;
                         }));
  }
  SECTION("round-trip against the parity equation") {
    const FruitchainParams p = parity_complete(6.25, 10.0, 1000.0, 0.05);
    CHECK(p.r_full == Catch::Approx(1.25).margin(1e-12));
    const double back = p.r_full + (p.t_partial / 10.0) * p.r_partial;
    CHECK(std::abs(back - 6.25) <= 1e-9);
  }
}

TEST_CASE("mining parameters expose per-query win rates", "[core]") {
  MiningParams m{30, 1074.0};
  m.validate();
  CHECK(m.gamma1() == Catch::Approx(1074.0 / 1073741824.0));
  MiningParams bad{30, 0.0};
  CHECK_THROWS_AS(bad.validate(), ModelError);
}

TEST_CASE("game config validation", "[core]") {
  GameConfig cfg = test::base_config();
  CHECK(cfg.pools() == 3);
  CHECK(cfg.sigma() == Catch::Approx(1e-3));
  cfg.mode = ApproxMode::exact;
  CHECK(cfg.sigma() == Catch::Approx(1000.0 / 1001000.0));

  GameConfig big = test::base_config();
  big.miner.m1 = 5000.0;  // M1/M2 = 5e-3 breaks the small-miner assumption
  CHECK_THROWS_MATCHES(big.validate(), ModelError,
                       Catch::Matchers::Predicate<ModelError>([](const ModelError& e) {
                         return e.code() == Err::assumption_violated;
                       }));
  big.mode = ApproxMode::exact;
  CHECK_NOTHROW(big.validate());

  GameConfig nofc = test::base_config();
  nofc.fruitchain.reset();
  CHECK_NOTHROW(nofc.validate());
  CHECK_THROWS_MATCHES(nofc.fruit(), ModelError,
                       Catch::Matchers::Predicate<ModelError>([](const ModelError& e) {
                         return e.code() == Err::missing_fruitchain_params;
                       }));

  GameConfig bad_delta = test::base_config();
  bad_delta.delta = 1.5;
  CHECK_THROWS_AS(bad_delta.validate(), ModelError);
}
