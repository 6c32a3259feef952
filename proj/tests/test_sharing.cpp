#include <catch2/catch_amalgamated.hpp>

#include <cmath>

#include "brmlab/sharing.hpp"

using namespace brmlab;

namespace {

// Independent oracle for E[psi]: enumerate all 2^m message ownership patterns
// and weight each by its exact probability.
double expected_share_bruteforce(const ShareFunction& fn, double q, long m) {
  double e = 0.0;
  for (long mask = 0; mask < (1L << m); ++mask) {
    long k = 0;
    double p = 1.0;
    for (long bit = 0; bit < m; ++bit) {
      if (mask & (1L << bit)) {
        ++k;
        p *= q;
      } else {
        p *= 1.0 - q;
      }
    }
    e += p * fn(k, m, q);
  }
  return e;
}

}  // namespace

TEST_CASE("fair_share formula and edges", "[sharing]") {
  CHECK(fair_share(0.0, 0.5, 100.0, 1e6) == 0.0);
  CHECK(fair_share(0.3, 0.0, 100.0, 1e6) == 1.0);
  CHECK(fair_share(0.5, 0.5, 100.0, 1e6) == Catch::Approx(50.0 / 500050.0).epsilon(1e-14));
  CHECK_THROWS_MATCHES(fair_share(0.0, 0.0, 100.0, 1e6), ModelError,
                       Catch::Matchers::Predicate<ModelError>([](const ModelError& e) {
                         return e.code() == Err::zero_pool_power;
                       }));
}

TEST_CASE("fair_share is monotone in the two allocations", "[sharing]") {
  double prev = -1.0;
  for (double g = 0.0; g <= 1.0; g += 0.05) {
    const double s = fair_share(g, 0.4, 500.0, 1e6);
    CHECK(s >= prev);
    CHECK(s >= 0.0);
    CHECK(s <= 1.0);
    prev = s;
  }
  prev = 2.0;
  for (double f = 0.05; f <= 1.0; f += 0.05) {
    const double s = fair_share(0.4, f, 500.0, 1e6);
    CHECK(s <= prev);
    prev = s;
  }
}

TEST_CASE("expected_share matches the exhaustive pattern oracle", "[sharing]") {
  const double g_i = 0.5, f_i = 0.4, m1 = 2000.0, m2 = 1e4;
  const double q = fair_share(g_i, f_i, m1, m2);
  for (ShareKind kind : {ShareKind::proportional_fair, ShareKind::constant}) {
    ShareFunction fn{kind, 0.37};
    const double brute = expected_share_bruteforce(fn, q, 8);
    const double fast = expected_share(fn, g_i, f_i, m1, m2, 8);
    CHECK(fast == Catch::Approx(brute).margin(1e-12));
  }
}

TEST_CASE("fairness predicate", "[sharing]") {
  const ShareFunction fair{ShareKind::proportional_fair, 0.0};
  CHECK(is_fair(fair, 0.5, 0.5, 100.0, 1e6));
  CHECK(is_fair(fair, 0.2, 0.8, 1.0, 50.0));
  CHECK(is_fair(fair, 0.5, 0.5, 100.0, 1e6, 1e-9, 25));  // closed form beyond 20 messages

  const ShareFunction flat{ShareKind::constant, 0.5};
  CHECK_FALSE(is_fair(flat, 0.5, 0.5, 100.0, 1e6));

  const ShareFunction underpaying{ShareKind::scaled_fair, 0.5};
  CHECK_FALSE(is_fair(underpaying, 0.5, 0.5, 100.0, 1e6));
  const ShareFunction exact_scale{ShareKind::scaled_fair, 1.0};
  CHECK(is_fair(exact_scale, 0.5, 0.5, 100.0, 1e6));
}

TEST_CASE("overpaying every member exceeds the pool's income", "[sharing]") {
  const std::vector<double> members{3.0, 2.0, 5.0, 1.5};
  CHECK(aggregate_share(1.0, members) == Catch::Approx(1.0));
  CHECK(aggregate_share(1.1, members) > 1.0);
  CHECK_THROWS_AS(aggregate_share(1.0, {}), ModelError);
}
