#pragma once

// Reward sharing schemes and the fairness predicate. A fair scheme's expected
// share equals the member's fraction of the pool's hash rate, which is what
// makes the pool-channel reward atoms in brm.hpp well defined.

#include <cmath>
#include <vector>

#include "brmlab/core.hpp"

namespace brmlab {

// Expected fraction of pool i's reward owed to the joining miner:
// g_i*M1 / (g_i*M1 + f_i*M2).
inline double fair_share(double g_i, double f_i, double m1, double m2) {
  if (g_i < 0.0 || f_i < 0.0 || !(m1 > 0.0) || !(m2 > 0.0))
    fail(Err::invalid_config, "fair_share: negative weights or non-positive hash rates");
  const double own = g_i * m1;
  const double pool = own + f_i * m2;
  if (!(pool > 0.0))
    fail(Err::zero_pool_power, "ZeroPoolPower: pool has no hash rate at all");
  return own / pool;
}

enum class ShareKind { proportional_fair, constant, scaled_fair };

// Per-round share rule evaluated on the pool's message tally. The pool sees
// m messages of which k came from the joining miner; `fair` is the member's
// hash-rate fraction of the pool.
struct ShareFunction {
  ShareKind kind = ShareKind::proportional_fair;
  double param = 1.0;

  double operator()(long k, long m, double fair) const {
    switch (kind) {
      case ShareKind::proportional_fair:
        return m > 0 ? static_cast<double>(k) / static_cast<double>(m) : 0.0;
      case ShareKind::constant:
        return param;
      case ShareKind::scaled_fair:
        return param * fair;
    }
    return 0.0;
  }
};

namespace detail {

inline double binom_pmf(long m, long k, double q) {
  return static_cast<double>(binomial(m, k)) * ipow(q, static_cast<int>(k)) *
         ipow(1.0 - q, static_cast<int>(m - k));
}

}  // namespace detail

// E[psi] under the message distribution: each of the pool's m round messages
// is the joining miner's independently with probability fair_share. Exhaustive
// over the message count for m <= 20; the proportional scheme falls back to
// its closed form beyond that.
inline double expected_share(const ShareFunction& fn, double g_i, double f_i, double m1,
                             double m2, long msg_count = 12) {
  const double q = fair_share(g_i, f_i, m1, m2);
  if (msg_count < 1) fail(Err::invalid_config, "expected_share: msg_count must be >= 1");
  if (msg_count > 20) {
    if (fn.kind == ShareKind::proportional_fair) return q;
    fail(Err::invalid_config, "expected_share: exhaustive enumeration capped at 20 messages");
  }
  double e = 0.0;
  for (long k = 0; k <= msg_count; ++k)
    e += detail::binom_pmf(msg_count, k, q) * fn(k, msg_count, q);
  return e;
}

inline bool is_fair(const ShareFunction& fn, double g_i, double f_i, double m1, double m2,
                    double tol = 1e-9, long msg_count = 12) {
  const double q = fair_share(g_i, f_i, m1, m2);
  return std::abs(expected_share(fn, g_i, f_i, m1, m2, msg_count) - q) <= tol;
}

// Sum of shares a scheme would pay across an enumerated member set when every
// member receives `multiplier` times its fair share. Anything above 1 means
// the pool pays out more than it earns.
inline double aggregate_share(double multiplier, const std::vector<double>& member_hash) {
  double total = 0.0;
  for (double h : member_hash) {
    if (!(h > 0.0)) fail(Err::invalid_config, "aggregate_share: member hash must be positive");
    total += h;
  }
  if (!(total > 0.0)) fail(Err::zero_pool_power, "ZeroPoolPower: empty member set");
  double sum = 0.0;
  for (double h : member_hash) sum += multiplier * (h / total);
  return sum;
}

}  // namespace brmlab
