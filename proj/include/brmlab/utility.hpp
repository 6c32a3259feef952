#pragma once

// Risk-adjusted utility of the joining miner: per-round breakdown
// a*E[R] - b*(E[R^rho])^(1/rho) - c*D(g) and its discounted sum across
// rounds.

#include <cmath>

#include "brmlab/brm.hpp"
#include "brmlab/core.hpp"
#include "brmlab/switch_cost.hpp"

namespace brmlab {

inline double moment(const RewardDistribution& dist, int rho) { return dist.moment(rho); }

struct UtilityBreakdown {
  double expected_reward = 0.0;
  double risk = 0.0;
  double switch_cost = 0.0;
  double utility = 0.0;

  static UtilityBreakdown assemble(const GameConfig& cfg, double expected, double risk,
                                   double switch_cost) {
    UtilityBreakdown u;
    u.expected_reward = expected;
    u.risk = risk;
    u.switch_cost = switch_cost;
    u.utility = cfg.a * expected - cfg.b * risk - cfg.c * switch_cost;
    return u;
  }
};

template <class CostFn>
UtilityBreakdown round_utility(const GameConfig& cfg, const StrategyVector& g, const BrmKind& brm,
                               const CostFn& d_fn) {
  const double d = eval_cost(d_fn, g);
  switch (brm.kind) {
    case Brm::memoryless: {
      const RewardDistribution dist = memoryless_distribution(cfg, g);
      return UtilityBreakdown::assemble(cfg, dist.mean(), dist.risk(cfg.miner.rho), d);
    }
    case Brm::fruitchain: {
      const RewardDistribution dist = fruitchain_distribution(cfg, g);
      return UtilityBreakdown::assemble(cfg, dist.mean(), dist.risk(cfg.miner.rho), d);
    }
    case Brm::decentbrm: {
      const Moments m = decentbrm_moments(cfg, g);
      return UtilityBreakdown::assemble(cfg, m.mean, m.risk, d);
    }
  }
  fail(Err::invalid_config, "unknown BRM");
}

struct Horizon {
  bool infinite = true;
  long rounds = 0;

  static Horizon forever() { return {true, 0}; }
  static Horizon finite(long r) { return {false, r}; }
};

// Discounted utility across rounds. Stationary mechanisms close the geometric
// series; the history-sharing mechanism is summed round by round because its
// reward ramps with the accrued fraction t/(warmup+t) after joining.
template <class CostFn>
double discounted_utility(const GameConfig& cfg, const StrategyVector& g, const BrmKind& brm,
                          const CostFn& d_fn, Horizon horizon = Horizon::forever()) {
  const double delta = cfg.delta;
  if (brm.kind == Brm::decentbrm) {
    const Moments m = decentbrm_moments(cfg, g);
    const double d = eval_cost(d_fn, g);
    const double reward_part = cfg.a * m.mean - cfg.b * m.risk;
    const double cost_part = -cfg.c * d;
    if (horizon.infinite && delta >= 1.0)
      fail(Err::divergent_sum, "DivergentSum: delta = 1 with infinite horizon");
    double acc = 0.0, w = 1.0;
    const long warmup = std::max<long>(brm.warmup_rounds, 0);
    for (long t = 1;; ++t) {
      if (!horizon.infinite && t > horizon.rounds) break;
      const double ramp = static_cast<double>(t) / static_cast<double>(warmup + t);
      acc += w * (reward_part * ramp + cost_part);
      w *= delta;
      if (horizon.infinite) {
        const double tail = w / (1.0 - delta) * (std::abs(reward_part) + std::abs(cost_part));
        if (tail < 1e-15 * (std::abs(acc) + 1e-300)) break;
        if (t > 100'000'000)
          fail(Err::divergent_sum, "DivergentSum: discount too close to 1 to sum explicitly");
      }
    }
    return acc;
  }
  const double u = round_utility(cfg, g, brm, d_fn).utility;
  if (horizon.infinite) {
    if (delta >= 1.0) {
      if (u == 0.0) return 0.0;
      fail(Err::divergent_sum, "DivergentSum: delta = 1 with infinite horizon and u != 0");
    }
    return u / (1.0 - delta);
  }
  if (horizon.rounds < 0) fail(Err::invalid_config, "finite horizon must be >= 0");
  if (delta == 1.0) return u * static_cast<double>(horizon.rounds);
  return u * (1.0 - std::pow(delta, static_cast<double>(horizon.rounds))) / (1.0 - delta);
}

}  // namespace brmlab
