#pragma once

// Block reward mechanisms as finite per-round (or per-query) reward
// distributions for the joining miner, plus the closed-form moments used by
// the history-sharing mechanism. The exact mode keeps full denominators
// M1+M2; assumption1 mode uses the small-miner forms with probabilities
// g0*M1/M2 for solo, f_i per pool and f_0 for the rest.

#include <algorithm>
#include <cmath>
#include <optional>
#include <string>
#include <vector>

#include "brmlab/core.hpp"
#include "brmlab/sharing.hpp"

namespace brmlab {

// Finite discrete distribution of the miner's reward in one round/query.
class RewardDistribution {
 public:
  struct Atom {
    double value = 0.0;
    double prob = 0.0;
  };

  static RewardDistribution make(std::vector<Atom> atoms) {
    std::sort(atoms.begin(), atoms.end(),
              [](const Atom& a, const Atom& b) { return a.value < b.value; });
    std::vector<Atom> merged;
    for (const Atom& a : atoms) {
      if (a.value < 0.0)
        fail(Err::invalid_config, "reward atoms must be non-negative");
      if (a.prob < -1e-15)
        fail(Err::invalid_config, "atom probability is negative: " + detail::fmt_g17(a.prob));
      const double p = std::max(0.0, a.prob);
      if (!merged.empty() &&
          std::abs(merged.back().value - a.value) <= 1e-15 * std::max(1.0, a.value)) {
        merged.back().prob += p;
      } else {
        merged.push_back({a.value, p});
      }
    }
    double total = 0.0;
    for (const Atom& a : merged) total += a.prob;
    if (std::abs(total - 1.0) > kSimplexTol)
      fail(Err::invalid_config,
           "atom probabilities sum to " + detail::fmt_g17(total) + ", expected 1");
    return RewardDistribution(std::move(merged));
  }

  const std::vector<Atom>& atoms() const { return atoms_; }

  double moment(int rho) const {
    if (rho < 1) fail(Err::invalid_config, "moment order must be >= 1");
    double m = 0.0;
    for (const Atom& a : atoms_) m += a.prob * detail::ipow(a.value, rho);
    return m;
  }

  double mean() const { return moment(1); }
  double risk(int rho) const { return std::pow(moment(rho), 1.0 / rho); }

 private:
  explicit RewardDistribution(std::vector<Atom> atoms) : atoms_(std::move(atoms)) {}
  std::vector<Atom> atoms_;
};

enum class Brm { memoryless, fruitchain, decentbrm };

inline const char* to_string(Brm b) {
  switch (b) {
    case Brm::memoryless: return "memoryless";
    case Brm::fruitchain: return "fruitchain";
    case Brm::decentbrm: return "decentbrm";
  }
  return "?";
}

// Mechanism selector. warmup_rounds only matters for the history-sharing
// mechanism: the chain length after which the miner's accrued blocks are
// taken at their expectation.
struct BrmKind {
  Brm kind = Brm::memoryless;
  long warmup_rounds = 1000;

  static BrmKind memoryless() { return {Brm::memoryless, 0}; }
  static BrmKind fruitchain() { return {Brm::fruitchain, 0}; }
  static BrmKind decentbrm(long warmup = 1000) { return {Brm::decentbrm, warmup}; }
};

struct RoundHistory {
  long rounds = 0;
  long p1_blocks = 0;
};

inline double memoryless_reward(bool winner_is_p1, double r_block) {
  return winner_is_p1 ? r_block : 0.0;
}

// History-taking overload; the history argument is deliberately unused.
inline double memoryless_reward(bool winner_is_p1, double r_block, const RoundHistory&) {
  return memoryless_reward(winner_is_p1, r_block);
}

// Equal split of every block reward across all historical block miners:
// the miner's round-k income is r_block * (its blocks among the first k) / k.
inline double decentbrm_reward(long k, long blocks_by_p1, double r_block) {
  if (k < 1) fail(Err::invalid_config, "decentbrm_reward: round index must be >= 1");
  if (blocks_by_p1 < 0 || blocks_by_p1 > k)
    fail(Err::count_exceeds_rounds,
         "CountExceedsRounds: " + std::to_string(blocks_by_p1) + " blocks in " +
             std::to_string(k) + " rounds");
  return static_cast<double>(blocks_by_p1) * r_block / static_cast<double>(k);
}

// One allocation channel of the joining miner: its probability mass of
// winning a round and the miner's share of the channel's reward.
struct Channel {
  double mass = 0.0;   // probability the round's block comes out of this channel
  double share = 1.0;  // miner's fraction of the channel reward
  int pool = -1;       // -1 = solo
};

namespace detail {

inline std::vector<Channel> channels(const GameConfig& cfg, const StrategyVector& g,
                                     ApproxMode mode,
                                     const std::vector<double>& share_scale = {}) {
  if (g.pools() != static_cast<std::size_t>(cfg.pools()))
    fail(Err::mismatched_config, "MismatchedConfig: strategy has " + std::to_string(g.pools()) +
                                     " pools, config has " + std::to_string(cfg.pools()));
  if (!share_scale.empty() && share_scale.size() != g.pools())
    fail(Err::mismatched_config, "MismatchedConfig: share_scale size mismatch");
  const double m1 = cfg.miner.m1, m2 = cfg.system.m2;
  const StrategyVector& f = cfg.system.f;
  std::vector<Channel> out;
  out.reserve(g.size());
  if (g.solo() > 0.0) {
    const double mass = mode == ApproxMode::assumption1 ? g.solo() * m1 / m2
                                                        : g.solo() * m1 / (m1 + m2);
    out.push_back({mass, 1.0, -1});
  }
  for (std::size_t i = 1; i < g.size(); ++i) {
    const double gi = g[i], fi = f[i];
    if (fi <= 0.0) {
      if (gi > 0.0)
        fail(Err::empty_pool, "EmptyPool: pool " + std::to_string(i) +
                                  " has no system hash rate but g_i > 0");
      continue;
    }
    if (gi <= 0.0) continue;
    const double scale = share_scale.empty() ? 1.0 : share_scale[i - 1];
    const double mass = mode == ApproxMode::assumption1 ? fi : (gi * m1 + fi * m2) / (m1 + m2);
    const double share =
        (mode == ApproxMode::assumption1 ? gi * m1 / (fi * m2) : fair_share(gi, fi, m1, m2)) *
        scale;
    out.push_back({mass, share, static_cast<int>(i) - 1});
  }
  return out;
}

// assumption1 probabilities overcount by g0*M1/M2 when there is no idle solo
// mass f0 to absorb it; shave the pool masses so the distribution stays
// normalized. Pool atoms carry O(sigma^rho) moment weight, so the shave is
// far below every comparison tolerance in use.
inline double zero_remainder_a1(const GameConfig& cfg, const StrategyVector& g,
                                std::vector<Channel>& ch) {
  double solo_mass = 0.0, pool_mass = 0.0;
  for (const Channel& c : ch) (c.pool < 0 ? solo_mass : pool_mass) += c.mass;
  double idle = 0.0;
  const StrategyVector& f = cfg.system.f;
  idle += f[0];
  for (std::size_t i = 1; i < f.size(); ++i)
    if (f[i] > 0.0 && g[i] <= 0.0) idle += f[i];
  double rest = idle - solo_mass;
  if (rest < 0.0 && pool_mass > 0.0) {
    const double keep = (pool_mass + rest) / pool_mass;
    for (Channel& c : ch)
      if (c.pool >= 0) c.mass *= keep;
    rest = 0.0;
  }
  return std::max(0.0, rest);
}

}  // namespace detail

// Per-round reward distribution under the plain fixed-block-reward mechanism
// with fair sharing: the miner earns r_block on a solo win and its fair share
// of r_block when one of its pools wins.
inline RewardDistribution memoryless_distribution(const GameConfig& cfg, const StrategyVector& g,
                                                  const std::vector<double>& share_scale = {}) {
  std::vector<Channel> ch = detail::channels(cfg, g, cfg.mode, share_scale);
  double rest;
  if (cfg.mode == ApproxMode::assumption1) {
    rest = detail::zero_remainder_a1(cfg, g, ch);
  } else {
    double nonzero = 0.0;
    for (const Channel& c : ch) nonzero += c.mass;
    rest = 1.0 - nonzero;
  }
  std::vector<RewardDistribution::Atom> atoms;
  for (const Channel& c : ch) atoms.push_back({cfg.r_block * c.share, c.mass});
  atoms.push_back({0.0, rest});
  return RewardDistribution::make(std::move(atoms));
}

// Per-query reward distribution under the partial-block mechanism. A query
// wins a full block with probability gamma1 and a partial block with
// probability gamma2. Exact mode: the query belongs to a channel with the
// channel's hash mass and the miner takes its fair share of the win.
// assumption1 mode follows the small-miner closed forms: the solo channel
// collects the full r_full/r_partial at mass g0*M1/M2, and a pooled unit of
// hash power earns the miner's absolute share g_i*M1/M2 of each win at the
// raw per-query rates, which is what makes all-in-pool risk
// (gamma1*r_full^rho + gamma2*r_partial^rho)^(1/rho) * M1/M2.
inline RewardDistribution fruitchain_distribution(const GameConfig& cfg, const StrategyVector& g,
                                                  const std::vector<double>& share_scale = {}) {
  const FruitchainParams& fp = cfg.fruit();
  const double g1 = cfg.gamma1(), g2 = cfg.gamma2();
  std::vector<Channel> ch = detail::channels(cfg, g, cfg.mode, share_scale);
  std::vector<RewardDistribution::Atom> atoms;
  double nonzero = 0.0;
  for (const Channel& c : ch) {
    if (cfg.mode == ApproxMode::assumption1 && c.pool >= 0) {
      const double w = c.share * c.mass;  // = g_i*M1/M2 (times any share scale)
      atoms.push_back({fp.r_full * w, g1});
      atoms.push_back({fp.r_partial * w, g2});
      nonzero += g1 + g2;
    } else {
      atoms.push_back({fp.r_full * c.share, g1 * c.mass});
      atoms.push_back({fp.r_partial * c.share, g2 * c.mass});
      nonzero += (g1 + g2) * c.mass;
    }
  }
  if (nonzero > 1.0)
    fail(Err::invalid_config, "per-query win probabilities exceed 1; targets too easy");
  atoms.push_back({0.0, 1.0 - nonzero});
  return RewardDistribution::make(std::move(atoms));
}

struct Moments {
  double mean = 0.0;
  double moment_rho = 0.0;
  double risk = 0.0;
  int rho = 1;
};

// Closed-form per-round moments of the history-sharing mechanism under the
// small-miner approximation. Every channel pays the stationary expectation
// r_block*M1/M2; the solo channel carries risk factor (M1/M2)^(1/rho) and the
// pooled channels (sum_j f_j g_j^rho)^(1/rho).
inline Moments decentbrm_moments(const GameConfig& cfg, const StrategyVector& g,
                                 std::optional<int> rho_override = std::nullopt) {
  if (cfg.mode != ApproxMode::assumption1)
    fail(Err::invalid_config, "decentbrm closed forms are defined in assumption1 mode");
  if (g.pools() != static_cast<std::size_t>(cfg.pools()))
    fail(Err::mismatched_config, "MismatchedConfig: strategy/config pool mismatch");
  const int rho = rho_override.value_or(cfg.miner.rho);
  if (rho < 1) fail(Err::invalid_config, "rho must be >= 1");
  const double sigma = cfg.miner.m1 / cfg.system.m2;
  const StrategyVector& f = cfg.system.f;
  double pooled = 0.0;
  for (std::size_t j = 1; j < g.size(); ++j) {
    if (f[j] <= 0.0 && g[j] > 0.0)
      fail(Err::empty_pool, "EmptyPool: pool " + std::to_string(j) + " is empty");
    pooled += f[j] * detail::ipow(g[j], rho);
  }
  Moments m;
  m.rho = rho;
  m.mean = cfg.r_block * sigma;
  m.moment_rho = detail::ipow(cfg.r_block * sigma, rho) *
                 (detail::ipow(g.solo(), rho) * sigma + pooled);
  m.risk = std::pow(m.moment_rho, 1.0 / rho);
  return m;
}

// Per-query solo risk scales. The hash-share factors cancel in the ratio, so
// these are the natural units for comparing mechanisms.
inline double memoryless_query_risk(const GameConfig& cfg, int rho) {
  if (rho < 1) fail(Err::invalid_config, "rho must be >= 1");
  return std::pow(cfg.gamma1(), 1.0 / rho) * cfg.r_block;
}

inline double fruitchain_query_risk(const GameConfig& cfg, int rho) {
  if (rho < 1) fail(Err::invalid_config, "rho must be >= 1");
  const FruitchainParams& fp = cfg.fruit();
  return std::pow(cfg.gamma1() * detail::ipow(fp.r_full, rho) +
                      cfg.gamma2() * detail::ipow(fp.r_partial, rho),
                  1.0 / rho);
}

inline double fruitchain_risk_ratio(const GameConfig& cfg, int rho) {
  return fruitchain_query_risk(cfg, rho) / memoryless_query_risk(cfg, rho);
}

}  // namespace brmlab
