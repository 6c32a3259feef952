#pragma once

// Core value types for the pool-joining game: strategy vectors on the
// (p+1)-simplex, alpha-discrete strategy grids, miner/system types and the
// full game configuration. Everything here is immutable after construction
// and safe to share across threads.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <numeric>
#include <optional>
#include <span>
#include <stdexcept>
#include <string>
#include <vector>

namespace brmlab {

inline constexpr const char* kVersion = "0.1.0";

enum class Err {
  negative_weight,
  sum_not_one,
  alpha_not_unit_fraction,
  partial_reward_too_large,
  empty_pool,
  missing_fruitchain_params,
  count_exceeds_rounds,
  zero_pool_power,
  all_costs_equal,
  zero_d_min,
  divergent_sum,
  assumption_violated,
  mismatched_config,
  schema_error,
  unknown_param,
  invalid_config,
};

class ModelError : public std::runtime_error {
 public:
  ModelError(Err code, const std::string& what)
      : std::runtime_error(what), code_(code) {}
  Err code() const noexcept { return code_; }

 private:
  Err code_;
};

[[noreturn]] inline void fail(Err code, const std::string& what) {
  throw ModelError(code, what);
}

inline constexpr double kSimplexTol = 1e-12;

namespace detail {

// Shortest round-trippable decimal form, stable across runs.
inline std::string fmt_g17(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline double ipow(double x, int n) {
  double r = 1.0;
  for (int i = 0; i < n; ++i) r *= x;
  return r;
}

inline unsigned long long binomial(long n, long k) {
  if (k < 0 || k > n) return 0;
  k = std::min(k, n - k);
  unsigned long long r = 1;
  for (long i = 1; i <= k; ++i) r = r * (unsigned long long)(n - k + i) / (unsigned long long)i;
  return r;
}

}  // namespace detail

// Hash-power split of one player. Index 0 is the solo-mining fraction, index
// i in [1,p] the fraction delegated to pool i. Weights are non-negative and
// sum to one.
class StrategyVector {
 public:
  static StrategyVector make(std::vector<double> w) {
    if (w.empty()) fail(Err::invalid_config, "strategy vector needs at least one coordinate");
    for (double x : w) {
      if (!(x >= 0.0))
        fail(Err::negative_weight, "NegativeWeight: coordinate " + detail::fmt_g17(x));
    }
    const double sum = std::accumulate(w.begin(), w.end(), 0.0);
    if (std::abs(sum - 1.0) > kSimplexTol)
      fail(Err::sum_not_one, "SumNotOne: weights sum to " + detail::fmt_g17(sum));
    return StrategyVector(std::move(w));
  }

  // Simplex vertex with all mass on `index` (0 = solo).
  static StrategyVector vertex(std::size_t pools, std::size_t index) {
    std::vector<double> w(pools + 1, 0.0);
    w.at(index) = 1.0;
    return StrategyVector(std::move(w));
  }

  double operator[](std::size_t i) const { return w_[i]; }
  double solo() const { return w_[0]; }
  std::size_t pools() const { return w_.size() - 1; }
  std::size_t size() const { return w_.size(); }
  const std::vector<double>& weights() const { return w_; }

  bool approx_equal(const StrategyVector& o, double tol = kSimplexTol) const {
    if (o.size() != size()) return false;
    for (std::size_t i = 0; i < size(); ++i)
      if (std::abs(w_[i] - o.w_[i]) > tol) return false;
    return true;
  }

  std::size_t active_count(double tol = kSimplexTol) const {
    std::size_t n = 0;
    for (double x : w_) n += (x > tol);
    return n;
  }

  std::string to_string() const {
    std::string s = "(";
    for (std::size_t i = 0; i < w_.size(); ++i) {
      if (i) s += ", ";
      s += detail::fmt_g17(w_[i]);
    }
    return s + ")";
  }

 private:
  explicit StrategyVector(std::vector<double> w) : w_(std::move(w)) {}
  std::vector<double> w_;
};

inline StrategyVector make_strategy(std::vector<double> weights) {
  return StrategyVector::make(std::move(weights));
}

// Alpha-discrete strategy space: the lattice {anchor + alpha*z} intersected
// with the simplex, so any two member strategies differ coordinate-wise by an
// integer multiple of alpha. The canonical grid is anchored at a vertex;
// anchoring at an arbitrary strategy keeps that strategy inside the space.
// Points are represented internally by exact integer unit counts over
// 1/alpha, so dominance comparisons do not drift.
class AlphaGrid {
 public:
  static AlphaGrid canonical(int pools, double alpha) {
    return AlphaGrid(StrategyVector::vertex(static_cast<std::size_t>(pools), 0), alpha);
  }

  static AlphaGrid anchored(const StrategyVector& anchor, double alpha) {
    return AlphaGrid(anchor, alpha);
  }

  long inv_alpha() const { return inv_alpha_; }
  double alpha() const { return 1.0 / static_cast<double>(inv_alpha_); }
  int pools() const { return static_cast<int>(residues_.size()) - 1; }
  long base_units() const { return base_units_; }

  // Number of lattice points: compositions of base_units_ into p+1 parts.
  std::size_t size() const {
    return static_cast<std::size_t>(
        detail::binomial(base_units_ + static_cast<long>(residues_.size()) - 1,
                         static_cast<long>(residues_.size()) - 1));
  }

  StrategyVector point(std::span<const long> units) const {
    std::vector<double> w(residues_.size());
    for (std::size_t i = 0; i < w.size(); ++i)
      w[i] = residues_[i] + static_cast<double>(units[i]) / static_cast<double>(inv_alpha_);
    return StrategyVector::make(std::move(w));
  }

  // Enumerates every grid point exactly once, in ascending lexicographic
  // order of the unit tuple (n_0, ..., n_p). fn(point, units).
  template <class Fn>
  void for_each(Fn&& fn) const {
    std::vector<long> units(residues_.size(), 0);
    enumerate_rec(0, base_units_, units, fn);
  }

  std::vector<StrategyVector> points() const {
    std::vector<StrategyVector> out;
    out.reserve(size());
    for_each([&](const StrategyVector& g, std::span<const long>) { out.push_back(g); });
    return out;
  }

  bool contains(const StrategyVector& g, double unit_tol = 1e-6) const {
    if (g.size() != residues_.size()) return false;
    long total = 0;
    for (std::size_t i = 0; i < g.size(); ++i) {
      const double t = (g[i] - residues_[i]) * static_cast<double>(inv_alpha_);
      const long n = std::lround(t);
      if (n < 0 || std::abs(t - static_cast<double>(n)) > unit_tol) return false;
      total += n;
    }
    return total == base_units_;
  }

  // Unit tuple of a member strategy; throws if g is off-lattice.
  std::vector<long> units_of(const StrategyVector& g, double unit_tol = 1e-6) const {
    if (!contains(g, unit_tol))
      fail(Err::invalid_config, "strategy is not a point of this alpha-grid");
    std::vector<long> units(g.size());
    for (std::size_t i = 0; i < g.size(); ++i)
      units[i] = std::lround((g[i] - residues_[i]) * static_cast<double>(inv_alpha_));
    return units;
  }

 private:
  AlphaGrid(const StrategyVector& anchor, double alpha) {
    if (!(alpha > 0.0) || alpha > 1.0)
      fail(Err::alpha_not_unit_fraction, "AlphaNotUnitFraction: alpha = " + detail::fmt_g17(alpha));
    const double inv = 1.0 / alpha;
    inv_alpha_ = std::lround(inv);
    if (inv_alpha_ < 1 || std::abs(inv - static_cast<double>(inv_alpha_)) > 1e-6)
      fail(Err::alpha_not_unit_fraction,
           "AlphaNotUnitFraction: 1/alpha = " + detail::fmt_g17(inv) + " is not an integer");
    residues_.resize(anchor.size());
    long whole = 0;
    for (std::size_t i = 0; i < anchor.size(); ++i) {
      const long u = static_cast<long>(std::floor(anchor[i] * static_cast<double>(inv_alpha_) + 1e-9));
      residues_[i] = std::max(0.0, anchor[i] - static_cast<double>(u) / static_cast<double>(inv_alpha_));
      whole += u;
    }
    base_units_ = whole;
  }

  template <class Fn>
  void enumerate_rec(std::size_t slot, long remaining, std::vector<long>& units, Fn& fn) const {
    if (slot + 1 == units.size()) {
      units[slot] = remaining;
      fn(point(units), std::span<const long>(units));
      return;
    }
    for (long k = 0; k <= remaining; ++k) {
      units[slot] = k;
      enumerate_rec(slot + 1, remaining - k, units, fn);
    }
  }

  long inv_alpha_ = 1;
  long base_units_ = 0;
  std::vector<double> residues_;
};

inline std::vector<StrategyVector> enumerate_grid(int pools, double alpha) {
  return AlphaGrid::canonical(pools, alpha).points();
}

// Joining miner: total hash rate M1 (queries per round) and integer risk
// tolerance rho. rho = 1 is risk-neutral, larger rho more risk-averse.
struct MinerType {
  double m1 = 1.0;
  int rho = 2;

  void validate() const {
    if (!(m1 > 0.0)) fail(Err::invalid_config, "miner hash rate must be positive");
    if (rho < 1) fail(Err::invalid_config, "risk tolerance rho must be >= 1");
  }
};

// The rest of the network: aggregate hash rate M2 split across solo miners
// and pools according to f.
struct SystemType {
  double m2 = 1.0;
  StrategyVector f = StrategyVector::vertex(1, 1);

  void validate() const {
    if (!(m2 > 0.0)) fail(Err::invalid_config, "system hash rate must be positive");
  }
};

// PoW parameters: hash width lambda and the full-block target, i.e. the count
// of winning hash values. gamma1 is the per-query success probability.
struct MiningParams {
  int lambda_bits = 30;
  double t_full = 1074.0;

  double gamma1() const { return std::ldexp(t_full, -lambda_bits); }

  void validate() const {
    if (lambda_bits < 1 || lambda_bits > 62)
      fail(Err::invalid_config, "lambda_bits out of range");
    if (!(t_full > 0.0) || !(t_full < std::ldexp(1.0, lambda_bits)))
      fail(Err::invalid_config, "t_full must satisfy 0 < t_full < 2^lambda");
  }
};

// Partial-block mechanism parameters. Reward parity ties the per-round payout
// to the plain block reward: r_block = r_full + (t_partial/t_full)*r_partial.
struct FruitchainParams {
  double t_partial = 107400.0;
  double r_full = 0.5;
  double r_partial = 0.005;
  long z = 1;

  double gamma2(const MiningParams& mining) const {
    return std::ldexp(t_partial, -mining.lambda_bits);
  }
  double target_ratio(const MiningParams& mining) const { return t_partial / mining.t_full; }

  void validate(const MiningParams& mining, double r_block) const {
    if (!(t_partial > mining.t_full))
      fail(Err::invalid_config, "t_partial must exceed t_full");
    if (!(t_partial < std::ldexp(1.0, mining.lambda_bits)))
      fail(Err::invalid_config, "t_partial must be below 2^lambda");
    if (!(r_full > 0.0) || r_partial < 0.0)
      fail(Err::invalid_config, "fruitchain rewards must be positive");
    if (z < 1) fail(Err::invalid_config, "confirmation window z must be >= 1");
    const double parity = r_full + (t_partial / mining.t_full) * r_partial;
    if (std::abs(parity - r_block) > 1e-9)
      fail(Err::invalid_config, "reward parity violated: r_full + ratio*r_partial = " +
                                    detail::fmt_g17(parity) + " != r_block");
  }
};

// Completes the parameter block from the parity equation:
// r_full = r_block - (t_partial/t_full)*r_partial.
inline FruitchainParams parity_complete(double r_block, double t_full, double t_partial,
                                        double r_partial, long z = 1) {
  if (!(r_block > 0.0) || !(t_full > 0.0) || !(t_partial > t_full) || !(r_partial > 0.0))
    fail(Err::invalid_config, "parity_complete: arguments must be positive with t_partial > t_full");
  const double ratio = t_partial / t_full;
  const double r_full = r_block - ratio * r_partial;
  if (!(r_full > 0.0))
    fail(Err::partial_reward_too_large,
         "PartialRewardTooLarge: derived r_full = " + detail::fmt_g17(r_full));
  FruitchainParams p;
  p.t_partial = t_partial;
  p.r_full = r_full;
  p.r_partial = r_partial;
  p.z = z;
  return p;
}

enum class ApproxMode { exact, assumption1 };

inline const char* to_string(ApproxMode m) {
  return m == ApproxMode::exact ? "exact" : "assumption1";
}

// Every scalar of one game instance. a/b/c weigh expected reward, risk and
// switching cost in the per-round utility; delta discounts across rounds.
struct GameConfig {
  double a = 1.0;
  double b = 1.0;
  double c = 0.0;
  double delta = 0.99;
  double r_block = 1.0;
  double alpha = 0.1;
  MinerType miner;
  SystemType system;
  MiningParams mining;
  std::optional<FruitchainParams> fruitchain;
  ApproxMode mode = ApproxMode::assumption1;
  double assumption_ratio = 1e-3;

  int pools() const { return static_cast<int>(system.f.pools()); }
  double ratio() const { return miner.m1 / system.m2; }

  // Probability mass scale of the joining miner: M1/M2 under the small-miner
  // approximation, M1/(M1+M2) exactly.
  double sigma() const {
    return mode == ApproxMode::assumption1 ? miner.m1 / system.m2
                                           : miner.m1 / (miner.m1 + system.m2);
  }

  double gamma1() const { return mining.gamma1(); }
  double gamma2() const {
    return fruit().gamma2(mining);
  }

  const FruitchainParams& fruit() const {
    if (!fruitchain)
      fail(Err::missing_fruitchain_params, "MissingFruitchainParams: config has no fruitchain block");
    return *fruitchain;
  }

  void validate() const {
    if (a < 0.0 || b < 0.0 || c < 0.0)
      fail(Err::invalid_config, "utility coefficients a, b, c must be non-negative");
    if (delta < 0.0 || delta > 1.0) fail(Err::invalid_config, "delta must lie in [0,1]");
    if (!(r_block > 0.0)) fail(Err::invalid_config, "r_block must be positive");
    miner.validate();
    system.validate();
    mining.validate();
    if (fruitchain) fruitchain->validate(mining, r_block);
    if (mode == ApproxMode::assumption1 && ratio() > assumption_ratio * (1.0 + 1e-12))
      fail(Err::assumption_violated,
           "AssumptionViolated: M1/M2 = " + detail::fmt_g17(ratio()) +
               " exceeds assumption_ratio " + detail::fmt_g17(assumption_ratio));
  }
};

}  // namespace brmlab
