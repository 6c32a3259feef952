#pragma once

// Round-level Monte Carlo oracle. Each round one full block is mined; the
// winning channel is drawn categorically with the exact hash-mass
// probabilities, partial blocks arrive as per-channel Poisson counts with the
// per-query rate folded to per-round scale, and the history-sharing mechanism
// accrues block credits. Runs are reproducible: a named counter-style
// generator (splitmix64), explicit sub-seeds per replica and compensated
// summation make parallel and serial aggregation identical.

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <future>
#include <limits>
#include <string>
#include <vector>

#include "brmlab/brm.hpp"
#include "brmlab/core.hpp"

namespace brmlab {

struct SplitMix64 {
  std::uint64_t state = 0;

  explicit SplitMix64(std::uint64_t seed = 0) : state(seed) {}

  std::uint64_t next() {
    state += 0x9E3779B97F4A7C15ULL;
    std::uint64_t z = state;
    z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
    z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
    return z ^ (z >> 31);
  }

  // Uniform in [0, 1) with 53 random bits.
  double next_double() { return static_cast<double>(next() >> 11) * 0x1.0p-53; }
};

inline std::uint64_t substream_seed(std::uint64_t seed, std::uint64_t index) {
  SplitMix64 g(seed);
  std::uint64_t s = 0;
  for (std::uint64_t i = 0; i <= index; ++i) s = g.next();
  return s;
}

namespace detail {

inline long poisson_knuth(SplitMix64& rng, double lambda) {
  const double limit = std::exp(-lambda);
  long k = 0;
  double p = 1.0;
  do {
    ++k;
    p *= rng.next_double();
  } while (p > limit);
  return k - 1;
}

// Hormann's PTRS transformed rejection, valid for lambda >= 10.
inline long poisson_ptrs(SplitMix64& rng, double lambda) {
  const double slam = std::sqrt(lambda);
  const double loglam = std::log(lambda);
  const double b = 0.931 + 2.53 * slam;
  const double a = -0.059 + 0.02483 * b;
  const double inv_alpha = 1.1239 + 1.1328 / (b - 3.4);
  const double v_r = 0.9277 - 3.6224 / (b - 2.0);
  while (true) {
    const double u = rng.next_double() - 0.5;
    const double v = rng.next_double();
    const double us = 0.5 - std::abs(u);
    const long k = static_cast<long>(std::floor((2.0 * a / us + b) * u + lambda + 0.43));
    if (us >= 0.07 && v <= v_r) return k;
    if (k < 0 || (us < 0.013 && v > us)) continue;
    if (std::log(v) + std::log(inv_alpha) - std::log(a / (us * us) + b) <=
        static_cast<double>(k) * loglam - lambda - std::lgamma(static_cast<double>(k) + 1.0))
      return k;
  }
}

inline long poisson(SplitMix64& rng, double lambda) {
  if (lambda <= 0.0) return 0;
  return lambda < 10.0 ? poisson_knuth(rng, lambda) : poisson_ptrs(rng, lambda);
}

struct Kahan {
  double sum = 0.0, comp = 0.0;

  void add(double x) {
    const double y = x - comp;
    const double t = sum + y;
    comp = (t - sum) - y;
    sum = t;
  }
};

inline unsigned long long stirling2(int n, int k) {
  if (k == 0) return n == 0 ? 1ULL : 0ULL;
  if (k > n) return 0;
  std::vector<std::vector<unsigned long long>> s(n + 1, std::vector<unsigned long long>(k + 1, 0));
  s[0][0] = 1;
  for (int i = 1; i <= n; ++i)
    for (int j = 1; j <= std::min(i, k); ++j)
      s[i][j] = static_cast<unsigned long long>(j) * s[i - 1][j] + s[i - 1][j - 1];
  return s[n][k];
}

// Raw Poisson moment E[N^m] via Touchard's formula.
inline double poisson_raw_moment(double lambda, int m) {
  double acc = 0.0;
  for (int i = 1; i <= m; ++i)
    acc += static_cast<double>(stirling2(m, i)) * ipow(lambda, i);
  return m == 0 ? 1.0 : acc;
}

}  // namespace detail

enum class RecordGranularity { aggregate, per_round };

struct SimConfig {
  long rounds = 1'000'000;
  std::uint64_t seed = 1;
  RecordGranularity granularity = RecordGranularity::aggregate;
  BrmKind brm = BrmKind::memoryless();
  std::vector<int> rho_list = {2};
  int replicas = 1;
  bool parallel = false;

  void validate() const {
    if (rounds < 1) fail(Err::invalid_config, "simulation needs at least one round");
    if (replicas < 1) fail(Err::invalid_config, "replicas must be >= 1");
    for (int r : rho_list)
      if (r < 1) fail(Err::invalid_config, "rho entries must be >= 1");
  }
};

struct MomentEstimate {
  int rho = 1;
  double value = 0.0;
  double std_error = 0.0;
};

struct SimResult {
  long rounds = 0;
  std::uint64_t seed = 0;
  int replicas = 1;
  std::string rng_name = "splitmix64";
  double empirical_mean = 0.0;
  double mean_std_error = 0.0;
  std::vector<MomentEstimate> rho_moments;  // E[R^rho] with standard errors
  std::vector<double> reward_trace;

  const MomentEstimate& moment(int rho) const {
    for (const MomentEstimate& m : rho_moments)
      if (m.rho == rho) return m;
    fail(Err::mismatched_config, "MismatchedConfig: moment rho=" + std::to_string(rho) +
                                     " was not recorded");
  }

  double risk(int rho) const { return std::pow(moment(rho).value, 1.0 / rho); }

  // Delta method: se(m^(1/rho)) = se(m) * m^(1/rho) / (rho * m).
  double risk_std_error(int rho) const {
    const MomentEstimate& m = moment(rho);
    if (m.value <= 0.0) return 0.0;
    return m.std_error * std::pow(m.value, 1.0 / rho) / (rho * m.value);
  }
};

namespace detail {

struct ReplicaAgg {
  long n = 0;
  std::vector<double> moment_mean;     // per rho entry: mean of R^rho
  std::vector<double> moment_sq_mean;  // per rho entry: mean of R^(2rho)
};

template <class RewardFn>
ReplicaAgg run_rounds(long rounds, const std::vector<int>& rhos, RewardFn&& reward_of_round,
                      std::vector<double>* trace) {
  std::vector<Kahan> sums(rhos.size()), sq_sums(rhos.size());
  for (long t = 1; t <= rounds; ++t) {
    const double r = reward_of_round(t);
    if (trace) trace->push_back(r);
    for (std::size_t i = 0; i < rhos.size(); ++i) {
      const double m = ipow(r, rhos[i]);
      sums[i].add(m);
      sq_sums[i].add(m * m);
    }
  }
  ReplicaAgg agg;
  agg.n = rounds;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    agg.moment_mean.push_back(sums[i].sum / static_cast<double>(rounds));
    agg.moment_sq_mean.push_back(sq_sums[i].sum / static_cast<double>(rounds));
  }
  return agg;
}

inline ReplicaAgg simulate_replica(const GameConfig& cfg, const SimConfig& sim,
                                   const StrategyVector& g, const std::vector<int>& rhos,
                                   std::uint64_t seed, long rounds, std::vector<double>* trace) {
  const std::vector<Channel> ch = channels(cfg, g, ApproxMode::exact);
  SplitMix64 rng(seed);
  const double r_block = cfg.r_block;

  const auto winner_share = [&]() -> double {
    double u = rng.next_double();
    for (const Channel& c : ch) {
      if (u < c.mass) return c.share;
      u -= c.mass;
    }
    return -1.0;  // someone else's block
  };

  switch (sim.brm.kind) {
    case Brm::memoryless:
      return run_rounds(
          rounds, rhos,
          [&](long) {
            const double s = winner_share();
            return s > 0.0 ? r_block * s : 0.0;
          },
          trace);
    case Brm::fruitchain: {
      const FruitchainParams& fp = cfg.fruit();
      const double tau = fp.target_ratio(cfg.mining);
      const long z = std::max<long>(1, fp.z);
      std::vector<double> delay(static_cast<std::size_t>(z) + 1, 0.0);
      return run_rounds(
          rounds, rhos,
          [&](long t) {
            const std::size_t slot = static_cast<std::size_t>(t % (z + 1));
            double reward = delay[slot];
            delay[slot] = 0.0;
            const double s = winner_share();
            if (s > 0.0) reward += fp.r_full * s;
            double partial = 0.0;
            for (const Channel& c : ch)
              partial += fp.r_partial * c.share *
                         static_cast<double>(poisson(rng, tau * c.mass));
            delay[static_cast<std::size_t>((t + z) % (z + 1))] += partial;
            return reward;
          },
          trace);
    }
    case Brm::decentbrm: {
      const long warmup = std::max<long>(1, sim.brm.warmup_rounds);
      double s1 = 0.0;
      for (const Channel& c : ch) s1 += c.mass * c.share;
      double accrued = s1 * static_cast<double>(warmup);  // expectation at warmup
      return run_rounds(
          rounds, rhos,
          [&](long t) {
            const double s = winner_share();
            if (s > 0.0) accrued += s;
            return r_block * accrued / static_cast<double>(warmup + t);
          },
          trace);
    }
  }
  fail(Err::invalid_config, "unknown BRM");
}

}  // namespace detail

inline SimResult simulate(const GameConfig& cfg, const SimConfig& sim, const StrategyVector& g) {
  sim.validate();
  std::vector<int> rhos = {1};
  for (int r : sim.rho_list)
    if (r != 1) rhos.push_back(r);

  const int replicas = sim.replicas;
  std::vector<long> rounds_of(replicas, sim.rounds / replicas);
  for (int r = 0; r < static_cast<int>(sim.rounds % replicas); ++r) ++rounds_of[r];

  std::vector<detail::ReplicaAgg> aggs(replicas);
  std::vector<std::vector<double>> traces(replicas);
  const bool want_trace = sim.granularity == RecordGranularity::per_round;
  const auto run_one = [&](int r) {
    std::vector<double>* trace = want_trace ? &traces[r] : nullptr;
    aggs[r] = detail::simulate_replica(cfg, sim, g, rhos, substream_seed(sim.seed, r),
                                       rounds_of[r], trace);
  };
  if (sim.parallel && replicas > 1) {
    std::vector<std::future<void>> jobs;
    for (int r = 0; r < replicas; ++r) jobs.push_back(std::async(std::launch::async, run_one, r));
    for (auto& j : jobs) j.get();
  } else {
    for (int r = 0; r < replicas; ++r) run_one(r);
  }

  SimResult out;
  out.rounds = sim.rounds;
  out.seed = sim.seed;
  out.replicas = replicas;
  if (want_trace)
    for (const auto& t : traces) out.reward_trace.insert(out.reward_trace.end(), t.begin(), t.end());

  const long n = sim.rounds;
  for (std::size_t i = 0; i < rhos.size(); ++i) {
    double value, se;
    if (replicas == 1) {
      value = aggs[0].moment_mean[i];
      const double var = std::max(0.0, aggs[0].moment_sq_mean[i] - value * value);
      se = std::sqrt(var / static_cast<double>(n));
    } else {
      // Replica means are independent; their spread gives the standard error.
      // This also covers the history-sharing mechanism, whose per-round
      // rewards are autocorrelated within a replica.
      detail::Kahan mean_acc, sq_acc;
      for (const auto& a : aggs) mean_acc.add(a.moment_mean[i]);
      value = mean_acc.sum / replicas;
      for (const auto& a : aggs) {
        const double d = a.moment_mean[i] - value;
        sq_acc.add(d * d);
      }
      se = std::sqrt(sq_acc.sum / (replicas - 1) / replicas);
    }
    if (rhos[i] == 1) {
      out.empirical_mean = value;
      out.mean_std_error = se;
    }
    out.rho_moments.push_back({rhos[i], value, se});
  }
  return out;
}

// ---- Closed-form per-round moments matching the simulator's model ----------

// E[R^rho] under the plain mechanism: sum over channels of mass*(r*share)^rho.
inline double memoryless_round_moment(const GameConfig& cfg, const StrategyVector& g, int rho) {
  const std::vector<Channel> ch = detail::channels(cfg, g, ApproxMode::exact);
  double m = 0.0;
  for (const Channel& c : ch) m += c.mass * detail::ipow(cfg.r_block * c.share, rho);
  return m;
}

inline double fruitchain_round_mean(const GameConfig& cfg, const StrategyVector& g) {
  const FruitchainParams& fp = cfg.fruit();
  const std::vector<Channel> ch = detail::channels(cfg, g, ApproxMode::exact);
  double s1 = 0.0;
  for (const Channel& c : ch) s1 += c.mass * c.share;
  return (fp.r_full + fp.target_ratio(cfg.mining) * fp.r_partial) * s1;
}

// Second moment of full-win plus independent Poisson partial counts.
inline double fruitchain_round_moment2(const GameConfig& cfg, const StrategyVector& g) {
  const FruitchainParams& fp = cfg.fruit();
  const double tau = fp.target_ratio(cfg.mining);
  const std::vector<Channel> ch = detail::channels(cfg, g, ApproxMode::exact);
  double s1 = 0.0, s2 = 0.0;
  for (const Channel& c : ch) {
    s1 += c.mass * c.share;
    s2 += c.mass * c.share * c.share;
  }
  return s2 * (fp.r_full * fp.r_full + tau * fp.r_partial * fp.r_partial) +
         s1 * s1 * (2.0 * fp.r_full * fp.r_partial * tau + fp.r_partial * fp.r_partial * tau * tau);
}

// Any-order per-round moment for a solo-only miner under the partial-block
// mechanism: R = r_full*B + r_partial*N with B Bernoulli and N Poisson.
inline double fruitchain_solo_round_moment(const GameConfig& cfg, int rho) {
  const FruitchainParams& fp = cfg.fruit();
  const double tau = fp.target_ratio(cfg.mining);
  const double w0 = cfg.miner.m1 / (cfg.miner.m1 + cfg.system.m2);
  const double lambda = tau * w0;
  double acc = 0.0;
  for (int j = 0; j <= rho; ++j) {
    const double eb = j == 0 ? 1.0 : w0;
    const double en = detail::poisson_raw_moment(lambda, rho - j);
    acc += static_cast<double>(detail::binomial(rho, j)) * detail::ipow(fp.r_full, j) *
           detail::ipow(fp.r_partial, rho - j) * eb * en;
  }
  return acc;
}

inline double decentbrm_round_mean(const GameConfig& cfg, const StrategyVector& g) {
  const std::vector<Channel> ch = detail::channels(cfg, g, ApproxMode::exact);
  double s1 = 0.0;
  for (const Channel& c : ch) s1 += c.mass * c.share;
  return cfg.r_block * s1;
}

// Expected run-averaged second moment of the accrual process over
// `rounds` rounds following expectation-initialized warmup.
inline double decentbrm_round_moment2(const GameConfig& cfg, const StrategyVector& g, long warmup,
                                      long rounds) {
  const std::vector<Channel> ch = detail::channels(cfg, g, ApproxMode::exact);
  double s1 = 0.0, s2 = 0.0;
  for (const Channel& c : ch) {
    s1 += c.mass * c.share;
    s2 += c.mass * c.share * c.share;
  }
  const double v = std::max(0.0, s2 - s1 * s1);
  detail::Kahan acc;
  for (long t = 1; t <= rounds; ++t) {
    const double k = static_cast<double>(warmup + t);
    acc.add(s1 * s1 + v * static_cast<double>(t) / (k * k));
  }
  return cfg.r_block * cfg.r_block * acc.sum / static_cast<double>(rounds);
}

// ---- Empirical vs analytic comparison --------------------------------------

struct AnalyticMoment {
  std::string name;
  int rho = 1;  // 1 compares the mean
  double value = 0.0;
};

struct CompareRow {
  std::string name;
  int rho = 1;
  double analytic = 0.0;
  double empirical = 0.0;
  double std_error = 0.0;
  double z = 0.0;
  bool pass = false;
};

struct CompareReport {
  double z_limit = 5.0;
  std::vector<CompareRow> rows;
  bool all_pass = true;
};

inline CompareReport compare_with_analytic(const SimResult& sim,
                                           const std::vector<AnalyticMoment>& analytic,
                                           double z_limit = 5.0) {
  if (sim.rounds < 1)
    fail(Err::mismatched_config, "MismatchedConfig: simulation result has no rounds");
  if (!(z_limit > 0.0))
    fail(Err::mismatched_config, "MismatchedConfig: z-score limit must be positive");
  CompareReport rep;
  rep.z_limit = z_limit;
  for (const AnalyticMoment& a : analytic) {
    const MomentEstimate& m = sim.moment(a.rho);
    CompareRow row;
    row.name = a.name;
    row.rho = a.rho;
    row.analytic = a.value;
    row.empirical = m.value;
    row.std_error = m.std_error;
    row.z = m.std_error > 0.0 ? std::abs(m.value - a.value) / m.std_error
                              : (m.value == a.value ? 0.0 : std::numeric_limits<double>::infinity());
    row.pass = row.z <= z_limit;
    rep.rows.push_back(row);
    rep.all_pass = rep.all_pass && row.pass;
  }
  return rep;
}

}  // namespace brmlab
