#pragma once

// Exhaustive best response over an alpha-grid, dominance queries, the
// centralization threshold on the switching-cost coefficient, and
// decentralization verdicts. Grid scans can run chunked across threads; the
// merge keeps the earliest maximizer in enumeration order so parallel and
// serial runs agree bit for bit.

#include <algorithm>
#include <future>
#include <limits>
#include <optional>
#include <thread>
#include <utility>
#include <vector>

#include "brmlab/core.hpp"
#include "brmlab/utility.hpp"

namespace brmlab {

struct BestResponse {
  StrategyVector strategy = StrategyVector::vertex(1, 0);
  UtilityBreakdown utility;
  double runner_up_gap = 0.0;
  std::vector<std::pair<StrategyVector, double>> witness_table;  // filled on request
};

struct SolveOptions {
  bool want_table = false;
  unsigned threads = 1;
};

template <class CostFn>
BestResponse best_response(const GameConfig& cfg, const BrmKind& brm, const CostFn& d_fn,
                           const AlphaGrid& grid, const SolveOptions& opts = {}) {
  const std::vector<StrategyVector> points = grid.points();
  if (points.empty()) fail(Err::invalid_config, "best_response: empty grid");

  std::vector<double> utils(points.size());
  const auto eval_range = [&](std::size_t lo, std::size_t hi) {
    for (std::size_t i = lo; i < hi; ++i)
      utils[i] = round_utility(cfg, points[i], brm, d_fn).utility;
  };
  const unsigned threads = std::max(1u, opts.threads);
  if (threads == 1 || points.size() < 2 * threads) {
    eval_range(0, points.size());
  } else {
    std::vector<std::future<void>> jobs;
    const std::size_t chunk = (points.size() + threads - 1) / threads;
    for (unsigned t = 0; t < threads; ++t) {
      const std::size_t lo = t * chunk;
      const std::size_t hi = std::min(points.size(), lo + chunk);
      if (lo >= hi) break;
      jobs.push_back(std::async(std::launch::async, eval_range, lo, hi));
    }
    for (auto& j : jobs) j.get();
  }

  std::size_t best = 0;
  for (std::size_t i = 1; i < points.size(); ++i)
    if (utils[i] > utils[best]) best = i;  // strict: earliest wins ties
  double runner_up = -std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < points.size(); ++i)
    if (i != best && utils[i] > runner_up) runner_up = utils[i];

  BestResponse br;
  br.strategy = points[best];
  br.utility = round_utility(cfg, points[best], brm, d_fn);
  br.runner_up_gap = points.size() > 1 ? utils[best] - runner_up : 0.0;
  if (opts.want_table) {
    br.witness_table.reserve(points.size());
    for (std::size_t i = 0; i < points.size(); ++i)
      br.witness_table.emplace_back(points[i], utils[i]);
  }
  return br;
}

// Switching-cost threshold above which joining the largest pool is the
// equilibrium: c_bar = b * r_block * M1 * p / (M2 * D_min).
inline double centralization_threshold(const GameConfig& cfg, double d_min) {
  if (!(d_min > 0.0)) fail(Err::zero_d_min, "ZeroDMin: marginal switching cost must be positive");
  return cfg.b * cfg.r_block * cfg.miner.m1 * static_cast<double>(cfg.pools()) /
         (cfg.system.m2 * d_min);
}

struct DominanceWitness {
  StrategyVector strategy;
  double utility = 0.0;
  double margin = 0.0;  // utility - candidate utility
};

// Returns a grid point with strictly higher utility than the candidate
// (beyond eps), or nothing if the candidate is eps-undominated.
template <class CostFn>
std::optional<DominanceWitness> is_dominated(const GameConfig& cfg, const BrmKind& brm,
                                             const CostFn& d_fn, const StrategyVector& candidate,
                                             const AlphaGrid& grid, double eps = 0.0) {
  if (!grid.contains(candidate))
    fail(Err::invalid_config, "is_dominated: candidate is not a grid point");
  const double u_candidate = round_utility(cfg, candidate, brm, d_fn).utility;
  const BestResponse br = best_response(cfg, brm, d_fn, grid);
  if (br.utility.utility > u_candidate + eps)
    return DominanceWitness{br.strategy, br.utility.utility, br.utility.utility - u_candidate};
  return std::nullopt;
}

struct DecentralizationVerdict {
  double pre_max_share = 0.0;   // max_i f_i before the miner joins
  double post_max_share = 0.0;  // max_j (g*_j M1 + f_j M2)/(M1+M2) after
  bool is_rho_decentralized = false;
  StrategyVector best_response = StrategyVector::vertex(1, 0);
};

template <class CostFn>
DecentralizationVerdict decentralization_verdict(const GameConfig& cfg, const BrmKind& brm,
                                                 const CostFn& d_fn, const AlphaGrid& grid) {
  const BestResponse br = best_response(cfg, brm, d_fn, grid);
  const StrategyVector& f = cfg.system.f;
  const StrategyVector& g = br.strategy;
  DecentralizationVerdict v;
  v.best_response = g;
  for (std::size_t i = 1; i < f.size(); ++i) v.pre_max_share = std::max(v.pre_max_share, f[i]);
  const double m1 = cfg.miner.m1, m2 = cfg.system.m2;
  for (std::size_t j = 1; j < f.size(); ++j)
    v.post_max_share = std::max(v.post_max_share, (g[j] * m1 + f[j] * m2) / (m1 + m2));
  v.is_rho_decentralized = v.pre_max_share >= v.post_max_share - 1e-12;
  return v;
}

// Folds a sequence of joining miners into the system one by one: each joiner
// best-responds on the canonical grid, its hash power is merged into f
// mass-weighted, and the running max pool share is recorded. Element 0 of the
// returned series is the pre-join max share.
template <class CostFn>
std::vector<double> sequential_joins(const GameConfig& base, const std::vector<MinerType>& joiners,
                                     const BrmKind& brm, const CostFn& d_fn) {
  GameConfig cfg = base;
  std::vector<double> series;
  const auto max_pool_share = [](const StrategyVector& f) {
    double m = 0.0;
    for (std::size_t i = 1; i < f.size(); ++i) m = std::max(m, f[i]);
    return m;
  };
  series.push_back(max_pool_share(cfg.system.f));
  for (const MinerType& joiner : joiners) {
    joiner.validate();
    if (joiner.m1 / cfg.system.m2 > cfg.assumption_ratio * (1.0 + 1e-12))
      fail(Err::assumption_violated, "AssumptionViolated: joiner hash rate " +
                                         detail::fmt_g17(joiner.m1) +
                                         " is too large for the current system");
    cfg.miner = joiner;
    const AlphaGrid grid = AlphaGrid::canonical(cfg.pools(), cfg.alpha);
    const BestResponse br = best_response(cfg, brm, d_fn, grid);
    const double m1 = joiner.m1, m2 = cfg.system.m2;
    std::vector<double> merged(cfg.system.f.size());
    for (std::size_t i = 0; i < merged.size(); ++i)
      merged[i] = (cfg.system.f[i] * m2 + br.strategy[i] * m1) / (m1 + m2);
    cfg.system.f = StrategyVector::make(std::move(merged));
    cfg.system.m2 = m1 + m2;
    series.push_back(max_pool_share(cfg.system.f));
  }
  return series;
}

}  // namespace brmlab
