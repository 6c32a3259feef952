#pragma once

// Switching-cost functions over hash-power allocations, validators for the
// two structural properties (P1: cost grows with the number of active
// destinations, P2: balance between destinations matters), and the minimum
// positive cost gap over an alpha-grid.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <vector>

#include "brmlab/core.hpp"

namespace brmlab {

enum class CostKind { count_only, balanced_penalty };

// count_only: number of active destinations minus one.
// balanced_penalty: adds kappa * sum of pairwise weight products, so equal
// splits cost more than lopsided ones at the same support. Both vanish on
// simplex vertices.
struct SwitchCostFn {
  CostKind kind = CostKind::balanced_penalty;
  double kappa = 1.0;

  double operator()(const StrategyVector& g) const {
    const std::size_t active = g.active_count();
    const double base = active > 0 ? static_cast<double>(active - 1) : 0.0;
    if (kind == CostKind::count_only) return base;
    // Sorted before summing so permuted allocations cost identically.
    std::vector<double> prods;
    prods.reserve(g.size() * (g.size() - 1) / 2);
    for (std::size_t i = 0; i < g.size(); ++i)
      for (std::size_t j = i + 1; j < g.size(); ++j) prods.push_back(g[i] * g[j]);
    std::sort(prods.begin(), prods.end());
    double s = 0.0;
    for (double p : prods) s += p;
    return base + kappa * s;
  }

  std::string name() const {
    if (kind == CostKind::count_only) return "count_only";
    return "balanced_penalty(kappa=" + detail::fmt_g17(kappa) + ")";
  }
};

template <class Fn>
double eval_cost(const Fn& fn, const StrategyVector& g) {
  return fn(g);
}

struct P1Report {
  std::size_t pairs_checked = 0;
  std::vector<std::pair<std::size_t, std::size_t>> violations;
  bool ok() const { return violations.empty(); }
};

// Checks D(g1) >= D(g2) whenever g1 has strictly more active destinations,
// over every ordered sample pair.
template <class Fn>
P1Report check_p1(const Fn& fn, const std::vector<StrategyVector>& samples) {
  if (samples.empty()) fail(Err::invalid_config, "check_p1: empty sample set");
  std::vector<double> cost(samples.size());
  std::vector<std::size_t> active(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) {
    cost[i] = fn(samples[i]);
    active[i] = samples[i].active_count();
  }
  P1Report rep;
  for (std::size_t i = 0; i < samples.size(); ++i) {
    for (std::size_t j = 0; j < samples.size(); ++j) {
      if (active[i] <= active[j]) continue;
      ++rep.pairs_checked;
      if (cost[i] < cost[j] - 1e-12) rep.violations.emplace_back(i, j);
    }
  }
  return rep;
}

struct P2Report {
  std::size_t qualifying_pairs = 0;
  std::size_t literal_satisfied = 0;  // D(more balanced) <= D(less balanced)
  std::size_t prose_satisfied = 0;    // D(more balanced) >= D(less balanced)
  bool literal_all() const { return literal_satisfied == qualifying_pairs; }
  bool prose_all() const { return prose_satisfied == qualifying_pairs; }
};

// For every ordered pair (g1, g2) that differs only on two coordinates with
// equal pair sum and a strictly larger pair product in g1 (g1 more balanced),
// tallies both readings of the balance property.
template <class Fn>
P2Report check_p2(const Fn& fn, const std::vector<StrategyVector>& samples) {
  if (samples.empty()) fail(Err::invalid_config, "check_p2: empty sample set");
  constexpr double tol = 1e-12;
  std::vector<double> cost(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) cost[i] = fn(samples[i]);
  P2Report rep;
  for (std::size_t x = 0; x < samples.size(); ++x) {
    for (std::size_t y = 0; y < samples.size(); ++y) {
      if (x == y) continue;
      const StrategyVector& g1 = samples[x];
      const StrategyVector& g2 = samples[y];
      if (g1.size() != g2.size()) continue;
      std::vector<std::size_t> diff;
      for (std::size_t i = 0; i < g1.size() && diff.size() <= 2; ++i)
        if (std::abs(g1[i] - g2[i]) > tol) diff.push_back(i);
      if (diff.size() != 2) continue;
      const std::size_t i = diff[0], j = diff[1];
      if (std::abs((g1[i] + g1[j]) - (g2[i] + g2[j])) > tol) continue;
      if (!(g1[i] * g1[j] > g2[i] * g2[j] + tol)) continue;
      ++rep.qualifying_pairs;
      if (cost[x] <= cost[y] + tol) ++rep.literal_satisfied;
      if (cost[x] >= cost[y] - tol) ++rep.prose_satisfied;
    }
  }
  return rep;
}

struct MarginalCost {
  double value = 0.0;
  StrategyVector lo;  // witness pair attaining the gap
  StrategyVector hi;
};

// Smallest positive |D(g1) - D(g2)| over all sample pairs with distinct
// costs. Costs within 1e-12 of each other count as equal, which absorbs
// floating-point noise between allocations with mathematically equal cost.
template <class Fn>
MarginalCost compute_d_min(const Fn& fn, const std::vector<StrategyVector>& samples) {
  if (samples.size() < 2) fail(Err::invalid_config, "compute_d_min: need at least two strategies");
  constexpr double equal_tol = 1e-12;
  std::vector<std::pair<double, std::size_t>> costs(samples.size());
  for (std::size_t i = 0; i < samples.size(); ++i) costs[i] = {fn(samples[i]), i};
  std::sort(costs.begin(), costs.end());
  double best = -1.0;
  std::size_t lo = 0, hi = 0;
  std::size_t rep = 0;  // representative of the current equal-cost run
  for (std::size_t i = 1; i < costs.size(); ++i) {
    const double gap = costs[i].first - costs[rep].first;
    if (gap <= equal_tol) continue;
    if (best < 0.0 || gap < best) {
      best = gap;
      lo = costs[rep].second;
      hi = costs[i].second;
    }
    rep = i;
  }
  if (best < 0.0)
    fail(Err::all_costs_equal, "AllCostsEqual: every sampled strategy has the same switching cost");
  return MarginalCost{best, samples[lo], samples[hi]};
}

template <class Fn>
MarginalCost compute_d_min(const Fn& fn, const AlphaGrid& grid) {
  return compute_d_min(fn, grid.points());
}

}  // namespace brmlab
