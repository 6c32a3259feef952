#pragma once

#include <vector>

#include "brmlab/core.hpp"

namespace brmlab::test {

// Baseline game: three pools at (0.5, 0.3, 0.2), small miner at M1/M2 = 1e-3,
// per-query win rates gamma1 ~ 1e-6 and gamma2 ~ 1e-4 (target ratio 100),
// reward parity with r_partial = 0.005.
inline GameConfig base_config() {
  GameConfig cfg;
  cfg.a = 1.0;
  cfg.b = 1.0;
  cfg.c = 0.0;
  cfg.delta = 0.99;
  cfg.r_block = 1.0;
  cfg.alpha = 0.1;
  cfg.miner = {1000.0, 2};
  cfg.system = {1e6, StrategyVector::make({0.0, 0.5, 0.3, 0.2})};
  cfg.mining = {30, 1074.0};
  cfg.fruitchain = parity_complete(cfg.r_block, cfg.mining.t_full, 107400.0, 0.005, 2);
  cfg.mode = ApproxMode::assumption1;
  cfg.assumption_ratio = 1e-3;
  cfg.validate();
  return cfg;
}

}  // namespace brmlab::test
