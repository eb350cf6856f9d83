#pragma once

#include <cstddef>

#include "pop/types.hpp"

namespace pop::fd {

enum class GridCenter { Strike, Spot };

struct FdConfig {
  std::size_t grid_factor = 50;  // intervals per year in time and space, times max(1, T)
  std::size_t n_time = 0;        // 0: grid_factor * max(1, T)
  std::size_t n_space = 0;       // 0: grid_factor * max(1, T)
  double half_width = 0.0;       // 0: 4 sigma sqrt(T) + |r| T in log-moneyness
  GridCenter center = GridCenter::Spot;  // spot on a node: no interpolation error at S0
  bool cell_average_payoff = true;       // smooths the kink at the strike
  std::size_t rannacher_steps = 0;  // initial implicit half-steps replacing CN steps

  static FdConfig refined();
};

/// Crank-Nicolson in x = ln(S/K) with Brennan-Schwartz projection against (K - S)^+.
/// Throws std::invalid_argument for non-positive inputs or grids below 10 intervals.
PriceResult price_american_put_fd(double S0, double K, double T, double sigma, double r,
                                  const FdConfig& cfg = {});

/// Same scheme without the early-exercise obstacle.
PriceResult price_european_put_fd(double S0, double K, double T, double sigma, double r,
                                  const FdConfig& cfg = {});

}  // namespace pop::fd
