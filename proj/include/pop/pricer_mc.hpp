#pragma once

#include <cstdint>
#include <vector>

#include "pop/models.hpp"
#include "pop/payoffs.hpp"
#include "pop/types.hpp"

namespace pop::mc {

struct McConfig {
  std::size_t n_paths = 1000000;
  std::size_t steps_per_year = 400;
  bool antithetic = true;
  std::uint64_t seed = 42;
  std::size_t n_threads = 0;  // 0: POP_THREADS or hardware concurrency
  /// Path-independent payoffs under BS/Merton are sampled with one exact step to T.
  bool exact_terminal_step = true;
};

/// One-pass mean/variance accumulator (Welford), mergeable.
class Welford {
 public:
  void add(double x);
  void merge(const Welford& other);
  std::size_t count() const { return n_; }
  double mean() const { return mean_; }
  /// Unbiased sample variance; 0 for fewer than two samples.
  double variance() const;

 private:
  std::size_t n_ = 0;
  double mean_ = 0.0;
  double m2_ = 0.0;
};

/// 1.96 * sample std / sqrt(n).
double confidence_bound(const Welford& acc);

/// Exact log-Euler step of a Black-Scholes log-price.
double bs_log_step(double log_s, double r, double var, double dt, double normal);

/// Merton step: diffusion plus a compound Poisson sum of n_jumps N(alpha, beta^2) sizes,
/// the sum drawn as alpha n + beta sqrt(n) * jump_normal.
double merton_log_step(double log_s, const models::MertonParams& p, double dt, double normal,
                       unsigned n_jumps, double jump_normal);

struct HestonState {
  double log_s;
  double v;
};

/// Full-truncation Euler for the variance, log-Euler with sqrt(v^+) for the asset.
HestonState heston_step(const HestonState& s, const models::HestonParams& p, double dt, double z_asset,
                        double z_indep);

/// Discounted Monte Carlo price with a 95% half-width. BS takes a d x d covariance
/// (a 1 x 1 covariance is shared by all d = S0.size() independent assets); Merton and
/// Heston drive each asset independently with the same parameters; Heston2 needs d = 2.
/// Antithetic pairs are averaged before the variance estimate. The result is
/// bit-identical for a given seed regardless of the thread count.
PriceResult price_mc(const payoffs::PayoffSpec& payoff, const models::ModelSpec& model,
                     const std::vector<double>& S0, const McConfig& cfg = {});

}  // namespace pop::mc
