#pragma once

#include <complex>
#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "pop/cheb.hpp"

namespace pop::bounds {

/// Bernstein-ellipse parameters rho_i > 1, one per axis.
class EllipseParams {
 public:
  explicit EllipseParams(std::vector<double> rho);
  std::size_t dim() const noexcept { return rho_.size(); }
  double operator[](std::size_t i) const { return rho_.at(i); }
  const std::vector<double>& values() const noexcept { return rho_; }

 private:
  std::vector<double> rho_;
};

struct BoundInput {
  double V;  // sup |price| on the generalized Bernstein ellipse
  EllipseParams rho;
  cheb::DegreeVector deg;
};

/// zeta + sqrt(zeta^2 - 1): supremum of admissible rho for an interval with ratio zeta.
double rho_upper_from_interval(double zeta);

/// (hi + lo) / (hi - lo).
double zeta_from_bounds(double lo, double hi);

/// Univariate bound 4 V rho^-N / (rho - 1).
double bound_1d(double V, double rho, std::size_t N);

/// Tensor bound 2^(D/2+1) V (sum_i rho_i^-2N_i prod_j 1/(1 - rho_j^-2))^(1/2).
double bound_multi(const BoundInput& in);

/// bound_multi plus the node-noise term 2^D eps_bar prod(N_i + 1).
double noisy_bound(const BoundInput& in, double eps_bar);

/// Additive node-noise term alone.
double noise_term(const cheb::DegreeVector& deg, double eps_bar);

/// Smallest uniform degree n (n,...,n) with bound_multi <= target.
/// Throws std::runtime_error when max_per_axis is not enough.
cheb::DegreeVector plan_degrees(double V, const EllipseParams& rho, double target,
                                std::size_t max_per_axis);

using ComplexFunction = std::function<std::complex<double>(std::span<const std::complex<double>>)>;

/// Estimate of sup |f| over the generalized Bernstein ellipse around dom: samples the
/// boundary (rho e^{i theta} + rho^-1 e^{-i theta}) / 2 per axis, mapped into dom, at
/// samples_per_axis angles per axis combination.
double estimate_V(const ComplexFunction& f, const cheb::Hyperrectangle& dom,
                  const EllipseParams& rho, std::size_t samples_per_axis = 360);

}  // namespace pop::bounds
