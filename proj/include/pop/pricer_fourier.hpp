#pragma once

#include <array>

#include "pop/models.hpp"
#include "pop/payoffs.hpp"
#include "pop/quadrature.hpp"
#include "pop/types.hpp"

namespace pop::fourier {

struct QuadConfig {
  double abs_tol = 1e-14;
  double rel_tol = 1e-13;
  std::size_t max_evals = 200000;
  double truncation_start = 200.0;  // first upper limit of the half-line integral
  quad::Box domain_2d{-50.0, 50.0, 0.0, 50.0};
  bool infinite_2d = false;  // whole half-plane by nested 1-D rules on mapped axes
                             // (max_evals applies per 1-D rule)
  double infinite_scale = 10.0;
  quad::CubatureRule rule_2d = quad::CubatureRule::GK7;

  static QuadConfig one_dim();
  static QuadConfig two_dim();
};

/// Univariate price e^{-rT} / pi * Re int_0^inf f^(-z - i eta) S0^{i(z + i eta)} phi(z + i eta) dz.
/// An empty payoff eta takes the kind's default. Throws PricingError when the payoff/model
/// combination is inadmissible or the quadrature misses its tolerance.
PriceResult price_fourier_1d(const payoffs::PayoffSpec& payoff, const models::ModelSpec& model,
                             double log_spot, const QuadConfig& quad = QuadConfig::one_dim());

/// Two-asset min-call price, half-plane z2 >= 0 by Hermitian symmetry.
PriceResult price_fourier_2d(const payoffs::PayoffSpec& payoff, const models::ModelSpec& model,
                             std::array<double, 2> log_spots,
                             const QuadConfig& quad = QuadConfig::two_dim());

/// Standard normal cdf.
double norm_cdf(double x);

double bs_call_closed_form(double S0, double K, double T, double sigma, double r);
double bs_put_closed_form(double S0, double K, double T, double sigma, double r);
/// Cash-or-nothing digital paying 1{S_T > K}.
double bs_digital_closed_form(double S0, double K, double T, double sigma, double r);
/// Asset-or-nothing paying S_T 1{S_T > K}.
double bs_asset_or_nothing_closed_form(double S0, double K, double T, double sigma, double r);

}  // namespace pop::fourier
