#include "pop/pricer_fourier.hpp"

#include <cmath>
#include <numbers>
#include <sstream>
#include <variant>

namespace pop::fourier {

namespace {

using models::cplx;
constexpr cplx I{0.0, 1.0};

std::string str(double v) {
  std::ostringstream os;
  os.precision(6);
  os << v;
  return os.str();
}

void check_admissible(const models::ModelSpec& model, const std::vector<double>& eta) {
  const auto issues = models::validate(model, eta);
  if (issues.empty()) return;
  std::string msg = "inadmissible model/payoff combination:";
  for (const auto& s : issues) msg += " " + s + ";";
  throw PricingError(msg);
}

void check_convergence(const quad::QuadResult& q, double abs_tol, double rel_tol) {
  const double target = std::max(abs_tol, rel_tol * std::abs(q.value));
  if (!q.converged && q.error > 1e3 * target)
    throw PricingError("Fourier quadrature did not converge: error estimate " + str(q.error) +
                       " after " + std::to_string(q.evals) + " evaluations");
}

// z1 ~ -slope * z2 is where the Gaussian part of the exponent is flattest for fixed z2
double ridge_slope(const models::ModelSpec& model) {
  if (const auto* b = std::get_if<models::BsParams>(&model))
    return b->cov(0, 0) > 0.0 ? b->cov(0, 1) / b->cov(0, 0) : 0.0;
  if (const auto* h = std::get_if<models::Heston2Params>(&model))
    return h->sigma1 > 0.0 ? h->rho12 * h->sigma2 / h->sigma1 : 0.0;
  return 0.0;
}

}  // namespace

QuadConfig QuadConfig::one_dim() { return QuadConfig{}; }

QuadConfig QuadConfig::two_dim() {
  QuadConfig q;
  q.abs_tol = 1e-8;
  q.rel_tol = 0.0;
  q.max_evals = 4000;
  return q;
}

PriceResult price_fourier_1d(const payoffs::PayoffSpec& payoff_in, const models::ModelSpec& model,
                             double log_spot, const QuadConfig& quad) {
  if (!payoffs::is_univariate_transform(payoff_in.kind))
    throw PricingError("price_fourier_1d: payoff '" + payoffs::kind_name(payoff_in.kind) +
                       "' has no univariate transform");
  const auto payoff = payoffs::with_default_eta(payoff_in);
  try {
    payoffs::validate(payoff);
  } catch (const std::invalid_argument& e) {
    throw PricingError(e.what());
  }
  if (models::cf_dimension(model) != 1) throw PricingError("price_fourier_1d: model is not univariate");
  check_admissible(model, payoff.eta);

  const auto cf = models::make_univariate_cf(model);
  const double eta = payoff.eta[0];
  const double spot_damp = std::exp(-eta * log_spot);
  auto integrand = [&](double x) {
    const cplx z{x, eta};
    const cplx v = payoffs::payoff_ft(payoff, -x) * std::exp(I * (x * log_spot)) * cf(z);
    return v.real() * spot_damp;
  };
  const auto q = quad::integrate_half_line(integrand, quad.abs_tol, quad.rel_tol, quad.max_evals,
                                           quad.truncation_start);
  check_convergence(q, quad.abs_tol, quad.rel_tol);

  const double T = models::maturity(model), r = models::rate(model);
  PriceResult res;
  res.price = std::exp(-r * T) / std::numbers::pi * q.value;
  res.method = "fourier";
  res.diagnostics["evals"] = std::to_string(q.evals);
  res.diagnostics["error_estimate"] = str(q.error);
  res.diagnostics["eta"] = str(eta);
  return res;
}

PriceResult price_fourier_2d(const payoffs::PayoffSpec& payoff_in, const models::ModelSpec& model,
                             std::array<double, 2> log_spots, const QuadConfig& quad) {
  if (payoff_in.kind != payoffs::PayoffKind::MinCall2)
    throw PricingError("price_fourier_2d: only the two-asset min-call is supported");
  const auto payoff = payoffs::with_default_eta(payoff_in);
  try {
    payoffs::validate(payoff);
  } catch (const std::invalid_argument& e) {
    throw PricingError(e.what());
  }
  if (models::cf_dimension(model) != 2) throw PricingError("price_fourier_2d: model is not bivariate");
  check_admissible(model, payoff.eta);

  const auto cf = models::make_bivariate_cf(model);
  const std::array<double, 2> eta{payoff.eta[0], payoff.eta[1]};
  const double spot_damp = std::exp(-eta[0] * log_spots[0] - eta[1] * log_spots[1]);
  auto integrand = [&](double z1, double z2) {
    const cplx v = payoffs::min_call_ft(payoff.K, eta, {cplx{-z1}, cplx{-z2}}) *
                   std::exp(I * (z1 * log_spots[0] + z2 * log_spots[1])) *
                   cf(cplx{z1, eta[0]}, cplx{z2, eta[1]});
    return v.real() * spot_damp;
  };

  quad::QuadResult q;
  if (quad.infinite_2d) {
    // nested 1-D rules over z2 = c u / (1 - u) and z1 = -slope z2 + c u / (1 - u^2)
    const double c = quad.infinite_scale;
    const double slope = ridge_slope(model);
    std::size_t evals = 0;
    bool converged = true;
    auto slice = [&](double u2) {
      const double d2 = 1.0 - u2;
      const double z2 = c * u2 / d2, jac2 = c / (d2 * d2);
      auto inner = [&](double u1) {
        const double d1 = 1.0 - u1 * u1;
        const double v = integrand(-slope * z2 + c * u1 / d1, z2);
        return v == 0.0 ? 0.0 : v * c * (1.0 + u1 * u1) / (d1 * d1);
      };
      const auto r = quad::integrate(inner, -1.0, 1.0, quad.abs_tol, quad.rel_tol, quad.max_evals);
      evals += r.evals;
      converged = converged && r.converged;
      return r.value == 0.0 ? 0.0 : r.value * jac2;
    };
    q = quad::integrate(slice, 0.0, 1.0, quad.abs_tol, quad.rel_tol, quad.max_evals);
    q.evals = evals;
    q.converged = q.converged && converged;
  } else {
    q = quad::cubature(integrand, quad.domain_2d, quad.abs_tol, quad.rel_tol, quad.max_evals,
                       quad.rule_2d);
  }

  const double T = models::maturity(model), r = models::rate(model);
  PriceResult res;
  res.price = std::exp(-r * T) * 2.0 / (4.0 * std::numbers::pi * std::numbers::pi) * q.value;
  res.method = "fourier2d";
  res.diagnostics["evals"] = std::to_string(q.evals);
  res.diagnostics["error_estimate"] = str(q.error);
  res.diagnostics["converged"] = q.converged ? "true" : "false";
  return res;
}

// ---------------------------------------------------------------------------

double norm_cdf(double x) { return 0.5 * std::erfc(-x / std::numbers::sqrt2); }

namespace {

struct D12 {
  double d1, d2;
  bool degenerate;
};

D12 d12(double S0, double K, double T, double sigma, double r) {
  const double sd = sigma * std::sqrt(std::max(T, 0.0));
  if (!(sd > 0.0)) return {0.0, 0.0, true};
  const double d1 = (std::log(S0 / K) + (r + 0.5 * sigma * sigma) * T) / sd;
  return {d1, d1 - sd, false};
}

}  // namespace

double bs_call_closed_form(double S0, double K, double T, double sigma, double r) {
  const auto d = d12(S0, K, T, sigma, r);
  const double df = std::exp(-r * std::max(T, 0.0));
  if (d.degenerate) return std::max(S0 - K * df, 0.0);
  return S0 * norm_cdf(d.d1) - K * df * norm_cdf(d.d2);
}

double bs_put_closed_form(double S0, double K, double T, double sigma, double r) {
  const auto d = d12(S0, K, T, sigma, r);
  const double df = std::exp(-r * std::max(T, 0.0));
  if (d.degenerate) return std::max(K * df - S0, 0.0);
  return K * df * norm_cdf(-d.d2) - S0 * norm_cdf(-d.d1);
}

double bs_digital_closed_form(double S0, double K, double T, double sigma, double r) {
  const auto d = d12(S0, K, T, sigma, r);
  const double df = std::exp(-r * std::max(T, 0.0));
  if (d.degenerate) return S0 > K * df ? df : 0.0;
  return df * norm_cdf(d.d2);
}

double bs_asset_or_nothing_closed_form(double S0, double K, double T, double sigma, double r) {
  const auto d = d12(S0, K, T, sigma, r);
  if (d.degenerate) return S0 > K * std::exp(-r * std::max(T, 0.0)) ? S0 : 0.0;
  return S0 * norm_cdf(d.d1);
}

}  // namespace pop::fourier
