#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include "oracles.hpp"
#include "pop/pricer_fourier.hpp"

using namespace pop;
using namespace pop::fourier;
using payoffs::PayoffKind;
using payoffs::PayoffSpec;

namespace {

PayoffSpec payoff(PayoffKind k, double K, std::vector<double> eta = {}) { return {k, K, std::nullopt, std::move(eta)}; }

double price1(PayoffKind k, double K, const models::ModelSpec& m, double S0, std::vector<double> eta = {}) {
  return price_fourier_1d(payoff(k, K, std::move(eta)), m, std::log(S0)).price;
}

models::BsParams bs(double T, double r, double sigma) { return models::BsParams::univariate(T, r, sigma); }

}  // namespace

// ---------------------------------------------------------------------------
// closed forms against numerical integration over the normal density

TEST(ClosedForm, MatchesNumericalExpectation) {
  EXPECT_NEAR(bs_call_closed_form(1.0, 1.0, 1.0, 0.2, 0.0), 0.07965567, 1e-8);
  for (double S0 : {0.8, 1.0, 1.3})
    for (double T : {0.25, 1.0, 3.0})
      for (double r : {0.0, 0.05}) {
        EXPECT_NEAR(bs_call_closed_form(S0, 1.1, T, 0.25, r), oracle::bs_call(S0, 1.1, T, 0.25, r), 1e-13);
        EXPECT_NEAR(bs_digital_closed_form(S0, 1.1, T, 0.25, r), oracle::bs_digital(S0, 1.1, T, 0.25, r), 1e-13);
      }
}

TEST(ClosedForm, Limits) {
  EXPECT_NEAR(bs_call_closed_form(1.2, 1.0, 1e-12, 0.2, 0.0), 0.2, 1e-12);
  EXPECT_NEAR(bs_call_closed_form(1.2, 1.0, 0.0, 0.2, 0.0), 0.2, 1e-15);
  EXPECT_NEAR(bs_call_closed_form(1.2, 1.0, 1.0, 0.0, 0.0), 0.2, 1e-15);
  EXPECT_NEAR(bs_call_closed_form(0.8, 1.0, 1.0, 0.0, 0.0), 0.0, 1e-15);
  EXPECT_NEAR(bs_put_closed_form(0.8, 1.0, 1.0, 0.0, 0.0), 0.2, 1e-15);
  const double c = bs_call_closed_form(1.0, 0.9, 2.0, 0.3, 0.02);
  EXPECT_NEAR(bs_asset_or_nothing_closed_form(1.0, 0.9, 2.0, 0.3, 0.02) - 0.9 * bs_digital_closed_form(1.0, 0.9, 2.0, 0.3, 0.02),
              c, 1e-14);
}

// ---------------------------------------------------------------------------
// univariate Fourier prices

TEST(Fourier1d, BlackScholesExamples) {
  const auto m = bs(1.0, 0.0, 0.2);
  EXPECT_NEAR(price1(PayoffKind::Call, 1.0, m, 1.0), oracle::bs_call(1.0, 1.0, 1.0, 0.2, 0.0), 1e-7);
  EXPECT_NEAR(price1(PayoffKind::Call, 1.0, m, 1.0), 0.0796557, 1e-7);
  EXPECT_NEAR(price1(PayoffKind::DigitalDownOut, 1.0, m, 1.0), 0.460172, 1e-6);
  EXPECT_NEAR(price1(PayoffKind::DigitalDownOut, 1.0, m, 1.0), oracle::bs_digital(1.0, 1.0, 1.0, 0.2, 0.0), 1e-7);
}

TEST(Fourier1d, MatchesClosedFormOnMoneynessGrid) {
  const auto m = bs(1.0, 0.0, 0.2);
  for (int k = 0; k <= 20; ++k) {
    const double S0 = 0.8 + 0.02 * k;
    EXPECT_NEAR(price1(PayoffKind::Call, 1.0, m, S0), bs_call_closed_form(S0, 1.0, 1.0, 0.2, 0.0), 1e-10) << S0;
  }
}

TEST(Fourier1d, AllPayoffsMatchClosedForms) {
  const double S0 = 1.05, K = 0.95, T = 1.5, s = 0.3, r = 0.03;
  const auto m = bs(T, r, s);
  EXPECT_NEAR(price1(PayoffKind::Put, K, m, S0), bs_put_closed_form(S0, K, T, s, r), 1e-10);
  EXPECT_NEAR(price1(PayoffKind::DigitalDownOut, K, m, S0), bs_digital_closed_form(S0, K, T, s, r), 1e-10);
  EXPECT_NEAR(price1(PayoffKind::AssetOrNothingDownOut, K, m, S0), bs_asset_or_nothing_closed_form(S0, K, T, s, r),
              1e-10);
}

TEST(Fourier1d, PutCallParity) {
  std::mt19937_64 rng(31);
  std::uniform_real_distribution<double> s0(0.7, 1.4), kk(0.7, 1.4), tt(0.2, 3.0), sg(0.1, 0.5), rr(-0.01, 0.06);
  for (int n = 0; n < 25; ++n) {
    const double S0 = s0(rng), K = kk(rng), T = tt(rng), r = rr(rng);
    const auto m = bs(T, r, sg(rng));
    const double c = price1(PayoffKind::Call, K, m, S0), p = price1(PayoffKind::Put, K, m, S0);
    EXPECT_NEAR(c - p, S0 - K * std::exp(-r * T), 1e-10);
  }
  for (const models::ModelSpec& m : std::vector<models::ModelSpec>{models::MertonParams{}, models::CgmyParams{},
                                                                    models::HestonParams{}}) {
    const double c = price1(PayoffKind::Call, 1.1, m, 1.0), p = price1(PayoffKind::Put, 1.1, m, 1.0);
    EXPECT_NEAR(c - p, 1.0 - 1.1 * std::exp(-models::rate(m) * models::maturity(m)), 1e-10) << models::family_name(m);
  }
}

TEST(Fourier1d, InvariantUnderContourShift) {
  const std::vector<models::ModelSpec> ms{bs(1.0, 0.0, 0.2), models::MertonParams{}, models::CgmyParams{},
                                          models::HestonParams{}};
  for (const auto& m : ms) {
    const double base = price1(PayoffKind::Call, 1.0, m, 0.9, {-2.0});
    for (double eta : {-1.5, -5.0}) {
      if (!models::validate(m, std::vector<double>{eta}).empty()) continue;
      EXPECT_NEAR(price1(PayoffKind::Call, 1.0, m, 0.9, {eta}), base, 1e-10) << models::family_name(m) << " " << eta;
    }
  }
}

TEST(Fourier1d, MoneynessIdentity) {
  std::mt19937_64 rng(37);
  std::uniform_real_distribution<double> s0(50.0, 150.0), kk(50.0, 150.0);
  const std::vector<models::ModelSpec> ms{bs(1.0, 0.02, 0.2), models::MertonParams{}, models::CgmyParams{},
                                          models::HestonParams{}};
  for (const auto& m : ms)
    for (int n = 0; n < 5; ++n) {
      const double S0 = s0(rng), K = kk(rng);
      const double direct = price1(PayoffKind::Call, K, m, S0);
      const double scaled = K * price1(PayoffKind::Call, 1.0, m, S0 / K);
      EXPECT_NEAR(direct, scaled, 1e-10 * K) << models::family_name(m);
    }
}

TEST(Fourier1d, ArbitrageBounds) {
  const std::vector<models::ModelSpec> ms{models::MertonParams{}, models::CgmyParams{}, models::HestonParams{}};
  for (const auto& m : ms) {
    double prev = 1.0;
    for (double K = 0.8; K <= 1.21; K += 0.05) {
      const double c = price1(PayoffKind::Call, K, m, 1.0);
      EXPECT_GE(c, std::max(1.0 - K, 0.0) - 1e-12);
      EXPECT_LT(c, prev);
      prev = c;
      const double d = price1(PayoffKind::DigitalDownOut, K, m, 1.0);
      EXPECT_GT(d, 0.0);
      EXPECT_LT(d, 1.0);
    }
  }
}

TEST(Fourier1d, RejectsBadInputs) {
  const auto m = bs(1.0, 0.0, 0.2);
  EXPECT_THROW(price_fourier_1d(payoff(PayoffKind::Basket, 1.0), m, 0.0), PricingError);
  EXPECT_THROW(price_fourier_1d(payoff(PayoffKind::Call, 1.0, {-0.5}), m, 0.0), PricingError);
  EXPECT_THROW(price_fourier_1d(payoff(PayoffKind::Call, 1.0), models::Heston2Params{}, 0.0), PricingError);
  EXPECT_THROW(price_fourier_1d(payoff(PayoffKind::Call, 1.0, {-12.0}), models::CgmyParams{}, 0.0), PricingError);
}

// ---------------------------------------------------------------------------
// two-asset min-call

namespace {

models::BsParams bs2(double T, double c11, double c12, double c22) {
  models::BsParams p;
  p.T = T;
  p.cov.resize(2, 2);
  p.cov << c11, c12, c12, c22;
  return p;
}

}  // namespace

TEST(Fourier2d, PerfectlyCorrelatedAssetsReduceToCall) {
  QuadConfig q = QuadConfig::two_dim();
  q.infinite_2d = true;
  q.abs_tol = 1e-9;
  q.max_evals = 400000;
  const double s2 = 0.04;
  const auto r = price_fourier_2d(payoff(PayoffKind::MinCall2, 1.0), bs2(1.0, s2, s2, s2), {0.0, 0.0}, q);
  EXPECT_NEAR(r.price, bs_call_closed_form(1.0, 1.0, 1.0, 0.2, 0.0), 1e-6);
}

TEST(Fourier2d, IndependentAssetsMatchProductIntegral) {
  // E(min(S1,S2) - K)^+ by 1-D integration over S1 with the S2 expectation in closed form
  const double T = 1.0, s1 = 0.2, s2 = 0.25, S10 = 1.0, S20 = 1.2, K = 1.0;
  const auto r = price_fourier_2d(payoff(PayoffKind::MinCall2, K), bs2(T, s1 * s1, 0.0, s2 * s2),
                                  {std::log(S10), std::log(S20)}, [] {
                                    QuadConfig q = QuadConfig::two_dim();
                                    q.max_evals = 400000;
                                    q.abs_tol = 1e-10;
                                    return q;
                                  }());
  // E(min(a, S2) - K)^+ = C(S2; K) - C(S2; a) for a > K
  auto inner = [&](double a) {
    if (a <= K) return 0.0;
    return bs_call_closed_form(S20, K, T, s2, 0.0) - bs_call_closed_form(S20, a, T, s2, 0.0);
  };
  const double mu = std::log(S10) - 0.5 * s1 * s1 * T;
  const double want = oracle::gauss_legendre(
      [&](double x) { return inner(std::exp(mu + s1 * std::sqrt(T) * x)) * oracle::normal_pdf(x); },
      (std::log(K) - mu) / (s1 * std::sqrt(T)), 12.0, 0.01);
  EXPECT_NEAR(r.price, want, 1e-7);
}

TEST(Fourier2d, DecreasingInStrike) {
  const auto m = bs2(1.0, 0.04, 0.01, 0.0625);
  double prev = 1.0;
  for (double K : {0.8, 1.0, 1.2}) {
    const double p = price_fourier_2d(payoff(PayoffKind::MinCall2, K), m, {0.0, std::log(1.2)}).price;
    EXPECT_LT(p, prev);
    prev = p;
  }
}

TEST(Fourier2d, HestonSanity) {
  const auto r = price_fourier_2d(payoff(PayoffKind::MinCall2, 1.0), models::Heston2Params{}, {0.0, std::log(1.2)});
  EXPECT_GT(r.price, 0.0);
  EXPECT_LT(r.price, 1.0);
  EXPECT_EQ(r.method, "fourier2d");
}

TEST(Fourier2d, RejectsBadInputs) {
  const auto m = bs2(1.0, 0.04, 0.01, 0.0625);
  EXPECT_THROW(price_fourier_2d(payoff(PayoffKind::Call, 1.0), m, {0.0, 0.0}), PricingError);
  EXPECT_THROW(price_fourier_2d(payoff(PayoffKind::MinCall2, 1.0, {-0.5, -2.0}), m, {0.0, 0.0}), PricingError);
  EXPECT_THROW(price_fourier_2d(payoff(PayoffKind::MinCall2, 1.0), bs(1.0, 0.0, 0.2), {0.0, 0.0}), PricingError);
}
