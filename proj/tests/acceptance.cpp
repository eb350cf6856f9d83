// Acceptance suite: one PASS/FAIL line per criterion, exit status 1 when any fails.
#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <string>
#include <vector>

#include "pop/cheb.hpp"
#include "pop/engine.hpp"
#include "pop/error_bounds.hpp"

using namespace pop;
using cheb::DegreeVector;
using cheb::Hyperrectangle;
using cheb::Point;
using payoffs::PayoffKind;

namespace {

int failures = 0;

void report(int id, const std::string& name, bool ok, const std::string& detail, double seconds) {
  std::printf("%s %2d %s: %s (%.1f s)\n", ok ? "PASS" : "FAIL", id, name.c_str(), detail.c_str(), seconds);
  std::fflush(stdout);
  if (!ok) ++failures;
}

std::string fmt(const char* f, double a) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a);
  return buf;
}

std::string fmt(const char* f, double a, double b) {
  char buf[256];
  std::snprintf(buf, sizeof buf, f, a, b);
  return buf;
}

double seconds_since(std::chrono::steady_clock::time_point t0) {
  return std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
}

void run(int id, const std::string& name, const std::function<std::pair<bool, std::string>()>& body) {
  const auto t0 = std::chrono::steady_clock::now();
  try {
    const auto [ok, detail] = body();
    report(id, name, ok, detail, seconds_since(t0));
  } catch (const std::exception& e) {
    report(id, name, false, std::string("exception: ") + e.what(), seconds_since(t0));
  }
}

const Hyperrectangle kMoneynessT({0.8, 0.5}, {1.2, 2.0}, {"moneyness", "T"});
const Hyperrectangle kMoneynessV0({0.8, 0.01}, {1.2, 0.16}, {"moneyness", "v0"});
const Hyperrectangle kStrikeT({83.33, 0.5}, {125.0, 2.0}, {"K", "T"});
const Hyperrectangle kMinCallKT({0.8, 0.5}, {1.2, 2.0}, {"K", "T"});

double bs_call_mt(std::span<const double> p) { return fourier::bs_call_closed_form(p[0], 1.0, p[1], 0.2, 0.0); }

struct Case {
  std::string name;
  models::ModelSpec model;
  Hyperrectangle dom;
  std::vector<std::pair<std::string, std::string>> axes;
};

std::vector<Case> table3_models() {
  models::MertonParams merton;
  merton.sigma = 0.15;
  merton.alpha = -0.04;
  merton.beta = 0.02;
  merton.lambda = 3.0;
  models::CgmyParams cgmy;
  cgmy.C = 0.6;
  cgmy.G = 10.0;
  cgmy.M = 28.0;
  cgmy.Y = 1.1;
  models::HestonParams heston;
  heston.T = 2.0;
  heston.kappa = 1.5;
  heston.theta = 0.04;
  heston.sigma = 0.25;
  heston.rho = 0.1;
  const std::vector<std::pair<std::string, std::string>> mt = {{"moneyness", "moneyness"}, {"T", "T"}};
  return {
      {"BS", models::BsParams::univariate(1.0, 0.0, 0.2), kMoneynessT, mt},
      {"Merton", merton, kMoneynessT, mt},
      {"CGMY", cgmy, kMoneynessT, mt},
      {"Heston", heston, kMoneynessV0, {{"moneyness", "moneyness"}, {"v0", "v0"}}},
  };
}

engine::ReferencePricer fourier_reference(const Case& c, PayoffKind kind) {
  engine::ParamBinding b;
  b.axes = c.axes;
  b.base.model = c.model;
  b.base.payoff = {kind, 1.0, std::nullopt, {}};
  engine::PricerSettings s;
  s.method = engine::Method::Fourier;
  s.quad.abs_tol = 1e-12;
  return engine::make_reference(b, s);
}

double cheb_t(std::size_t n, double x) { return std::cos(static_cast<double>(n) * std::acos(std::clamp(x, -1.0, 1.0))); }

double cheb_t_multi(const std::vector<std::size_t>& mu, std::span<const double> x) {
  double v = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) v *= cheb_t(mu[i], x[i]);
  return v;
}

Point random_point(std::size_t d, std::mt19937_64& rng) {
  Point p(d);
  for (auto& x : p) x = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
  return p;
}

models::BsParams min_call_model() {
  models::BsParams m;
  m.cov.resize(2, 2);
  m.cov << 0.04, 0.01, 0.01, 0.0625;
  return m;
}

engine::ParamBinding min_call_binding() {
  engine::ParamBinding b;
  b.axes = {{"K", "K"}, {"T", "T"}};
  b.base.model = min_call_model();
  b.base.payoff = {PayoffKind::MinCall2, 1.0, std::nullopt, {}};
  b.base.spot = {1.0, 1.2};
  return b;
}

}  // namespace

int main() {
  std::printf("acceptance suite, threads: default\n");

  // shared by criteria 1 and 3
  engine::ConvergenceResult bs_study;
  bool bs_study_ok = false;
  auto ensure_bs_study = [&] {
    if (bs_study_ok) return;
    std::vector<std::size_t> N(30);
    for (std::size_t i = 0; i < N.size(); ++i) N[i] = i + 1;
    bs_study = engine::convergence_study(bs_call_mt, kMoneynessT, N, engine::GridSpec(kMoneynessT, 101), 1e-15);
    bs_study_ok = true;
  };

  run(1, "convergence slope, BS call", [&] {
    ensure_bs_study();
    if (!bs_study.slope) return std::pair{false, std::string("no pre-saturation points")};
    const double s = *bs_study.slope;
    return std::pair{s >= -0.90 && s <= -0.48,
                     fmt("slope %.4f over %.0f points, window [-0.90, -0.48]", s,
                         static_cast<double>(bs_study.fitted_points))};
  });

  // call errors per model, reused by criterion 4
  std::vector<double> call_err;
  run(2, "N=10 accuracy, call, four models", [&] {
    bool ok = true;
    std::string detail;
    for (const auto& c : table3_models()) {
      const auto ref = fourier_reference(c, PayoffKind::Call);
      const auto s = engine::build_surrogate(ref, c.dom, DegreeVector({10, 10}));
      const auto rep = engine::error_study(s, ref, engine::GridSpec(c.dom, 101));
      call_err.push_back(rep.eps_linf);
      ok = ok && rep.eps_linf <= 1e-6;
      detail += c.name + fmt(" %.3e; ", rep.eps_linf);
    }
    return std::pair{ok, detail + "limit 1e-6"};
  });

  run(3, "saturation, BS call N=30", [&] {
    ensure_bs_study();
    const double e = bs_study.rows.back().eps_linf;
    return std::pair{e <= 1e-10, fmt("eps_linf %.3e, limit 1e-10", e)};
  });

  run(4, "digital vs call degradation, N=10", [&] {
    bool ok = call_err.size() == 4;
    std::string detail;
    const auto cases = table3_models();
    for (std::size_t i = 0; i < cases.size() && ok; ++i) {
      const auto ref = fourier_reference(cases[i], PayoffKind::DigitalDownOut);
      const auto s = engine::build_surrogate(ref, cases[i].dom, DegreeVector({10, 10}));
      const auto rep = engine::error_study(s, ref, engine::GridSpec(cases[i].dom, 101));
      const double ratio = rep.eps_linf / call_err[i];
      ok = ok && ratio >= 3.0 && ratio <= 1e4;
      detail += cases[i].name + fmt(" %.3e (x%.1f); ", rep.eps_linf, ratio);
    }
    if (call_err.size() != 4) detail = "call errors unavailable; ";
    return std::pair{ok, detail + "window [3, 1e4]"};
  });

  run(5, "aliasing", [&] {
    std::mt19937_64 rng(2024);
    double exact_err = 0.0, alias_err = 0.0;
    for (std::size_t d = 1; d <= 3; ++d) {
      const Hyperrectangle dom(std::vector<double>(d, -1.0), std::vector<double>(d, 1.0));
      const std::size_t n = d == 3 ? 4 : 6;
      const auto deg = DegreeVector::uniform(d, n);
      const auto nodes = cheb::tensor_nodes(deg, dom);
      auto fit = [&](const std::vector<std::size_t>& mu) {
        std::vector<double> v;
        for (const auto& p : nodes) v.push_back(cheb_t_multi(mu, p));
        return cheb::build_interpolant(dom, deg, v);
      };
      std::vector<Point> sample;
      for (int k = 0; k < 2000; ++k) sample.push_back(random_point(d, rng));
      std::vector<std::size_t> mu(d, 0);
      while (true) {
        const auto s = fit(mu);
        for (const auto& p : sample) exact_err = std::max(exact_err, std::abs(s.evaluate(p) - cheb_t_multi(mu, p)));
        std::size_t i = d;
        while (i-- > 0) {
          if (++mu[i] <= n) break;
          mu[i] = 0;
        }
        if (i == static_cast<std::size_t>(-1)) break;
      }
      for (int trial = 0; trial < 20; ++trial) {
        std::vector<std::size_t> m(d);
        for (auto& x : m) x = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
        m[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] =
            std::uniform_int_distribution<std::size_t>(n + 1, 40)(rng);
        const auto s = fit(m);
        for (const auto& p : sample) alias_err = std::max(alias_err, std::abs(s.evaluate(p) - cheb_t_multi(m, p)));
      }
    }
    return std::pair{exact_err <= 1e-12 && alias_err <= 2.0 + 1e-12,
                     fmt("exact max %.3e (limit 1e-12), aliased max %.6f (limit 2)", exact_err, alias_err)};
  });

  run(6, "martingale identity cf(-i) = exp(rT)", [&] {
    double worst = 0.0;
    for (double r : {0.0, 0.03}) {
      for (auto c : table3_models()) {
        models::set_rate(c.model, r);
        const double T = models::maturity(c.model);
        const auto cf = models::make_univariate_cf(c.model);
        worst = std::max(worst, std::abs(cf(models::cplx(0.0, -1.0)) - std::exp(r * T)));
      }
    }
    return std::pair{worst <= 1e-12, fmt("max deviation %.3e, limit 1e-12", worst)};
  });

  run(7, "Fourier vs closed form, BS", [&] {
    double err = 0.0, parity = 0.0;
    for (double r : {0.0, 0.03}) {
      const auto m = models::BsParams::univariate(1.0, r, 0.2);
      for (int k = 0; k <= 20; ++k) {
        const double S0 = 0.8 + 0.02 * k;
        const double c = fourier::price_fourier_1d({PayoffKind::Call, 1.0, std::nullopt, {}}, m, std::log(S0)).price;
        const double p = fourier::price_fourier_1d({PayoffKind::Put, 1.0, std::nullopt, {}}, m, std::log(S0)).price;
        err = std::max(err, std::abs(c - fourier::bs_call_closed_form(S0, 1.0, 1.0, 0.2, r)));
        parity = std::max(parity, std::abs(c - p - (S0 - std::exp(-r))));
      }
    }
    return std::pair{err <= 1e-10 && parity <= 1e-10,
                     fmt("max |call - closed form| %.3e, max parity gap %.3e, limit 1e-10", err, parity)};
  });

  run(8, "MC basket surrogate, d=5", [&] {
    engine::ParamBinding b;
    b.axes = {{"K", "K"}, {"T", "T"}};
    b.base.model = models::BsParams::univariate(1.0, 0.005, 0.2);
    b.base.payoff = {PayoffKind::Basket, 100.0, std::nullopt, {}};
    b.base.spot = std::vector<double>(5, 100.0);
    engine::PricerSettings s;
    s.method = engine::Method::MonteCarlo;
    s.mc.n_paths = 100000;
    s.mc.seed = 42;
    const auto surrogate = engine::build_surrogate(b, kStrikeT, DegreeVector({10, 10}), s);

    mc::McConfig fresh = s.mc;
    fresh.seed = 20240917;
    const engine::GridSpec grid(kStrikeT, 41);
    double eps = 0.0, worst_hw = 0.0;
    for (const auto& p : grid.points_list()) {
      const auto prob = b.bind(p);
      const auto r = mc::price_mc(prob.payoff, prob.model, prob.spot, fresh);
      eps = std::max(eps, std::abs(surrogate.evaluate(p) - r.price));
      worst_hw = std::max(worst_hw, r.conf_half_width);
    }
    const double limit = std::max(0.05, 3.0 * worst_hw);
    return std::pair{eps <= limit, fmt("eps_linf %.4f, worst half-width %.4f", eps, worst_hw) +
                                       fmt(", limit %.4f", limit)};
  });

  run(9, "noisy-node bound", [&] {
    const double eps_bar = 1e-4;
    std::string detail;
    bool ok = true;
    for (std::size_t n : {6u, 10u}) {
      const DegreeVector deg({n, n});
      const auto nodes = cheb::tensor_nodes(deg, kMoneynessT);
      std::vector<double> clean, noisy;
      std::mt19937_64 rng(n);
      for (const auto& p : nodes) {
        clean.push_back(bs_call_mt(p));
        noisy.push_back(clean.back() + std::uniform_real_distribution<double>(-eps_bar, eps_bar)(rng));
      }
      const auto sc = cheb::build_interpolant(kMoneynessT, deg, clean);
      const auto sn = cheb::build_interpolant(kMoneynessT, deg, noisy);
      double dev = 0.0;
      for (const auto& p : engine::GridSpec(kMoneynessT, 201).points_list())
        dev = std::max(dev, std::abs(sn.evaluate(p) - sc.evaluate(p)));
      const double term = bounds::noise_term(deg, eps_bar);
      ok = ok && dev <= term;
      detail += fmt("N=%.0f: deviation %.3e", static_cast<double>(n), dev) + fmt(" <= %.3e; ", term);
    }
    const double c66 = bounds::noise_term(DegreeVector({6, 6}), eps_bar);
    ok = ok && std::abs(c66 - 196.0 * eps_bar) <= 1e-15;
    return std::pair{ok, detail + fmt("constant at (6,6) = %.6g eps_bar", c66 / eps_bar)};
  });

  run(10, "American put, FD surrogate", [&] {
    engine::ParamBinding b;
    b.axes = {{"K", "K"}, {"T", "T"}};
    b.base.model = models::BsParams::univariate(1.0, 0.005, 0.2);
    b.base.payoff = {PayoffKind::AmericanPut, 100.0, std::nullopt, {}};
    b.base.spot = {100.0};
    engine::PricerSettings s;
    s.method = engine::Method::FiniteDifference;
    const auto ref = engine::make_reference(b, s);
    const auto surrogate = engine::build_surrogate(ref, kStrikeT, DegreeVector({10, 10}));
    const auto rep = engine::error_study(surrogate, ref, engine::GridSpec(kStrikeT, 41));
    double corner = 0.0;
    for (double K : {83.33, 125.0})
      for (double T : {0.5, 2.0}) {
        const double coarse = fd::price_american_put_fd(100.0, K, T, 0.2, 0.005).price;
        const double fine = fd::price_american_put_fd(100.0, K, T, 0.2, 0.005, fd::FdConfig::refined()).price;
        corner = std::max(corner, std::abs(coarse - fine));
      }
    return std::pair{rep.eps_linf <= 5e-3 && corner < 5e-3,
                     fmt("eps_linf %.3e (limit 5e-3), corner |coarse - refined| %.3e (limit 5e-3)", rep.eps_linf,
                         corner)};
  });

  run(11, "min-call 2-D Fourier vs MC", [&] {
    const auto m = min_call_model();
    mc::McConfig cfg;
    cfg.n_paths = 1000000;
    cfg.seed = 7;
    bool ok = true;
    std::string detail;
    for (auto [K, T] : {std::pair{0.8, 0.5}, std::pair{1.0, 1.0}, std::pair{1.2, 2.0}}) {
      auto mt = m;
      mt.T = T;
      const payoffs::PayoffSpec pay{PayoffKind::MinCall2, K, std::nullopt, {}};
      const double ft = fourier::price_fourier_2d(pay, mt, {0.0, std::log(1.2)}).price;
      const auto mcr = mc::price_mc(pay, mt, {1.0, 1.2}, cfg);
      const double gap = std::abs(ft - mcr.price);
      ok = ok && gap <= mcr.conf_half_width;
      detail += fmt("K=%.1f T=%.1f: ", K, T) + fmt("|diff| %.2e vs half-width %.2e; ", gap, mcr.conf_half_width);
    }
    return std::pair{ok, detail + "1e6 paths"};
  });

  run(12, "online speed-up, M=100", [&] {
    engine::PricerSettings s;
    s.method = engine::Method::Fourier;
    const auto b = min_call_binding();
    const auto surrogate = engine::build_surrogate(b, kMinCallKT, DegreeVector({11, 11}), s);
    const auto ref = engine::make_reference(b, s);
    const auto res = engine::timing_study(surrogate, ref, {100}, std::stod(surrogate.meta().at("offline_ms")), 1);
    const auto& row = res.rows.at(0);
    const double factor = row.reference_ms / row.online_ms;
    return std::pair{factor >= 10.0, fmt("online %.2f ms, reference %.0f ms", row.online_ms, row.reference_ms) +
                                         fmt(", factor %.0f (limit 10)", factor)};
  });

  std::printf("%s: %d criteria failed\n", failures ? "FAILED" : "ALL PASSED", failures);
  return failures ? 1 : 0;
}
