#include "pop/pricer_fd.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>
#include <stdexcept>
#include <vector>

namespace pop::fd {

namespace {

std::size_t auto_size(std::size_t given, std::size_t factor, double T) {
  if (given > 0) return given;
  return static_cast<std::size_t>(std::ceil(static_cast<double>(factor) * std::max(1.0, T) - 1e-9));
}

// Mean of K (1 - e^x)^+ over [a, b].
double put_cell_average(double K, double a, double b) {
  const double m = std::min(b, 0.0);
  if (a >= m) return 0.0;
  return K * ((m - a) - (std::exp(m) - std::exp(a))) / (b - a);
}

PriceResult solve(double S0, double K, double T, double sigma, double r, const FdConfig& cfg,
                  bool american) {
  if (!(S0 > 0.0 && K > 0.0 && T > 0.0 && sigma > 0.0) || !std::isfinite(r))
    throw std::invalid_argument("fd: S0, K, T, sigma must be positive");
  const std::size_t nt = auto_size(cfg.n_time, cfg.grid_factor, T);
  const std::size_t nx = auto_size(cfg.n_space, cfg.grid_factor, T);
  if (nt < 10 || nx < 10) throw std::invalid_argument("fd: grid needs at least 10 intervals per axis");

  const double x0 = std::log(S0 / K);
  const double half =
      cfg.half_width > 0.0 ? cfg.half_width : 4.0 * sigma * std::sqrt(T) + std::abs(r) * T;
  const double dx = 2.0 * half / static_cast<double>(nx);
  // a spot-centred grid keeps the spot on a node for odd interval counts too
  const double lo = cfg.center == GridCenter::Spot
                        ? x0 - dx * static_cast<double>(nx / 2)
                        : -half;
  const double hi = lo + dx * static_cast<double>(nx);
  if (x0 < lo || x0 > hi) throw std::invalid_argument("fd: spot lies outside the space grid");
  const double dt = T / static_cast<double>(nt);

  std::vector<double> x(nx + 1), obstacle(nx + 1), u(nx + 1);
  for (std::size_t i = 0; i <= nx; ++i) {
    x[i] = lo + dx * static_cast<double>(i);
    obstacle[i] = K * std::max(1.0 - std::exp(x[i]), 0.0);
    u[i] = cfg.cell_average_payoff && i > 0 && i < nx
               ? put_cell_average(K, x[i] - 0.5 * dx, x[i] + 0.5 * dx)
               : obstacle[i];
  }

  // L u = a u_{i-1} + b u_i + c u_{i+1}
  const double diff = 0.5 * sigma * sigma / (dx * dx);
  const double conv = (r - 0.5 * sigma * sigma) / (2.0 * dx);
  const double la = diff - conv, lb = -2.0 * diff - r, lc = diff + conv;

  std::vector<double> rhs(nx + 1), diag(nx + 1), sup(nx + 1);
  double tau = 0.0;
  std::size_t implicit_left = 2 * cfg.rannacher_steps;
  std::size_t cn_left = nt - std::min(nt, cfg.rannacher_steps);
  while (implicit_left > 0 || cn_left > 0) {
    const bool implicit = implicit_left > 0;
    const double h = implicit ? 0.5 * dt : dt;
    const double theta = implicit ? 1.0 : 0.5;
    if (implicit) --implicit_left; else --cn_left;
    tau += h;

    const double lo_bc = american ? obstacle[0] : K * std::exp(-r * tau) - std::exp(x[0]) * K;
    const double hi_bc = american ? obstacle[nx] : 0.0;
    const double ea = -theta * h * la, eb = 1.0 - theta * h * lb, ec = -theta * h * lc;
    const double ex = (1.0 - theta) * h;
    for (std::size_t i = 1; i < nx; ++i)
      rhs[i] = u[i] + ex * (la * u[i - 1] + lb * u[i] + lc * u[i + 1]);
    rhs[nx - 1] -= ec * hi_bc;

    // eliminate from the top (high S) down: u_i = (rhs_i - ea u_{i-1}) / diag_i
    diag[nx - 1] = eb;
    for (std::size_t i = nx - 1; i-- > 1;) {
      const double m = ec / diag[i + 1];
      diag[i] = eb - m * ea;
      rhs[i] -= m * rhs[i + 1];
    }
    // substitute upward from the exercise region, projecting on the obstacle
    u[0] = lo_bc;
    for (std::size_t i = 1; i < nx; ++i) {
      double v = (rhs[i] - ea * u[i - 1]) / diag[i];
      if (american) v = std::max(v, obstacle[i]);
      u[i] = v;
    }
    u[nx] = hi_bc;
  }

  if (american)
    for (std::size_t i = 0; i <= nx; ++i)
      if (u[i] < obstacle[i] - 1e-12 * K) throw std::logic_error("fd: obstacle violated after solve");

  const double pos = (x0 - lo) / dx;
  const std::size_t i0 = std::min(static_cast<std::size_t>(std::floor(pos)), nx - 1);
  const double w = pos - static_cast<double>(i0);
  PriceResult res;
  res.price = (1.0 - w) * u[i0] + w * u[i0 + 1];
  res.method = american ? "fd_american" : "fd_european";
  std::ostringstream dom;
  dom << "[" << lo << ", " << hi << "]";
  res.diagnostics["log_moneyness_domain"] = dom.str();
  res.diagnostics["boundary"] = american ? "put payoff at both ends" : "discounted put forward / 0";
  res.diagnostics["n_time"] = std::to_string(nt);
  res.diagnostics["n_space"] = std::to_string(nx);
  return res;
}

}  // namespace

FdConfig FdConfig::refined() {
  FdConfig c;
  c.grid_factor = 1000;
  return c;
}

PriceResult price_american_put_fd(double S0, double K, double T, double sigma, double r,
                                  const FdConfig& cfg) {
  return solve(S0, K, T, sigma, r, cfg, true);
}

PriceResult price_european_put_fd(double S0, double K, double T, double sigma, double r,
                                  const FdConfig& cfg) {
  return solve(S0, K, T, sigma, r, cfg, false);
}

}  // namespace pop::fd
