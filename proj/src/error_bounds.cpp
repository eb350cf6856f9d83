#include "pop/error_bounds.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <stdexcept>
#include <string>

namespace pop::bounds {

EllipseParams::EllipseParams(std::vector<double> rho) : rho_(std::move(rho)) {
  if (rho_.empty()) throw std::invalid_argument("ellipse: need at least one axis");
  for (std::size_t i = 0; i < rho_.size(); ++i)
    if (!(rho_[i] > 1.0))
      throw std::invalid_argument("ellipse: rho[" + std::to_string(i) + "] must be > 1");
}

double rho_upper_from_interval(double zeta) {
  if (!(zeta > 1.0)) throw std::invalid_argument("rho_upper_from_interval: zeta must be > 1");
  return zeta + std::sqrt(zeta * zeta - 1.0);
}

double zeta_from_bounds(double lo, double hi) {
  if (!(lo < hi)) throw std::invalid_argument("zeta_from_bounds: need lo < hi");
  return (hi + lo) / (hi - lo);
}

double bound_1d(double V, double rho, std::size_t N) {
  if (!(rho > 1.0)) throw std::invalid_argument("bound_1d: rho must be > 1");
  if (V < 0.0) throw std::invalid_argument("bound_1d: V must be >= 0");
  return 4.0 * V * std::pow(rho, -static_cast<double>(N)) / (rho - 1.0);
}

double bound_multi(const BoundInput& in) {
  const std::size_t d = in.rho.dim();
  if (in.deg.dim() != d) throw std::invalid_argument("bound_multi: dimension mismatch");
  if (in.V < 0.0) throw std::invalid_argument("bound_multi: V must be >= 0");
  double sum = 0.0, prod = 1.0;
  for (std::size_t i = 0; i < d; ++i) {
    sum += std::pow(in.rho[i], -2.0 * static_cast<double>(in.deg[i]));
    prod /= 1.0 - std::pow(in.rho[i], -2.0);
  }
  return std::pow(2.0, 0.5 * static_cast<double>(d) + 1.0) * in.V * std::sqrt(sum * prod);
}

double noise_term(const cheb::DegreeVector& deg, double eps_bar) {
  if (eps_bar < 0.0) throw std::invalid_argument("noise_term: eps_bar must be >= 0");
  double t = std::pow(2.0, static_cast<double>(deg.dim())) * eps_bar;
  for (std::size_t i = 0; i < deg.dim(); ++i) t *= static_cast<double>(deg[i] + 1);
  return t;
}

double noisy_bound(const BoundInput& in, double eps_bar) {
  return bound_multi(in) + noise_term(in.deg, eps_bar);
}

cheb::DegreeVector plan_degrees(double V, const EllipseParams& rho, double target,
                                std::size_t max_per_axis) {
  if (!(target > 0.0)) throw std::invalid_argument("plan_degrees: target must be > 0");
  for (std::size_t n = 0; n <= max_per_axis; ++n) {
    auto deg = cheb::DegreeVector::uniform(rho.dim(), n);
    if (bound_multi({V, rho, deg}) <= target) return deg;
  }
  throw std::runtime_error("plan_degrees: target " + std::to_string(target) +
                           " not reachable with degree <= " + std::to_string(max_per_axis));
}

double estimate_V(const ComplexFunction& f, const cheb::Hyperrectangle& dom,
                  const EllipseParams& rho, std::size_t samples_per_axis) {
  const std::size_t d = dom.dim();
  if (rho.dim() != d) throw std::invalid_argument("estimate_V: dimension mismatch");
  if (samples_per_axis == 0) throw std::invalid_argument("estimate_V: need samples");

  // boundary samples of each mapped ellipse
  std::vector<std::vector<std::complex<double>>> ring(d);
  for (std::size_t i = 0; i < d; ++i) {
    ring[i].resize(samples_per_axis);
    const double mid = 0.5 * (dom.lo(i) + dom.hi(i));
    const double half = 0.5 * dom.width(i);
    for (std::size_t s = 0; s < samples_per_axis; ++s) {
      const double theta =
          2.0 * std::numbers::pi * static_cast<double>(s) / static_cast<double>(samples_per_axis);
      const auto e = std::polar(1.0, theta);
      const auto w = 0.5 * (rho[i] * e + std::conj(e) / rho[i]);
      ring[i][s] = mid + half * w;
    }
  }

  double sup = 0.0;
  std::vector<std::size_t> idx(d, 0);
  std::vector<std::complex<double>> z(d);
  while (true) {
    for (std::size_t i = 0; i < d; ++i) z[i] = ring[i][idx[i]];
    sup = std::max(sup, std::abs(f(z)));
    std::size_t i = d;
    while (i-- > 0) {
      if (++idx[i] < samples_per_axis) break;
      idx[i] = 0;
    }
    if (i == static_cast<std::size_t>(-1)) break;
  }
  return sup;
}

}  // namespace pop::bounds
