#include "pop/payoffs.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <stdexcept>

namespace pop::payoffs {

namespace {

constexpr cplx I{0.0, 1.0};

struct KindName {
  PayoffKind kind;
  const char* name;
};

constexpr KindName kKindNames[] = {
    {PayoffKind::Call, "call"},
    {PayoffKind::Put, "put"},
    {PayoffKind::DigitalDownOut, "digital"},
    {PayoffKind::AssetOrNothingDownOut, "asset_or_nothing"},
    {PayoffKind::MinCall2, "min_call"},
    {PayoffKind::Basket, "basket"},
    {PayoffKind::Lookback, "lookback"},
    {PayoffKind::Barrier, "barrier"},
    {PayoffKind::AmericanPut, "american_put"},
};

cplx strike_power(double K, cplx w) { return std::exp(w * std::log(K)); }

void check_pole(cplx d) {
  if (std::abs(d) < 1e-300) throw std::domain_error("payoff transform: evaluation at a pole");
}

double mean(const std::vector<double>& v) {
  return std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
}

}  // namespace

std::string kind_name(PayoffKind k) {
  for (const auto& e : kKindNames)
    if (e.kind == k) return e.name;
  return "unknown";
}

PayoffKind parse_kind(const std::string& name) {
  for (const auto& e : kKindNames)
    if (name == e.name) return e.kind;
  throw std::invalid_argument("unknown payoff kind '" + name + "'");
}

bool is_univariate_transform(PayoffKind k) {
  return k == PayoffKind::Call || k == PayoffKind::Put || k == PayoffKind::DigitalDownOut ||
         k == PayoffKind::AssetOrNothingDownOut;
}

bool has_transform(PayoffKind k) { return is_univariate_transform(k) || k == PayoffKind::MinCall2; }

std::vector<double> default_eta(PayoffKind k) {
  switch (k) {
    case PayoffKind::Call: return {-2.0};
    case PayoffKind::Put: return {1.0};
    case PayoffKind::DigitalDownOut: return {-1.0};
    case PayoffKind::AssetOrNothingDownOut: return {-2.0};
    case PayoffKind::MinCall2: return {-2.0, -2.0};
    default: return {};
  }
}

void validate(const PayoffSpec& s) {
  if (!(s.K > 0.0) || !std::isfinite(s.K)) throw std::invalid_argument("payoff: strike K must be > 0");
  if (s.kind == PayoffKind::Barrier) {
    if (!s.barrier || !(*s.barrier > 0.0))
      throw std::invalid_argument("payoff: barrier option needs a positive barrier level");
  } else if (s.barrier) {
    throw std::invalid_argument("payoff: barrier level given for a " + kind_name(s.kind) + " payoff");
  }
  if (!has_transform(s.kind)) {
    if (!s.eta.empty())
      throw std::invalid_argument("payoff: " + kind_name(s.kind) + " carries no dampening eta");
    return;
  }
  const std::size_t want = s.kind == PayoffKind::MinCall2 ? 2 : 1;
  if (s.eta.size() != want)
    throw std::invalid_argument("payoff: " + kind_name(s.kind) + " needs " + std::to_string(want) +
                                " eta component(s)");
  for (double e : s.eta) {
    bool ok = false;
    switch (s.kind) {
      case PayoffKind::Call:
      case PayoffKind::AssetOrNothingDownOut:
      case PayoffKind::MinCall2: ok = e < -1.0; break;
      case PayoffKind::Put: ok = e > 0.0; break;
      case PayoffKind::DigitalDownOut: ok = e < 0.0; break;
      default: break;
    }
    if (!ok || !std::isfinite(e))
      throw std::invalid_argument("payoff: eta=" + std::to_string(e) + " not admissible for " +
                                  kind_name(s.kind));
  }
}

PayoffSpec with_default_eta(PayoffSpec spec) {
  if (spec.eta.empty()) spec.eta = default_eta(spec.kind);
  return spec;
}

cplx payoff_ft(const PayoffSpec& s, cplx z) {
  if (!is_univariate_transform(s.kind) || s.eta.size() != 1)
    throw std::invalid_argument("payoff_ft: needs a univariate payoff with one eta");
  const cplx a = I * z + s.eta[0];
  switch (s.kind) {
    case PayoffKind::Call:
    case PayoffKind::Put:
      check_pole(a * (a + 1.0));
      return strike_power(s.K, a + 1.0) / (a * (a + 1.0));
    case PayoffKind::DigitalDownOut:
      check_pole(a);
      return -strike_power(s.K, a) / a;
    case PayoffKind::AssetOrNothingDownOut:
      check_pole(a + 1.0);
      return -strike_power(s.K, a + 1.0) / (a + 1.0);
    default: break;
  }
  throw std::logic_error("payoff_ft: unreachable");
}

// Integrate e^{a1 x1 + a2 x2} (min(e^x1, e^x2) - K)^+ separately over x1 < x2 and x2 < x1.
cplx min_call_ft(double K, std::array<double, 2> eta, std::array<cplx, 2> z) {
  if (!(K > 0.0)) throw std::invalid_argument("min_call_ft: K must be > 0");
  if (!(eta[0] < -1.0 && eta[1] < -1.0))
    throw std::invalid_argument("min_call_ft: eta components must be < -1");
  const cplx a1 = I * z[0] + eta[0];
  const cplx a2 = I * z[1] + eta[1];
  const cplx s = a1 + a2;
  check_pole(a1 * a2 * (s + 1.0));
  return -strike_power(K, s + 1.0) / (a1 * a2 * (s + 1.0));
}

double path_payoff(const PayoffSpec& s, const PathSummary& p) {
  if (p.terminal.empty()) throw std::invalid_argument("path_payoff: empty path summary");
  switch (s.kind) {
    case PayoffKind::Call: return std::max(p.terminal[0] - s.K, 0.0);
    case PayoffKind::Put:
    case PayoffKind::AmericanPut: return std::max(s.K - p.terminal[0], 0.0);
    case PayoffKind::DigitalDownOut: return p.terminal[0] > s.K ? 1.0 : 0.0;
    case PayoffKind::AssetOrNothingDownOut: return p.terminal[0] > s.K ? p.terminal[0] : 0.0;
    case PayoffKind::MinCall2: {
      if (p.terminal.size() < 2) throw std::invalid_argument("path_payoff: min-call needs 2 assets");
      return std::max(std::min(p.terminal[0], p.terminal[1]) - s.K, 0.0);
    }
    case PayoffKind::Basket: return std::max(mean(p.terminal) - s.K, 0.0);
    case PayoffKind::Lookback: return std::max(mean(p.running_max) - s.K, 0.0);
    case PayoffKind::Barrier: {
      const double lo = *std::min_element(p.running_min.begin(), p.running_min.end());
      if (!s.barrier || lo < *s.barrier) return 0.0;
      return std::max(mean(p.terminal) - s.K, 0.0);
    }
  }
  throw std::logic_error("path_payoff: unreachable");
}

}  // namespace pop::payoffs
