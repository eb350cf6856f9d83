#pragma once

#include <array>
#include <complex>
#include <optional>
#include <string>
#include <vector>

namespace pop::payoffs {

using cplx = std::complex<double>;

enum class PayoffKind {
  Call,
  Put,
  DigitalDownOut,         // 1{S_T > K}
  AssetOrNothingDownOut,  // S_T 1{S_T > K}
  MinCall2,               // (min(S1, S2) - K)^+
  Basket,
  Lookback,
  Barrier,
  AmericanPut,
};

std::string kind_name(PayoffKind k);
/// Inverse of kind_name; throws std::invalid_argument for unknown names.
PayoffKind parse_kind(const std::string& name);

/// True for the kinds that have a closed-form Fourier transform.
bool has_transform(PayoffKind k);
bool is_univariate_transform(PayoffKind k);

struct PayoffSpec {
  PayoffKind kind = PayoffKind::Call;
  double K = 1.0;
  std::optional<double> barrier;  // Barrier only
  std::vector<double> eta;        // empty for path-dependent kinds
};

/// Default dampening, strictly inside the admissible set. Empty for path kinds.
std::vector<double> default_eta(PayoffKind k);

/// Throws std::invalid_argument when eta breaks the sign constraint of the kind,
/// the strike is not positive, or a barrier is missing/misplaced.
void validate(const PayoffSpec& spec);

/// Spec with its default eta filled in when eta is empty.
PayoffSpec with_default_eta(PayoffSpec spec);

/// Dampened transform f^(z - i eta) of a univariate payoff in log-price.
cplx payoff_ft(const PayoffSpec& spec, cplx z);

/// Dampened transform of the two-asset min-call payoff in log-prices.
cplx min_call_ft(double K, std::array<double, 2> eta, std::array<cplx, 2> z);

/// Streaming summary of one simulated path, one entry per asset.
struct PathSummary {
  std::vector<double> terminal;
  std::vector<double> running_max;
  std::vector<double> running_min;
};

/// Undiscounted payoff of a path-dependent (or plain European) kind.
double path_payoff(const PayoffSpec& spec, const PathSummary& path);

}  // namespace pop::payoffs
