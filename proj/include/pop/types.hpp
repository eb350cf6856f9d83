#pragma once

#include <map>
#include <stdexcept>
#include <string>

namespace pop {

struct PriceResult {
  double price = 0.0;
  double conf_half_width = 0.0;  // 95% half-width for Monte Carlo, 0 otherwise
  std::string method;
  std::map<std::string, std::string> diagnostics;
};

/// A reference pricer could not produce a price (non-convergence, bad inputs).
class PricingError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

}  // namespace pop
