#pragma once

#include <array>
#include <cstddef>
#include <functional>

namespace pop::quad {

struct QuadResult {
  double value = 0.0;
  double error = 0.0;  // estimated absolute error
  std::size_t evals = 0;
  bool converged = false;
};

using Fn1 = std::function<double(double)>;
using Fn2 = std::function<double(double, double)>;

/// Globally adaptive Gauss-Kronrod (10/21) on [a, b] until the summed error estimate
/// falls below max(abs_tol, rel_tol |I|) or max_evals is spent.
QuadResult integrate(const Fn1& f, double a, double b, double abs_tol, double rel_tol,
                     std::size_t max_evals);

/// Integral over [0, inf): adaptive on [0, start], then panels [Z, 2Z] are appended while
/// a panel still contributes more than abs_tol / 10.
QuadResult integrate_half_line(const Fn1& f, double abs_tol, double rel_tol, std::size_t max_evals,
                               double start = 200.0, std::size_t max_doublings = 30);

enum class CubatureRule { GK7, GK15 };  // tensor Gauss(3)/Kronrod(7) or Gauss(7)/Kronrod(15)

struct Box {
  double lo1, hi1, lo2, hi2;
};

/// Adaptive tensor-product Gauss-Kronrod cubature; the worst rectangle is split into four.
QuadResult cubature(const Fn2& f, const Box& box, double abs_tol, double rel_tol,
                    std::size_t max_evals, CubatureRule rule = CubatureRule::GK7);

}  // namespace pop::quad
