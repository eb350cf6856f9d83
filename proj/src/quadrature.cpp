#include "pop/quadrature.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <stdexcept>
#include <vector>

namespace pop::quad {

namespace {

constexpr double kEps = std::numeric_limits<double>::epsilon();

// Full symmetric node set on [-1, 1] with Kronrod weights and embedded Gauss weights
// (zero where the node is Kronrod-only).
struct Rule {
  std::vector<double> x, wk, wg;
};

Rule symmetric_rule(const double* xh, const double* wkh, const double* wgh, std::size_t half) {
  // xh[0..half-1] positive nodes descending, xh[half] == 0
  Rule r;
  for (std::size_t i = 0; i < half; ++i) {
    r.x.push_back(-xh[i]);
    r.wk.push_back(wkh[i]);
    r.wg.push_back(wgh[i]);
  }
  r.x.push_back(0.0);
  r.wk.push_back(wkh[half]);
  r.wg.push_back(wgh[half]);
  for (std::size_t i = half; i-- > 0;) {
    r.x.push_back(xh[i]);
    r.wk.push_back(wkh[i]);
    r.wg.push_back(wgh[i]);
  }
  return r;
}

const Rule& gk21() {
  static const Rule r = [] {
    const double x[] = {0.995657163025808080735527280689003, 0.973906528517171720077964012084452,
                        0.930157491355708226001207180059508, 0.865063366688984510732096688423493,
                        0.780817726586416897063717578345042, 0.679409568299024406234327365114874,
                        0.562757134668604683339000099272694, 0.433395394129247190799265943165784,
                        0.294392862701460198131126603103866, 0.148874338981631210884826001129720,
                        0.0};
    const double wk[] = {0.011694638867371874278064396062192, 0.032558162307964727478818972459390,
                         0.054755896574351996031381300244580, 0.075039674810919952767043140916190,
                         0.093125454583697605535065465083366, 0.109387158802297641899210590325805,
                         0.123491976262065851077208745114580, 0.134709217311473325928054001771707,
                         0.142775938577060080797094273138717, 0.147739104901338491374841515972068,
                         0.149445554002916905664936468389821};
    const double wg[] = {0.0, 0.066671344308688137593568809893332,
                         0.0, 0.149451349150580593145776339657697,
                         0.0, 0.219086362515982043995534934228163,
                         0.0, 0.269266719309996355091226921569469,
                         0.0, 0.295524224714752870173892994651338,
                         0.0};
    return symmetric_rule(x, wk, wg, 10);
  }();
  return r;
}

const Rule& gk15() {
  static const Rule r = [] {
    const double x[] = {0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
                        0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
                        0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
                        0.207784955007898467600689403773245, 0.0};
    const double wk[] = {0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
                         0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
                         0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
                         0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
    const double wg[] = {0.0, 0.129484966168869693270611432679082,
                         0.0, 0.279705391489276667901467771423780,
                         0.0, 0.381830050505118944950369775488975,
                         0.0, 0.417959183673469387755102040816327};
    return symmetric_rule(x, wk, wg, 7);
  }();
  return r;
}

const Rule& gk7() {
  static const Rule r = [] {
    const double x[] = {0.960491268708020283423507092629080, 0.774596669241483377035853079956480,
                        0.434243749346802558002071502844628, 0.0};
    const double wk[] = {0.104656226026467265193823857192073, 0.268488089868333440728569280666710,
                         0.401397414775962222905051818618432, 0.450916538658474142345110087045571};
    const double wg[] = {0.0, 0.555555555555555555555555555555556, 0.0,
                         0.888888888888888888888888888888889};
    return symmetric_rule(x, wk, wg, 3);
  }();
  return r;
}

struct Segment {
  double a, b, value, error;
  bool operator<(const Segment& o) const { return error < o.error; }
};

// Exact totals; the running sums drift under cancellation.
template <class T>
void resum(const std::vector<T>& heap, double& value, double& error) {
  value = 0.0;
  error = 0.0;
  for (const auto& s : heap) {
    value += s.value;
    error += s.error;
  }
}

// QUADPACK-style estimate: scaled Kronrod-Gauss difference with a roundoff floor.
Segment gk21_segment(const Fn1& f, double a, double b) {
  const Rule& r = gk21();
  const double c = 0.5 * (a + b), h = 0.5 * (b - a);
  std::array<double, 21> fv;
  double k = 0.0, g = 0.0, kabs = 0.0;
  for (std::size_t i = 0; i < 21; ++i) {
    fv[i] = f(c + h * r.x[i]);
    k += r.wk[i] * fv[i];
    g += r.wg[i] * fv[i];
    kabs += r.wk[i] * std::abs(fv[i]);
  }
  const double mean = 0.5 * k;
  double asc = 0.0;
  for (std::size_t i = 0; i < 21; ++i) asc += r.wk[i] * std::abs(fv[i] - mean);
  const double ah = std::abs(h);
  double err = std::abs((k - g) * h);
  asc *= ah;
  kabs *= ah;
  if (asc != 0.0 && err != 0.0) err = asc * std::min(1.0, std::pow(200.0 * err / asc, 1.5));
  if (kabs > std::numeric_limits<double>::min() / (50.0 * kEps)) err = std::max(50.0 * kEps * kabs, err);
  if (!std::isfinite(k)) throw std::domain_error("quadrature: integrand is not finite");
  return {a, b, k * h, err};
}

}  // namespace

QuadResult integrate(const Fn1& f, double a, double b, double abs_tol, double rel_tol,
                     std::size_t max_evals) {
  if (!(abs_tol > 0.0) || rel_tol < 0.0) throw std::invalid_argument("integrate: bad tolerance");
  if (max_evals < 21) throw std::invalid_argument("integrate: max_evals must be >= 21");
  std::vector<Segment> heap{gk21_segment(f, a, b)};
  QuadResult res;
  res.evals = 21;
  double value = heap[0].value, error = heap[0].error;
  while (true) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
      resum(heap, value, error);
      if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
        res.converged = true;
        break;
      }
    }
    if (res.evals + 42 > max_evals) break;
    std::pop_heap(heap.begin(), heap.end());
    const Segment worst = heap.back();
    const double mid = 0.5 * (worst.a + worst.b);
    if (!(mid > std::min(worst.a, worst.b) && mid < std::max(worst.a, worst.b))) {
      std::push_heap(heap.begin(), heap.end());
      break;
    }
    heap.pop_back();
    const Segment l = gk21_segment(f, worst.a, mid), r = gk21_segment(f, mid, worst.b);
    res.evals += 42;
    for (const auto& s : {l, r}) {
      heap.push_back(s);
      std::push_heap(heap.begin(), heap.end());
    }
    value += l.value + r.value - worst.value;
    error += l.error + r.error - worst.error;
  }
  resum(heap, value, error);
  res.value = value;
  res.error = error;
  return res;
}

QuadResult integrate_half_line(const Fn1& f, double abs_tol, double rel_tol, std::size_t max_evals,
                               double start, std::size_t max_doublings) {
  if (!(start > 0.0)) throw std::invalid_argument("integrate_half_line: start must be > 0");
  QuadResult total = integrate(f, 0.0, start, abs_tol, rel_tol, max_evals);
  double z = start;
  for (std::size_t k = 0; k < max_doublings; ++k) {
    const std::size_t left = max_evals > total.evals ? max_evals - total.evals : 0;
    if (left < 21) {
      total.converged = false;
      break;
    }
    const QuadResult panel = integrate(f, z, 2.0 * z, abs_tol, rel_tol, left);
    total.value += panel.value;
    total.error += panel.error;
    total.evals += panel.evals;
    total.converged = total.converged && panel.converged;
    if (std::abs(panel.value) < abs_tol / 10.0) return total;
    z *= 2.0;
  }
  total.converged = false;
  return total;
}

// ---------------------------------------------------------------------------

namespace {

struct Cell {
  Box box;
  double value, error;
  bool operator<(const Cell& o) const { return error < o.error; }
};

Cell tensor_cell(const Fn2& f, const Box& b, const Rule& r) {
  const double c1 = 0.5 * (b.lo1 + b.hi1), h1 = 0.5 * (b.hi1 - b.lo1);
  const double c2 = 0.5 * (b.lo2 + b.hi2), h2 = 0.5 * (b.hi2 - b.lo2);
  double k = 0.0, g = 0.0;
  const std::size_t n = r.x.size();
  for (std::size_t i = 0; i < n; ++i) {
    const double x1 = c1 + h1 * r.x[i];
    double ki = 0.0, gi = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
      const double v = f(x1, c2 + h2 * r.x[j]);
      ki += r.wk[j] * v;
      gi += r.wg[j] * v;
    }
    k += r.wk[i] * ki;
    g += r.wg[i] * gi;
  }
  const double area = h1 * h2;
  if (!std::isfinite(k)) throw std::domain_error("cubature: integrand is not finite");
  return {b, k * area, std::abs(k - g) * area};
}

}  // namespace

QuadResult cubature(const Fn2& f, const Box& box, double abs_tol, double rel_tol,
                    std::size_t max_evals, CubatureRule rule) {
  if (!(abs_tol > 0.0) || rel_tol < 0.0) throw std::invalid_argument("cubature: bad tolerance");
  if (!(box.lo1 < box.hi1 && box.lo2 < box.hi2)) throw std::invalid_argument("cubature: empty box");
  const Rule& r = rule == CubatureRule::GK7 ? gk7() : gk15();
  const std::size_t per_cell = r.x.size() * r.x.size();
  if (max_evals < per_cell) throw std::invalid_argument("cubature: max_evals below one rule application");

  std::vector<Cell> heap{tensor_cell(f, box, r)};
  QuadResult res;
  res.evals = per_cell;
  double value = heap[0].value, error = heap[0].error;
  while (true) {
    if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
      resum(heap, value, error);
      if (error <= std::max(abs_tol, rel_tol * std::abs(value))) {
        res.converged = true;
        break;
      }
    }
    if (res.evals + 4 * per_cell > max_evals) break;
    std::pop_heap(heap.begin(), heap.end());
    const Cell worst = heap.back();
    heap.pop_back();
    const Box& b = worst.box;
    const double m1 = 0.5 * (b.lo1 + b.hi1), m2 = 0.5 * (b.lo2 + b.hi2);
    const Box quarters[4] = {{b.lo1, m1, b.lo2, m2},
                             {m1, b.hi1, b.lo2, m2},
                             {b.lo1, m1, m2, b.hi2},
                             {m1, b.hi1, m2, b.hi2}};
    value -= worst.value;
    error -= worst.error;
    for (const auto& q : quarters) {
      heap.push_back(tensor_cell(f, q, r));
      std::push_heap(heap.begin(), heap.end());
      value += heap.back().value;
      error += heap.back().error;
    }
    res.evals += 4 * per_cell;
  }
  resum(heap, value, error);
  res.value = value;
  res.error = error;
  return res;
}

}  // namespace pop::quad
