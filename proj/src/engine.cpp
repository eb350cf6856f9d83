#include "pop/engine.hpp"

#include <chrono>
#include <cmath>
#include <set>
#include <sstream>
#include <stdexcept>

#include "pop/parallel.hpp"

namespace pop::engine {

namespace {

using Clock = std::chrono::steady_clock;

double ms_since(Clock::time_point t0) {
  return std::chrono::duration<double, std::milli>(Clock::now() - t0).count();
}

std::string fmt_point(std::span<const double> p) {
  std::ostringstream os;
  os.precision(10);
  os << "(";
  for (std::size_t i = 0; i < p.size(); ++i) os << (i ? ", " : "") << p[i];
  os << ")";
  return os.str();
}

double bs_sigma(const models::ModelSpec& m, const char* who) {
  const auto* bs = std::get_if<models::BsParams>(&m);
  if (!bs || bs->dim() != 1)
    throw PricingError(std::string(who) + " needs a univariate Black-Scholes model");
  return std::sqrt(bs->cov(0, 0));
}

void set_model_field(models::ModelSpec& m, const std::string& field, double value) {
  bool done = false;
  auto set = [&](const char* name, double& slot) {
    if (field == name) {
      slot = value;
      done = true;
    }
  };
  std::visit(
      [&](auto& p) {
        using P = std::decay_t<decltype(p)>;
        set("T", p.T);
        set("r", p.r);
        if constexpr (std::is_same_v<P, models::BsParams>) {
          if (field == "sigma") {
            if (p.dim() != 1) throw std::invalid_argument("slot sigma needs a univariate BS model");
            p.cov(0, 0) = value * value;
            done = true;
          } else if (field.size() == 5 && field.rfind("cov", 0) == 0) {
            const auto i = static_cast<Eigen::Index>(field[3] - '0');
            const auto j = static_cast<Eigen::Index>(field[4] - '0');
            if (i < 0 || j < 0 || i >= p.cov.rows() || j >= p.cov.rows())
              throw std::invalid_argument("covariance index out of range in '" + field + "'");
            p.cov(i, j) = p.cov(j, i) = value;
            done = true;
          }
        } else if constexpr (std::is_same_v<P, models::MertonParams>) {
          set("sigma", p.sigma);
          set("alpha", p.alpha);
          set("beta", p.beta);
          set("lambda", p.lambda);
        } else if constexpr (std::is_same_v<P, models::CgmyParams>) {
          set("C", p.C);
          set("G", p.G);
          set("M", p.M);
          set("Y", p.Y);
        } else if constexpr (std::is_same_v<P, models::HestonParams>) {
          set("v0", p.v0);
          set("kappa", p.kappa);
          set("theta", p.theta);
          set("sigma", p.sigma);
          set("rho", p.rho);
        } else if constexpr (std::is_same_v<P, models::Heston2Params>) {
          set("v0", p.v0);
          set("kappa", p.kappa);
          set("theta", p.theta);
          set("sigma1", p.sigma1);
          set("sigma2", p.sigma2);
          set("sigma3", p.sigma3);
          set("rho12", p.rho12);
          set("rho13", p.rho13);
          set("rho23", p.rho23);
        }
      },
      m);
  if (!done)
    throw std::invalid_argument("model '" + models::family_name(m) + "' has no field '" + field + "'");
}

}  // namespace

std::string method_name(Method m) {
  switch (m) {
    case Method::Fourier: return "fourier";
    case Method::MonteCarlo: return "mc";
    case Method::FiniteDifference: return "fd";
    case Method::ClosedForm: return "closed_form";
  }
  return "unknown";
}

Method parse_method(const std::string& name) {
  for (Method m : {Method::Fourier, Method::MonteCarlo, Method::FiniteDifference, Method::ClosedForm})
    if (method_name(m) == name) return m;
  throw std::invalid_argument("unknown pricer method '" + name + "'");
}

PriceResult reference_price(const Problem& pb, const PricerSettings& s) {
  using payoffs::PayoffKind;
  const auto& pay = pb.payoff;
  switch (s.method) {
    case Method::Fourier:
      if (pay.kind == PayoffKind::MinCall2) {
        if (pb.spot.size() != 2) throw PricingError("min-call needs two spots");
        return fourier::price_fourier_2d(pay, pb.model, {std::log(pb.spot[0]), std::log(pb.spot[1])},
                                         s.quad_2d);
      }
      if (pb.spot.size() != 1) throw PricingError("univariate Fourier pricing needs one spot");
      return fourier::price_fourier_1d(pay, pb.model, std::log(pb.spot[0]), s.quad);
    case Method::MonteCarlo:
      return mc::price_mc(pay, pb.model, pb.spot, s.mc);
    case Method::FiniteDifference: {
      const double sigma = bs_sigma(pb.model, "finite differences");
      const double T = models::maturity(pb.model), r = models::rate(pb.model);
      if (pb.spot.size() != 1) throw PricingError("finite differences need one spot");
      if (pay.kind == PayoffKind::AmericanPut)
        return fd::price_american_put_fd(pb.spot[0], pay.K, T, sigma, r, s.fd);
      if (pay.kind == PayoffKind::Put) return fd::price_european_put_fd(pb.spot[0], pay.K, T, sigma, r, s.fd);
      throw PricingError("finite differences price puts only");
    }
    case Method::ClosedForm: {
      const double sigma = bs_sigma(pb.model, "closed form");
      const double T = models::maturity(pb.model), r = models::rate(pb.model);
      if (pb.spot.size() != 1) throw PricingError("closed form needs one spot");
      PriceResult res;
      res.method = "closed_form";
      const double S = pb.spot[0];
      switch (pay.kind) {
        case PayoffKind::Call: res.price = fourier::bs_call_closed_form(S, pay.K, T, sigma, r); break;
        case PayoffKind::Put: res.price = fourier::bs_put_closed_form(S, pay.K, T, sigma, r); break;
        case PayoffKind::DigitalDownOut:
          res.price = fourier::bs_digital_closed_form(S, pay.K, T, sigma, r);
          break;
        case PayoffKind::AssetOrNothingDownOut:
          res.price = fourier::bs_asset_or_nothing_closed_form(S, pay.K, T, sigma, r);
          break;
        default: throw PricingError("no closed form for " + payoffs::kind_name(pay.kind));
      }
      return res;
    }
  }
  throw std::logic_error("reference_price: unreachable");
}

void apply_slot(Problem& pb, const std::string& slot, double value) {
  if (!std::isfinite(value)) throw std::invalid_argument("slot '" + slot + "': value not finite");
  if (slot == "moneyness") {
    for (auto& s : pb.spot) s = value * pb.payoff.K;
  } else if (slot == "K") {
    pb.payoff.K = value;
  } else if (slot == "S0") {
    for (auto& s : pb.spot) s = value;
  } else if (slot == "T") {
    models::set_maturity(pb.model, value);
  } else if (slot == "r") {
    models::set_rate(pb.model, value);
  } else if (slot == "sigma") {
    if (auto* h2 = std::get_if<models::Heston2Params>(&pb.model))
      h2->sigma3 = value;
    else
      set_model_field(pb.model, "sigma", value);
  } else if (slot == "v0" || slot == "rho" || slot == "kappa" || slot == "theta") {
    if (slot == "rho" && std::holds_alternative<models::Heston2Params>(pb.model))
      throw std::invalid_argument("slot rho is ambiguous for heston2; use model.rho12/13/23");
    if (!std::holds_alternative<models::HestonParams>(pb.model) &&
        !std::holds_alternative<models::Heston2Params>(pb.model))
      throw std::invalid_argument("slot '" + slot + "' needs a Heston model");
    set_model_field(pb.model, slot, value);
  } else if (slot.rfind("model.", 0) == 0) {
    set_model_field(pb.model, slot.substr(6), value);
  } else {
    throw std::invalid_argument("unknown parameter slot '" + slot + "'");
  }
}

void ParamBinding::validate() const {
  std::set<std::string> names, slots;
  for (const auto& [name, slot] : axes) {
    if (!names.insert(name).second) throw std::invalid_argument("duplicate axis '" + name + "'");
    if (!slots.insert(slot).second) throw std::invalid_argument("slot '" + slot + "' bound twice");
    Problem probe = base;
    apply_slot(probe, slot, slot == "moneyness" || slot == "K" || slot == "S0" || slot == "T" ? 1.0 : 0.1);
  }
}

std::vector<std::string> ParamBinding::axis_names() const {
  std::vector<std::string> out;
  for (const auto& a : axes) out.push_back(a.first);
  return out;
}

Problem ParamBinding::bind(std::span<const double> values) const {
  if (values.size() != axes.size())
    throw std::invalid_argument("binding: expected " + std::to_string(axes.size()) + " values");
  Problem pb = base;
  // moneyness is relative to the final strike
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (axes[i].second != "moneyness") apply_slot(pb, axes[i].second, values[i]);
  for (std::size_t i = 0; i < axes.size(); ++i)
    if (axes[i].second == "moneyness") apply_slot(pb, axes[i].second, values[i]);
  return pb;
}

ReferencePricer make_reference(const ParamBinding& binding, const PricerSettings& settings) {
  binding.validate();
  return [binding, settings](std::span<const double> p) {
    return reference_price(binding.bind(p), settings).price;
  };
}

cheb::Interpolant build_surrogate(const ReferencePricer& reference, const cheb::Hyperrectangle& dom,
                                  const cheb::DegreeVector& deg, std::size_t threads, cheb::Meta meta) {
  const auto t0 = Clock::now();
  const auto nodes = cheb::tensor_nodes(deg, dom);
  std::vector<double> values(nodes.size());
  parallel_for(nodes.size(), resolve_threads(threads), [&](std::size_t i) {
    double v;
    try {
      v = reference(nodes[i]);
    } catch (const std::exception& e) {
      throw NodePricingError("node " + fmt_point(nodes[i]) + ": " + e.what(), nodes[i]);
    }
    if (!std::isfinite(v)) throw NodePricingError("node " + fmt_point(nodes[i]) + ": non-finite price", nodes[i]);
    values[i] = v;
  });
  auto interp = cheb::build_interpolant(dom, deg, values, {});
  std::ostringstream ms;
  ms << ms_since(t0);
  meta["offline_ms"] = ms.str();
  meta["node_count"] = std::to_string(nodes.size());
  return interp.with_meta(meta);
}

cheb::Interpolant build_surrogate(const ParamBinding& binding, const cheb::Hyperrectangle& dom,
                                  const cheb::DegreeVector& deg, const PricerSettings& settings,
                                  std::size_t threads) {
  if (binding.axes.size() != dom.dim())
    throw std::invalid_argument("build_surrogate: binding and domain dimensions differ");
  cheb::Meta meta{{"pricer", method_name(settings.method)},
                  {"model", models::family_name(binding.base.model)},
                  {"payoff", payoffs::kind_name(binding.base.payoff.kind)}};
  std::string slots;
  for (const auto& a : binding.axes) slots += (slots.empty() ? "" : ",") + a.first + ":" + a.second;
  meta["binding"] = slots;
  if (settings.method == Method::MonteCarlo) {
    meta["mc_paths"] = std::to_string(settings.mc.n_paths);
    meta["mc_seed"] = std::to_string(settings.mc.seed);
  }
  return build_surrogate(make_reference(binding, settings), dom, deg, threads, meta);
}

// ---------------------------------------------------------------------------

GridSpec::GridSpec(cheb::Hyperrectangle dom, std::size_t points_per_axis)
    : GridSpec(dom, std::vector<std::size_t>(dom.dim(), points_per_axis)) {}

GridSpec::GridSpec(cheb::Hyperrectangle dom, std::vector<std::size_t> pts)
    : domain(std::move(dom)), points(std::move(pts)) {
  if (points.size() != domain.dim()) throw std::invalid_argument("grid: points/domain dimension mismatch");
  for (auto n : points)
    if (n < 2) throw std::invalid_argument("grid: need at least 2 points per axis");
}

std::size_t GridSpec::size() const {
  std::size_t n = 1;
  for (auto p : points) n *= p;
  return n;
}

std::vector<cheb::Point> GridSpec::points_list() const {
  const std::size_t d = domain.dim();
  std::vector<cheb::Point> out;
  out.reserve(size());
  std::vector<std::size_t> idx(d, 0);
  for (std::size_t k = 0; k < size(); ++k) {
    cheb::Point p(d);
    for (std::size_t i = 0; i < d; ++i)
      p[i] = idx[i] + 1 == points[i]
                 ? domain.hi(i)
                 : domain.lo(i) + domain.width(i) * static_cast<double>(idx[i]) /
                                      static_cast<double>(points[i] - 1);
    out.push_back(std::move(p));
    for (std::size_t i = d; i-- > 0;) {
      if (++idx[i] < points[i]) break;
      idx[i] = 0;
    }
  }
  return out;
}

double GridSpec::cell_measure() const {
  double m = 1.0;
  for (std::size_t i = 0; i < points.size(); ++i) m *= domain.width(i) / static_cast<double>(points[i] - 1);
  return m;
}

GridReference evaluate_on_grid(const ReferencePricer& reference, const GridSpec& grid, std::size_t threads) {
  const auto t0 = Clock::now();
  const auto pts = grid.points_list();
  GridReference out;
  out.values.resize(pts.size());
  parallel_for(pts.size(), resolve_threads(threads), [&](std::size_t i) {
    try {
      out.values[i] = reference(pts[i]);
    } catch (const std::exception& e) {
      throw NodePricingError("grid point " + fmt_point(pts[i]) + ": " + e.what(), pts[i]);
    }
  });
  out.elapsed_ms = ms_since(t0);
  return out;
}

ErrorReport error_study(const cheb::Interpolant& surrogate, const GridSpec& grid,
                        const GridReference& reference) {
  const auto pts = grid.points_list();
  if (reference.values.size() != pts.size())
    throw std::invalid_argument("error_study: reference size does not match the grid");
  ErrorReport rep;
  rep.grid_points = pts.size();
  rep.reference_ms = reference.elapsed_ms;
  const auto t0 = Clock::now();
  std::vector<double> approx(pts.size());
  for (std::size_t i = 0; i < pts.size(); ++i) approx[i] = surrogate.evaluate(pts[i]);
  rep.online_ms = ms_since(t0);
  double sum2 = 0.0;
  std::size_t arg = 0;
  for (std::size_t i = 0; i < pts.size(); ++i) {
    const double e = std::abs(approx[i] - reference.values[i]);
    sum2 += e * e;
    if (e > rep.eps_linf || i == 0) {
      rep.eps_linf = e;
      arg = i;
    }
  }
  rep.eps_l2 = std::sqrt(grid.cell_measure() * sum2);
  rep.argmax = pts[arg];
  rep.reference_at_argmax = reference.values[arg];
  rep.surrogate_at_argmax = approx[arg];
  if (auto it = surrogate.meta().find("offline_ms"); it != surrogate.meta().end())
    rep.offline_ms = std::stod(it->second);
  return rep;
}

ErrorReport error_study(const cheb::Interpolant& surrogate, const ReferencePricer& reference,
                        const GridSpec& grid, std::size_t threads) {
  return error_study(surrogate, grid, evaluate_on_grid(reference, grid, threads));
}

double fit_slope(std::span<const double> x, std::span<const double> y) {
  if (x.size() != y.size() || x.size() < 2) throw std::invalid_argument("fit_slope: need >= 2 points");
  const double n = static_cast<double>(x.size());
  double sx = 0.0, sy = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    if (!(y[i] > 0.0)) throw std::invalid_argument("fit_slope: y must be > 0");
    sx += x[i];
    sy += std::log10(y[i]);
  }
  const double mx = sx / n, my = sy / n;
  double sxy = 0.0, sxx = 0.0;
  for (std::size_t i = 0; i < x.size(); ++i) {
    sxy += (x[i] - mx) * (std::log10(y[i]) - my);
    sxx += (x[i] - mx) * (x[i] - mx);
  }
  if (sxx == 0.0) throw std::invalid_argument("fit_slope: x values are all equal");
  return sxy / sxx;
}

ConvergenceResult convergence_study(const ReferencePricer& reference, const cheb::Hyperrectangle& dom,
                                    const std::vector<std::size_t>& N_list, const GridSpec& grid,
                                    double noise_floor, std::size_t threads) {
  const auto ref = evaluate_on_grid(reference, grid, threads);
  ConvergenceResult out;
  std::vector<double> xs, ys;
  for (auto N : N_list) {
    const auto surrogate = build_surrogate(reference, dom, cheb::DegreeVector::uniform(dom.dim(), N), threads);
    const auto rep = error_study(surrogate, grid, ref);
    out.rows.push_back({N, rep.eps_linf, rep.eps_l2, rep.offline_ms, rep.online_ms});
    if (rep.eps_linf > 10.0 * noise_floor) {
      xs.push_back(static_cast<double>(N));
      ys.push_back(rep.eps_linf);
    }
  }
  out.fitted_points = xs.size();
  if (xs.size() >= 2) out.slope = fit_slope(xs, ys);
  return out;
}

TimingResult timing_study(const cheb::Interpolant& surrogate, const ReferencePricer& reference,
                          const std::vector<std::size_t>& M_list, double offline_ms, std::size_t threads) {
  TimingResult out;
  for (auto M : M_list) {
    if (M < 2) throw std::invalid_argument("timing_study: M must be >= 2");
    const GridSpec theta(surrogate.domain(), M);
    const auto pts = theta.points_list();
    volatile double sink = 0.0;
    const auto t0 = Clock::now();
    for (const auto& p : pts) sink = sink + surrogate.evaluate(p);
    const double online = ms_since(t0);
    const auto ref = evaluate_on_grid(reference, theta, threads);
    out.rows.push_back({M, online, offline_ms + online, ref.elapsed_ms});
    if (!out.break_even_M && offline_ms + online < ref.elapsed_ms) out.break_even_M = M;
  }
  return out;
}

double price_call_via_moneyness(const cheb::Interpolant& surrogate, double T, double S0, double K) {
  if (surrogate.dim() != 2) throw std::invalid_argument("price_call_via_moneyness: surrogate must be 2-d");
  if (!(K > 0.0)) throw std::invalid_argument("price_call_via_moneyness: K must be > 0");
  const auto& dom = surrogate.domain();
  std::size_t it = dom.find_axis("T"), im = dom.find_axis("moneyness");
  if (it == dom.dim() || im == dom.dim()) {
    it = 0;
    im = 1;
  }
  cheb::Point p(2);
  p[it] = T;
  p[im] = S0 / K;
  return K * surrogate.evaluate(p);
}

}  // namespace pop::engine
