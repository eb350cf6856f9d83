#pragma once

#include <functional>
#include <optional>
#include <span>
#include <string>
#include <utility>
#include <vector>

#include "pop/cheb.hpp"
#include "pop/models.hpp"
#include "pop/payoffs.hpp"
#include "pop/pricer_fd.hpp"
#include "pop/pricer_fourier.hpp"
#include "pop/pricer_mc.hpp"
#include "pop/types.hpp"

namespace pop::engine {

enum class Method { Fourier, MonteCarlo, FiniteDifference, ClosedForm };

std::string method_name(Method m);
Method parse_method(const std::string& name);

struct PricerSettings {
  Method method = Method::Fourier;
  fourier::QuadConfig quad = fourier::QuadConfig::one_dim();
  fourier::QuadConfig quad_2d = fourier::QuadConfig::two_dim();
  mc::McConfig mc;
  fd::FdConfig fd;
};

/// Everything a reference pricer needs for one price.
struct Problem {
  models::ModelSpec model;
  payoffs::PayoffSpec payoff;
  std::vector<double> spot{1.0};
};

/// Dispatches to the configured pricer. Closed form and finite differences need a
/// univariate BS model.
PriceResult reference_price(const Problem& problem, const PricerSettings& settings);

/// Maps each surrogate axis to a parameter slot of a base problem. Slots: "moneyness"
/// (spot = value * K), "K", "T", "S0", "r", "sigma", "v0", "rho", "kappa", "theta",
/// or "model.<field>" for any scalar model field.
struct ParamBinding {
  std::vector<std::pair<std::string, std::string>> axes;  // (axis name, slot)
  Problem base;

  /// Throws std::invalid_argument for duplicate axes or slots the base problem lacks.
  void validate() const;
  std::vector<std::string> axis_names() const;
  Problem bind(std::span<const double> values) const;
};

/// Sets one slot of a problem; throws std::invalid_argument when the slot does not apply.
void apply_slot(Problem& problem, const std::string& slot, double value);

/// Single-method pricer handle: parameter point -> price.
using ReferencePricer = std::function<double(std::span<const double>)>;

ReferencePricer make_reference(const ParamBinding& binding, const PricerSettings& settings);

/// A node price failed; carries the node coordinates.
class NodePricingError : public PricingError {
 public:
  NodePricingError(const std::string& what, std::vector<double> node)
      : PricingError(what), node_(std::move(node)) {}
  const std::vector<double>& node() const noexcept { return node_; }

 private:
  std::vector<double> node_;
};

/// Prices all tensor nodes (in parallel, gathered by node index) and interpolates.
/// Meta gains offline_ms and node_count on top of `meta`.
cheb::Interpolant build_surrogate(const ReferencePricer& reference, const cheb::Hyperrectangle& dom,
                                  const cheb::DegreeVector& deg, std::size_t threads = 0,
                                  cheb::Meta meta = {});

/// Surrogate nodes priced through a binding; meta records the pricer.
cheb::Interpolant build_surrogate(const ParamBinding& binding, const cheb::Hyperrectangle& dom,
                                  const cheb::DegreeVector& deg, const PricerSettings& settings,
                                  std::size_t threads = 0);

/// Equidistant evaluation grid including the domain corners.
struct GridSpec {
  cheb::Hyperrectangle domain;
  std::vector<std::size_t> points;  // per axis, each >= 2

  GridSpec(cheb::Hyperrectangle dom, std::size_t points_per_axis);
  GridSpec(cheb::Hyperrectangle dom, std::vector<std::size_t> points_per_axis);
  std::size_t size() const;
  std::vector<cheb::Point> points_list() const;
  /// Product of the axis spacings.
  double cell_measure() const;
};

struct GridReference {
  std::vector<double> values;
  double elapsed_ms = 0.0;
};

/// Reference prices on every grid point (parallel, ordered like points_list()).
GridReference evaluate_on_grid(const ReferencePricer& reference, const GridSpec& grid,
                               std::size_t threads = 0);

struct ErrorReport {
  double eps_linf = 0.0;
  double eps_l2 = 0.0;  // sqrt(cell_measure * sum diff^2)
  cheb::Point argmax;
  double reference_at_argmax = 0.0;
  double surrogate_at_argmax = 0.0;
  std::size_t grid_points = 0;
  double offline_ms = 0.0;
  double online_ms = 0.0;
  double reference_ms = 0.0;
};

ErrorReport error_study(const cheb::Interpolant& surrogate, const GridSpec& grid,
                        const GridReference& reference);
ErrorReport error_study(const cheb::Interpolant& surrogate, const ReferencePricer& reference,
                        const GridSpec& grid, std::size_t threads = 0);

/// Least-squares slope of log10(y) against x.
double fit_slope(std::span<const double> x, std::span<const double> y);

struct ConvergenceRow {
  std::size_t N;
  double eps_linf, eps_l2, offline_ms, online_ms;
};

struct ConvergenceResult {
  std::vector<ConvergenceRow> rows;
  std::optional<double> slope;  // empty when fewer than two pre-saturation points
  std::size_t fitted_points = 0;
};

/// Builds deg (N, ..., N) surrogates for each N and studies them on one reference grid.
/// The slope fit uses the points with eps_linf > 10 * noise_floor.
ConvergenceResult convergence_study(const ReferencePricer& reference, const cheb::Hyperrectangle& dom,
                                    const std::vector<std::size_t>& N_list, const GridSpec& grid,
                                    double noise_floor, std::size_t threads = 0);

struct TimingRow {
  std::size_t M;
  double online_ms, offline_plus_online_ms, reference_ms;
};

struct TimingResult {
  std::vector<TimingRow> rows;
  std::optional<std::size_t> break_even_M;  // first M with offline + online < reference
};

/// Times M^D surrogate and reference evaluations on the grid Theta_M for each M.
TimingResult timing_study(const cheb::Interpolant& surrogate, const ReferencePricer& reference,
                          const std::vector<std::size_t>& M_list, double offline_ms,
                          std::size_t threads = 1);

/// K * surrogate(T, S0 / K) for a surrogate over axes named "T" and "moneyness"
/// (positional (T, moneyness) when unnamed).
double price_call_via_moneyness(const cheb::Interpolant& surrogate, double T, double S0, double K);

}  // namespace pop::engine
