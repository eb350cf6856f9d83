#pragma once

#include <array>
#include <complex>
#include <functional>
#include <optional>
#include <span>
#include <string>
#include <variant>
#include <vector>

#include <Eigen/Dense>

namespace pop::models {

using cplx = std::complex<double>;

/// Multivariate Black-Scholes. `cov` is the covariance matrix of log-returns per year;
/// the drift b_i = r - cov_ii / 2 is derived, never stored.
struct BsParams {
  double T = 1.0;
  double r = 0.0;
  Eigen::MatrixXd cov = Eigen::MatrixXd::Constant(1, 1, 0.04);

  /// Univariate convenience: covariance sigma^2.
  static BsParams univariate(double T, double r, double sigma);
  std::size_t dim() const { return static_cast<std::size_t>(cov.rows()); }
};

/// Merton jump diffusion: N(alpha, beta^2) jumps at rate lambda.
struct MertonParams {
  double T = 1.0;
  double r = 0.0;
  double sigma = 0.15;
  double alpha = -0.04;
  double beta = 0.02;
  double lambda = 3.0;
};

/// CGMY tempered stable process, Y in (0,2) \ {1}.
struct CgmyParams {
  double T = 1.0;
  double r = 0.0;
  double C = 0.6;
  double G = 10.0;
  double M = 28.0;
  double Y = 1.1;
};

/// Univariate Heston; `sigma` is the volatility of variance, `rho` the asset/variance
/// correlation. In Monte Carlo every asset gets its own independent copy.
struct HestonParams {
  double T = 2.0;
  double r = 0.0;
  double v0 = 0.04;
  double kappa = 1.5;
  double theta = 0.04;
  double sigma = 0.25;
  double rho = 0.1;
};

/// Two assets sharing one variance process.
struct Heston2Params {
  double T = 1.0;
  double r = 0.0;
  double v0 = 0.05;
  double kappa = 0.4963;
  double theta = 0.2286;
  double sigma1 = 0.15;
  double sigma2 = 0.2;
  double sigma3 = 0.1;
  double rho12 = 0.0;
  double rho13 = 0.01;
  double rho23 = 0.02;
};

using ModelSpec = std::variant<BsParams, MertonParams, CgmyParams, HestonParams, Heston2Params>;

std::string family_name(const ModelSpec& m);
double maturity(const ModelSpec& m);
double rate(const ModelSpec& m);
void set_maturity(ModelSpec& m, double T);
void set_rate(ModelSpec& m, double r);
/// Number of log-price components of the characteristic function (BS: cov size).
std::size_t cf_dimension(const ModelSpec& m);

// Characteristic functions E exp(i <z, L_T>) of the log-return L_T (spot excluded),
// analytically continued to complex z.
cplx cf_bs(const BsParams& p, std::span<const cplx> z);
cplx cf_merton(const MertonParams& p, cplx z);
/// Throws std::domain_error unless -M < Im(z) < G.
cplx cf_cgmy(const CgmyParams& p, cplx z);
cplx cf_heston2(const Heston2Params& p, std::array<cplx, 2> z);
cplx cf_heston1(double T, double r, double v0, double kappa, double theta, double vol_of_vol,
                double rho, cplx z);
cplx cf_heston(const HestonParams& p, cplx z);

/// Drift making exp(L) - r a martingale.
double merton_drift(const MertonParams& p);
double cgmy_drift(const CgmyParams& p);

/// Univariate characteristic function with model constants precomputed.
using UnivariateCf = std::function<cplx(cplx)>;
UnivariateCf make_univariate_cf(const ModelSpec& m);

/// Bivariate characteristic function (BS with 2x2 covariance or Heston2).
using BivariateCf = std::function<cplx(cplx, cplx)>;
BivariateCf make_bivariate_cf(const ModelSpec& m);

/// Parameter checks; with an eta, also the Fourier strip / moment conditions for it.
/// Returns a human-readable list of violations, empty when valid.
std::vector<std::string> validate(const ModelSpec& m,
                                  std::optional<std::vector<double>> eta = std::nullopt);

/// True when cov is symmetric positive semidefinite.
bool is_covariance(const Eigen::MatrixXd& cov);

}  // namespace pop::models
