#include "pop/models.hpp"

#include <cmath>
#include <sstream>
#include <stdexcept>

namespace pop::models {

namespace {

constexpr cplx I{0.0, 1.0};

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

std::string num(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

// C Gamma(-Y) [(M - iz)^Y - M^Y + (G + iz)^Y - G^Y]
struct CgmyExponent {
  double C_gamma, G, M, Y, GY, MY;

  explicit CgmyExponent(const CgmyParams& p)
      : C_gamma(p.C * std::tgamma(-p.Y)),
        G(p.G),
        M(p.M),
        Y(p.Y),
        GY(std::pow(p.G, p.Y)),
        MY(std::pow(p.M, p.Y)) {}

  cplx operator()(cplx z) const {
    return C_gamma * (std::pow(M - I * z, Y) - MY + std::pow(G + I * z, Y) - GY);
  }
};

}  // namespace

BsParams BsParams::univariate(double T, double r, double sigma) {
  BsParams p;
  p.T = T;
  p.r = r;
  p.cov = Eigen::MatrixXd::Constant(1, 1, sigma * sigma);
  return p;
}

std::string family_name(const ModelSpec& m) {
  return std::visit(overloaded{[](const BsParams&) { return std::string("bs"); },
                               [](const MertonParams&) { return std::string("merton"); },
                               [](const CgmyParams&) { return std::string("cgmy"); },
                               [](const HestonParams&) { return std::string("heston"); },
                               [](const Heston2Params&) { return std::string("heston2"); }},
                    m);
}

double maturity(const ModelSpec& m) {
  return std::visit([](const auto& p) { return p.T; }, m);
}

double rate(const ModelSpec& m) {
  return std::visit([](const auto& p) { return p.r; }, m);
}

void set_maturity(ModelSpec& m, double T) {
  std::visit([T](auto& p) { p.T = T; }, m);
}

void set_rate(ModelSpec& m, double r) {
  std::visit([r](auto& p) { p.r = r; }, m);
}

std::size_t cf_dimension(const ModelSpec& m) {
  return std::visit(overloaded{[](const BsParams& p) { return p.dim(); },
                               [](const Heston2Params&) { return std::size_t{2}; },
                               [](const auto&) { return std::size_t{1}; }},
                    m);
}

bool is_covariance(const Eigen::MatrixXd& cov) {
  if (cov.rows() == 0 || cov.rows() != cov.cols()) return false;
  if (!cov.allFinite()) return false;
  const double scale = std::max(1.0, cov.cwiseAbs().maxCoeff());
  if (((cov - cov.transpose()).cwiseAbs().maxCoeff()) > 1e-14 * scale) return false;
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(cov, Eigen::EigenvaluesOnly);
  return es.eigenvalues().minCoeff() >= -1e-12 * scale;
}

// ---------------------------------------------------------------------------

cplx cf_bs(const BsParams& p, std::span<const cplx> z) {
  const auto d = p.dim();
  if (z.size() != d) throw std::invalid_argument("cf_bs: z has wrong dimension");
  if (!is_covariance(p.cov)) throw std::invalid_argument("cf_bs: invalid covariance matrix");
  cplx drift = 0.0, quad = 0.0;
  for (std::size_t i = 0; i < d; ++i) {
    drift += (p.r - 0.5 * p.cov(i, i)) * z[i];
    for (std::size_t j = 0; j < d; ++j) quad += z[i] * p.cov(i, j) * z[j];
  }
  return std::exp(p.T * (I * drift - 0.5 * quad));
}

double merton_drift(const MertonParams& p) {
  return p.r - 0.5 * p.sigma * p.sigma -
         p.lambda * (std::exp(p.alpha + 0.5 * p.beta * p.beta) - 1.0);
}

cplx cf_merton(const MertonParams& p, cplx z) {
  const double b = merton_drift(p);
  const cplx jump = p.lambda * (std::exp(I * z * p.alpha - 0.5 * p.beta * p.beta * z * z) - 1.0);
  return std::exp(p.T * (I * b * z - 0.5 * p.sigma * p.sigma * z * z + jump));
}

double cgmy_drift(const CgmyParams& p) {
  const CgmyExponent k(p);
  return p.r - k(cplx{0.0, -1.0}).real();
}

cplx cf_cgmy(const CgmyParams& p, cplx z) {
  if (!(z.imag() > -p.M && z.imag() < p.G))
    throw std::domain_error("cf_cgmy: Im(z)=" + num(z.imag()) + " outside strip (-M, G)");
  const CgmyExponent k(p);
  const double b = p.r - k(cplx{0.0, -1.0}).real();
  return std::exp(p.T * (I * b * z + k(z)));
}

cplx cf_heston2(const Heston2Params& p, std::array<cplx, 2> z) {
  const auto [z1, z2] = z;
  const double s1 = p.sigma1, s2 = p.sigma2, s3 = p.sigma3;
  const cplx zeta = -(s1 * s1 * z1 * z1 + s2 * s2 * z2 * z2 + 2.0 * p.rho12 * s1 * s2 * z1 * z2 +
                      I * s1 * s1 * z1 + I * s2 * s2 * z2);
  const cplx a = p.kappa - I * p.rho13 * s1 * s3 * z1 - I * p.rho23 * s2 * s3 * z2;
  const cplx c = std::sqrt(a * a - s3 * s3 * zeta);  // principal root, Re(c) >= 0
  if (std::abs(a + c) == 0.0) throw std::domain_error("cf_heston2: a + c vanishes");
  const cplx g = (a - c) / (a + c);
  const cplx e = std::exp(-c * p.T);
  const cplx denom = 1.0 - g * e;
  if (std::abs(denom) < 1e-300 || std::abs(1.0 - g) < 1e-300)
    throw std::domain_error("cf_heston2: degenerate denominator 1 - g exp(-cT)");
  const double s3sq = s3 * s3;
  const cplx variance_part = p.v0 / s3sq * (a - c) * (1.0 - e) / denom;
  const cplx mean_part =
      p.kappa * p.theta / s3sq * ((a - c) * p.T - 2.0 * std::log(denom / (1.0 - g)));
  return std::exp(I * p.T * p.r * (z1 + z2)) * std::exp(variance_part + mean_part);
}

cplx cf_heston1(double T, double r, double v0, double kappa, double theta, double vol_of_vol,
                double rho, cplx z) {
  Heston2Params p;
  p.T = T;
  p.r = r;
  p.v0 = v0;
  p.kappa = kappa;
  p.theta = theta;
  p.sigma1 = 1.0;
  p.sigma2 = 0.0;
  p.sigma3 = vol_of_vol;
  p.rho12 = 0.0;
  p.rho13 = rho;
  p.rho23 = 0.0;
  return cf_heston2(p, {z, cplx{0.0}});
}

cplx cf_heston(const HestonParams& p, cplx z) {
  return cf_heston1(p.T, p.r, p.v0, p.kappa, p.theta, p.sigma, p.rho, z);
}

UnivariateCf make_univariate_cf(const ModelSpec& m) {
  return std::visit(
      overloaded{
          [](const BsParams& p) -> UnivariateCf {
            if (p.dim() != 1) throw std::invalid_argument("univariate cf: BS model is not 1-d");
            if (!is_covariance(p.cov)) throw std::invalid_argument("cf_bs: invalid covariance");
            const double var = p.cov(0, 0), b = p.r - 0.5 * var, T = p.T;
            return [=](cplx z) { return std::exp(T * (I * b * z - 0.5 * var * z * z)); };
          },
          [](const MertonParams& p) -> UnivariateCf {
            const double b = merton_drift(p);
            return [p, b](cplx z) {
              const cplx jump =
                  p.lambda * (std::exp(I * z * p.alpha - 0.5 * p.beta * p.beta * z * z) - 1.0);
              return std::exp(p.T * (I * b * z - 0.5 * p.sigma * p.sigma * z * z + jump));
            };
          },
          [](const CgmyParams& p) -> UnivariateCf {
            const CgmyExponent k(p);
            const double b = p.r - k(cplx{0.0, -1.0}).real();
            return [p, k, b](cplx z) {
              if (!(z.imag() > -p.M && z.imag() < p.G))
                throw std::domain_error("cf_cgmy: Im(z) outside strip (-M, G)");
              return std::exp(p.T * (I * b * z + k(z)));
            };
          },
          [](const HestonParams& p) -> UnivariateCf {
            return [p](cplx z) { return cf_heston(p, z); };
          },
          [](const Heston2Params&) -> UnivariateCf {
            throw std::invalid_argument("univariate cf: heston2 is a two-asset model");
          }},
      m);
}

BivariateCf make_bivariate_cf(const ModelSpec& m) {
  return std::visit(
      overloaded{
          [](const BsParams& p) -> BivariateCf {
            if (p.dim() != 2) throw std::invalid_argument("bivariate cf: BS model is not 2-d");
            if (!is_covariance(p.cov)) throw std::invalid_argument("cf_bs: invalid covariance");
            const double c11 = p.cov(0, 0), c12 = p.cov(0, 1), c22 = p.cov(1, 1);
            const double b1 = p.r - 0.5 * c11, b2 = p.r - 0.5 * c22, T = p.T;
            return [=](cplx z1, cplx z2) {
              const cplx quad = c11 * z1 * z1 + 2.0 * c12 * z1 * z2 + c22 * z2 * z2;
              return std::exp(T * (I * (b1 * z1 + b2 * z2) - 0.5 * quad));
            };
          },
          [](const Heston2Params& p) -> BivariateCf {
            return [p](cplx z1, cplx z2) { return cf_heston2(p, {z1, z2}); };
          },
          [](const auto&) -> BivariateCf {
            throw std::invalid_argument("bivariate cf: model is univariate");
          }},
      m);
}

// ---------------------------------------------------------------------------

std::vector<std::string> validate(const ModelSpec& m, std::optional<std::vector<double>> eta) {
  std::vector<std::string> v;
  const double T = maturity(m);
  if (!(T > 0.0)) v.push_back("maturity T must be > 0");
  if (!std::isfinite(rate(m))) v.push_back("rate r must be finite");
  if (eta && eta->size() != cf_dimension(m))
    v.push_back("eta has " + std::to_string(eta->size()) + " components, model has " +
                std::to_string(cf_dimension(m)));

  std::visit(
      overloaded{
          [&](const BsParams& p) {
            if (!is_covariance(p.cov))
              v.push_back("covariance matrix is not symmetric positive semidefinite");
          },
          [&](const MertonParams& p) {
            if (!(p.sigma > 0.0)) v.push_back("merton: sigma must be > 0");
            if (!(p.beta >= 0.0)) v.push_back("merton: beta must be >= 0");
            if (!(p.lambda > 0.0)) v.push_back("merton: lambda must be > 0");
          },
          [&](const CgmyParams& p) {
            if (!(p.C > 0.0)) v.push_back("cgmy: C must be > 0");
            if (!(p.G > 0.0)) v.push_back("cgmy: G must be > 0");
            if (!(p.M > 1.0)) v.push_back("cgmy: M must be > 1 for the martingale drift");
            if (!(p.Y > 0.0 && p.Y < 2.0)) v.push_back("cgmy: Y must lie in (0,2)");
            if (p.Y == 1.0) v.push_back("cgmy: Y = 1 is a pole of Gamma(-Y)");
            if (eta && eta->size() == 1) {
              const double e = eta->front();
              // analyticity strip (-M, G) intersected with (-min(G,M), max(G,M))
              const double lo = std::max(-p.M, -std::min(p.G, p.M));
              const double hi = std::min(p.G, std::max(p.G, p.M));
              if (!(e > lo && e < hi))
                v.push_back("cgmy: eta=" + num(e) + " outside admissible interval (" + num(lo) +
                            ", " + num(hi) + ")");
            }
          },
          [&](const HestonParams& p) {
            if (!(p.v0 > 0.0)) v.push_back("heston: v0 must be > 0");
            if (!(p.kappa > 0.0)) v.push_back("heston: kappa must be > 0");
            if (!(p.theta > 0.0)) v.push_back("heston: theta must be > 0");
            if (!(p.sigma > 0.0)) v.push_back("heston: sigma must be > 0");
            if (!(p.rho >= -1.0 && p.rho <= 1.0)) v.push_back("heston: rho must lie in [-1,1]");
            if (p.sigma * p.sigma > 2.0 * p.kappa * p.theta * (1.0 + 1e-12))
              v.push_back("heston: Feller condition sigma^2 <= 2 kappa theta violated");
            if (eta && eta->size() == 1) {
              // moment E S^u, u = -eta, stays finite for all T when the Riccati
              // discriminant is nonnegative and the mean reversion dominates
              const double u = -eta->front();
              const double a = p.kappa - p.rho * p.sigma * u;
              const double disc = a * a - p.sigma * p.sigma * (u * u - u);
              if (u > 1.0 && !(disc >= 0.0 && a > 0.0))
                v.push_back("heston: moment of order " + num(u) + " may explode before T");
            }
          },
          [&](const Heston2Params& p) {
            if (!(p.v0 > 0.0)) v.push_back("heston2: v0 must be > 0");
            if (!(p.kappa > 0.0)) v.push_back("heston2: kappa must be > 0");
            if (!(p.theta > 0.0)) v.push_back("heston2: theta must be > 0");
            if (!(p.sigma1 >= 0.0 && p.sigma2 >= 0.0))
              v.push_back("heston2: sigma1, sigma2 must be >= 0");
            if (!(p.sigma3 > 0.0)) v.push_back("heston2: sigma3 must be > 0");
            if (p.sigma3 * p.sigma3 > 2.0 * p.kappa * p.theta * (1.0 + 1e-12))
              v.push_back("heston2: Feller condition sigma3^2 <= 2 kappa theta violated");
            Eigen::Matrix3d corr;
            corr << 1.0, p.rho12, p.rho13, p.rho12, 1.0, p.rho23, p.rho13, p.rho23, 1.0;
            if (std::abs(p.rho12) > 1.0 || std::abs(p.rho13) > 1.0 || std::abs(p.rho23) > 1.0 ||
                !is_covariance(corr))
              v.push_back("heston2: correlations do not form a valid correlation matrix");
          }},
      m);
  return v;
}

}  // namespace pop::models
