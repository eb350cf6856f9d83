#include "pop/pricer_mc.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "pop/parallel.hpp"

namespace pop::mc {

namespace {

using payoffs::PayoffKind;

std::uint64_t splitmix64(std::uint64_t& x) {
  std::uint64_t z = (x += 0x9e3779b97f4a7c15ULL);
  z = (z ^ (z >> 30)) * 0xbf58476d1ce4e5b9ULL;
  z = (z ^ (z >> 27)) * 0x94d049bb133111ebULL;
  return z ^ (z >> 31);
}

// xoshiro256**, seeded per path from (seed, path index) so any schedule sees the same draws.
class PathRng {
 public:
  using result_type = std::uint64_t;
  static constexpr result_type min() { return 0; }
  static constexpr result_type max() { return ~result_type{0}; }

  PathRng(std::uint64_t seed, std::uint64_t index) {
    std::uint64_t x = seed;
    std::uint64_t mix = splitmix64(x) ^ (index * 0xd1342543de82ef95ULL + 0x632be59bd9b4e019ULL);
    for (auto& w : s_) w = splitmix64(mix);
  }

  result_type operator()() {
    const std::uint64_t result = rotl(s_[1] * 5, 7) * 9;
    const std::uint64_t t = s_[1] << 17;
    s_[2] ^= s_[0];
    s_[3] ^= s_[1];
    s_[1] ^= s_[2];
    s_[0] ^= s_[3];
    s_[2] ^= t;
    s_[3] = rotl(s_[3], 45);
    return result;
  }

 private:
  static std::uint64_t rotl(std::uint64_t x, int k) { return (x << k) | (x >> (64 - k)); }
  std::uint64_t s_[4];
};

// Symmetric square root A with A A^T = m, valid for semidefinite m.
Eigen::MatrixXd psd_sqrt(const Eigen::MatrixXd& m) {
  Eigen::SelfAdjointEigenSolver<Eigen::MatrixXd> es(m);
  Eigen::VectorXd ev = es.eigenvalues().cwiseMax(0.0).cwiseSqrt();
  return es.eigenvectors() * ev.asDiagonal() * es.eigenvectors().transpose();
}

bool path_independent(PayoffKind k) {
  return k != PayoffKind::Lookback && k != PayoffKind::Barrier && k != PayoffKind::AmericanPut;
}

// State of one simulated path (a path and its antithetic twin are two of these).
struct PathState {
  std::vector<double> log_s, v;
  payoffs::PathSummary summary;

  void init(const std::vector<double>& log_s0, double v0, std::size_t n_var) {
    log_s = log_s0;
    v.assign(n_var, v0);
    summary.terminal.resize(log_s.size());
    summary.running_max.resize(log_s.size());
    summary.running_min.resize(log_s.size());
    for (std::size_t j = 0; j < log_s.size(); ++j)
      summary.running_max[j] = summary.running_min[j] = std::exp(log_s[j]);
  }

  void observe() {
    for (std::size_t j = 0; j < log_s.size(); ++j) {
      const double s = std::exp(log_s[j]);
      summary.terminal[j] = s;
      summary.running_max[j] = std::max(summary.running_max[j], s);
      summary.running_min[j] = std::min(summary.running_min[j], s);
    }
  }
};

}  // namespace

void Welford::add(double x) {
  ++n_;
  const double d = x - mean_;
  mean_ += d / static_cast<double>(n_);
  m2_ += d * (x - mean_);
}

void Welford::merge(const Welford& o) {
  if (o.n_ == 0) return;
  if (n_ == 0) {
    *this = o;
    return;
  }
  const double n = static_cast<double>(n_ + o.n_);
  const double d = o.mean_ - mean_;
  mean_ += d * static_cast<double>(o.n_) / n;
  m2_ += o.m2_ + d * d * static_cast<double>(n_) * static_cast<double>(o.n_) / n;
  n_ += o.n_;
}

double Welford::variance() const { return n_ < 2 ? 0.0 : m2_ / static_cast<double>(n_ - 1); }

double confidence_bound(const Welford& acc) {
  if (acc.count() == 0) return 0.0;
  return 1.96 * std::sqrt(acc.variance()) / std::sqrt(static_cast<double>(acc.count()));
}

double bs_log_step(double log_s, double r, double var, double dt, double normal) {
  return log_s + (r - 0.5 * var) * dt + std::sqrt(var * dt) * normal;
}

double merton_log_step(double log_s, const models::MertonParams& p, double dt, double normal,
                       unsigned n_jumps, double jump_normal) {
  const double b = models::merton_drift(p);
  const double n = static_cast<double>(n_jumps);
  return log_s + b * dt + p.sigma * std::sqrt(dt) * normal + p.alpha * n +
         p.beta * std::sqrt(n) * jump_normal;
}

HestonState heston_step(const HestonState& s, const models::HestonParams& p, double dt, double z_asset,
                        double z_indep) {
  const double vp = std::max(s.v, 0.0);
  const double sq = std::sqrt(vp * dt);
  const double z_var = p.rho * z_asset + std::sqrt(std::max(0.0, 1.0 - p.rho * p.rho)) * z_indep;
  return {s.log_s + (p.r - 0.5 * vp) * dt + sq * z_asset,
          s.v + p.kappa * (p.theta - vp) * dt + p.sigma * sq * z_var};
}

PriceResult price_mc(const payoffs::PayoffSpec& payoff, const models::ModelSpec& model,
                     const std::vector<double>& S0, const McConfig& cfg) {
  const std::size_t d = S0.size();
  if (d == 0) throw std::invalid_argument("price_mc: need at least one spot");
  for (double s : S0)
    if (!(s > 0.0)) throw std::invalid_argument("price_mc: spots must be > 0");
  if (cfg.n_paths == 0) throw std::invalid_argument("price_mc: n_paths must be > 0");
  if (cfg.antithetic && cfg.n_paths % 2 != 0)
    throw std::invalid_argument("price_mc: n_paths must be even with antithetic variates");
  if (cfg.steps_per_year == 0) throw std::invalid_argument("price_mc: steps_per_year must be >= 1");
  if (payoff.kind == PayoffKind::AmericanPut)
    throw PricingError("price_mc: early exercise is not supported by the Monte Carlo pricer");
  if (payoff.kind == PayoffKind::MinCall2 && d != 2)
    throw PricingError("price_mc: the min-call needs two assets");
  if (payoffs::is_univariate_transform(payoff.kind) && d != 1)
    throw PricingError("price_mc: " + payoffs::kind_name(payoff.kind) + " needs one asset");
  if (payoff.kind == PayoffKind::Barrier && !payoff.barrier)
    throw PricingError("price_mc: barrier option without barrier level");
  if (!(payoff.K > 0.0)) throw PricingError("price_mc: strike must be > 0");
  {
    auto issues = models::validate(model);
    std::erase_if(issues, [](const std::string& s) { return s.find("Feller") != std::string::npos; });
    if (!issues.empty()) throw PricingError("price_mc: invalid model: " + issues.front());
  }

  const double T = models::maturity(model), r = models::rate(model);
  const bool is_bs = std::holds_alternative<models::BsParams>(model);
  const bool is_merton = std::holds_alternative<models::MertonParams>(model);
  const bool one_step = cfg.exact_terminal_step && (is_bs || is_merton) && path_independent(payoff.kind);
  const std::size_t steps =
      one_step ? 1
               : std::max<std::size_t>(
                     1, static_cast<std::size_t>(std::ceil(T * static_cast<double>(cfg.steps_per_year) - 1e-9)));
  const double dt = T / static_cast<double>(steps);
  const double sqdt = std::sqrt(dt);
  const bool track = !path_independent(payoff.kind);

  std::vector<double> log_s0(d);
  for (std::size_t j = 0; j < d; ++j) log_s0[j] = std::log(S0[j]);

  // model-specific constants
  Eigen::MatrixXd bs_root;
  std::vector<double> bs_drift;
  double v0 = 0.0;
  std::size_t n_var = 0, normals_per_step = 0;
  std::visit(
      [&](const auto& p) {
        using P = std::decay_t<decltype(p)>;
        if constexpr (std::is_same_v<P, models::BsParams>) {
          Eigen::MatrixXd cov = p.cov;
          if (cov.rows() == 1 && d > 1) cov = Eigen::MatrixXd::Identity(d, d) * p.cov(0, 0);
          if (static_cast<std::size_t>(cov.rows()) != d)
            throw PricingError("price_mc: covariance size does not match the number of spots");
          bs_root = psd_sqrt(cov);
          bs_drift.resize(d);
          for (std::size_t j = 0; j < d; ++j) bs_drift[j] = (r - 0.5 * cov(j, j)) * dt;
          normals_per_step = d;
        } else if constexpr (std::is_same_v<P, models::MertonParams>) {
          normals_per_step = 2 * d;
        } else if constexpr (std::is_same_v<P, models::HestonParams>) {
          v0 = p.v0;
          n_var = d;
          normals_per_step = 2 * d;
        } else if constexpr (std::is_same_v<P, models::Heston2Params>) {
          if (d != 2) throw PricingError("price_mc: heston2 needs two spots");
          Eigen::Matrix3d corr;
          corr << 1.0, p.rho12, p.rho13, p.rho12, 1.0, p.rho23, p.rho13, p.rho23, 1.0;
          bs_root = psd_sqrt(corr);
          v0 = p.v0;
          n_var = 1;
          normals_per_step = 3;
        } else {
          throw PricingError("price_mc: model '" + models::family_name(model) +
                             "' is not supported by the Monte Carlo pricer");
        }
      },
      model);

  const std::size_t n_twins = cfg.antithetic ? 2 : 1;
  const std::size_t n_units = cfg.antithetic ? cfg.n_paths / 2 : cfg.n_paths;
  constexpr std::size_t kBatch = 1024;
  const std::size_t n_batches = (n_units + kBatch - 1) / kBatch;
  std::vector<Welford> batch_acc(n_batches);
  const double discount = std::exp(-r * T);

  auto run_batch = [&](std::size_t b) {
    std::vector<double> z(normals_per_step), w(normals_per_step);
    std::vector<unsigned> jumps(d);
    PathState twin[2];
    std::normal_distribution<double> normal;
    Welford acc;
    const std::size_t end = std::min(n_units, (b + 1) * kBatch);
    for (std::size_t unit = b * kBatch; unit < end; ++unit) {
      PathRng rng(cfg.seed, unit);
      normal.reset();
      for (std::size_t k = 0; k < n_twins; ++k) twin[k].init(log_s0, v0, n_var);
      for (std::size_t step = 0; step < steps; ++step) {
        for (auto& x : z) x = normal(rng);
        std::visit(
            [&](const auto& p) {
              using P = std::decay_t<decltype(p)>;
              if constexpr (std::is_same_v<P, models::MertonParams>) {
                std::poisson_distribution<unsigned> pois(p.lambda * dt);
                for (std::size_t j = 0; j < d; ++j) jumps[j] = p.lambda > 0.0 ? pois(rng) : 0u;
              }
              for (std::size_t k = 0; k < n_twins; ++k) {
                const double sign = k == 0 ? 1.0 : -1.0;
                PathState& st = twin[k];
                if constexpr (std::is_same_v<P, models::BsParams>) {
                  for (std::size_t j = 0; j < d; ++j) {
                    double inc = 0.0;
                    for (std::size_t i = 0; i < d; ++i) inc += bs_root(j, i) * z[i];
                    st.log_s[j] += bs_drift[j] + sign * sqdt * inc;
                  }
                } else if constexpr (std::is_same_v<P, models::MertonParams>) {
                  for (std::size_t j = 0; j < d; ++j)
                    st.log_s[j] = merton_log_step(st.log_s[j], p, dt, sign * z[2 * j], jumps[j],
                                                  sign * z[2 * j + 1]);
                } else if constexpr (std::is_same_v<P, models::HestonParams>) {
                  for (std::size_t j = 0; j < d; ++j) {
                    const auto next = heston_step({st.log_s[j], st.v[j]}, p, dt, sign * z[2 * j],
                                                  sign * z[2 * j + 1]);
                    st.log_s[j] = next.log_s;
                    st.v[j] = next.v;
                  }
                } else if constexpr (std::is_same_v<P, models::Heston2Params>) {
                  for (std::size_t i = 0; i < 3; ++i)
                    w[i] = sign * (bs_root(i, 0) * z[0] + bs_root(i, 1) * z[1] + bs_root(i, 2) * z[2]);
                  const double vp = std::max(st.v[0], 0.0);
                  const double sq = std::sqrt(vp * dt);
                  const double s1 = p.sigma1, s2 = p.sigma2;
                  st.log_s[0] += (r - 0.5 * s1 * s1 * vp) * dt + s1 * sq * w[0];
                  st.log_s[1] += (r - 0.5 * s2 * s2 * vp) * dt + s2 * sq * w[1];
                  st.v[0] += p.kappa * (p.theta - vp) * dt + p.sigma3 * sq * w[2];
                }
                if (track || step + 1 == steps) st.observe();
              }
            },
            model);
      }
      double y = 0.0;
      for (std::size_t k = 0; k < n_twins; ++k) y += payoffs::path_payoff(payoff, twin[k].summary);
      acc.add(discount * y / static_cast<double>(n_twins));
    }
    batch_acc[b] = acc;
  };
  parallel_for(n_batches, resolve_threads(cfg.n_threads), run_batch);

  Welford total;
  for (const auto& a : batch_acc) total.merge(a);
  PriceResult res;
  res.price = total.mean();
  res.conf_half_width = confidence_bound(total);
  res.method = "mc";
  res.diagnostics["n_paths"] = std::to_string(cfg.n_paths);
  res.diagnostics["steps"] = std::to_string(steps);
  res.diagnostics["antithetic"] = cfg.antithetic ? "true" : "false";
  res.diagnostics["seed"] = std::to_string(cfg.seed);
  return res;
}

}  // namespace pop::mc
