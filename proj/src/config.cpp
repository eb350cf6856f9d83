#include "pop/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

namespace pop::config {

namespace {

using json = nlohmann::json;

void check_keys(const json& obj, const std::set<std::string>& allowed, const std::string& where) {
  if (!obj.is_object()) throw ConfigError(where + ": expected an object");
  for (const auto& [key, _] : obj.items())
    if (!allowed.count(key)) throw ConfigError(where + ": unknown key '" + key + "'");
}

template <class T>
T get_or(const json& obj, const std::string& key, T fallback, const std::string& where) {
  if (!obj.contains(key)) return fallback;
  try {
    return obj.at(key).get<T>();
  } catch (const json::exception& e) {
    throw ConfigError(where + "." + key + ": " + e.what());
  }
}

template <class T>
T require(const json& obj, const std::string& key, const std::string& where) {
  if (!obj.contains(key)) throw ConfigError(where + ": missing required key '" + key + "'");
  return get_or<T>(obj, key, T{}, where);
}

Eigen::MatrixXd parse_matrix(const json& j, const std::string& where) {
  if (!j.is_array() || j.empty()) throw ConfigError(where + ": expected a square matrix");
  const auto n = static_cast<Eigen::Index>(j.size());
  Eigen::MatrixXd m(n, n);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto& row = j[static_cast<std::size_t>(i)];
    if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != n)
      throw ConfigError(where + ": expected a square matrix");
    for (Eigen::Index k = 0; k < n; ++k) {
      if (!row[static_cast<std::size_t>(k)].is_number()) throw ConfigError(where + ": non-numeric entry");
      m(i, k) = row[static_cast<std::size_t>(k)].get<double>();
    }
  }
  return m;
}

models::ModelSpec parse_model(const json& j) {
  const std::string w = "model";
  if (!j.is_object()) throw ConfigError("model: expected an object");
  const auto family = require<std::string>(j, "family", w);
  auto common = [&](auto& p) {
    p.T = get_or(j, "T", p.T, w);
    p.r = get_or(j, "r", p.r, w);
  };
  if (family == "bs") {
    check_keys(j, {"family", "T", "r", "sigma", "cov"}, w);
    models::BsParams p;
    common(p);
    if (j.contains("sigma") && j.contains("cov")) throw ConfigError("model: give either sigma or cov");
    if (j.contains("sigma")) p.cov = Eigen::MatrixXd::Constant(1, 1, std::pow(get_or(j, "sigma", 0.2, w), 2));
    if (j.contains("cov")) p.cov = parse_matrix(j.at("cov"), "model.cov");
    return p;
  }
  if (family == "merton") {
    check_keys(j, {"family", "T", "r", "sigma", "alpha", "beta", "lambda"}, w);
    models::MertonParams p;
    common(p);
    p.sigma = get_or(j, "sigma", p.sigma, w);
    p.alpha = get_or(j, "alpha", p.alpha, w);
    p.beta = get_or(j, "beta", p.beta, w);
    p.lambda = get_or(j, "lambda", p.lambda, w);
    return p;
  }
  if (family == "cgmy") {
    check_keys(j, {"family", "T", "r", "C", "G", "M", "Y"}, w);
    models::CgmyParams p;
    common(p);
    p.C = get_or(j, "C", p.C, w);
    p.G = get_or(j, "G", p.G, w);
    p.M = get_or(j, "M", p.M, w);
    p.Y = get_or(j, "Y", p.Y, w);
    return p;
  }
  if (family == "heston") {
    check_keys(j, {"family", "T", "r", "v0", "kappa", "theta", "sigma", "rho"}, w);
    models::HestonParams p;
    common(p);
    p.v0 = get_or(j, "v0", p.v0, w);
    p.kappa = get_or(j, "kappa", p.kappa, w);
    p.theta = get_or(j, "theta", p.theta, w);
    p.sigma = get_or(j, "sigma", p.sigma, w);
    p.rho = get_or(j, "rho", p.rho, w);
    return p;
  }
  if (family == "heston2") {
    check_keys(j, {"family", "T", "r", "v0", "kappa", "theta", "sigma1", "sigma2", "sigma3", "rho12",
                   "rho13", "rho23"},
               w);
    models::Heston2Params p;
    common(p);
    p.v0 = get_or(j, "v0", p.v0, w);
    p.kappa = get_or(j, "kappa", p.kappa, w);
    p.theta = get_or(j, "theta", p.theta, w);
    p.sigma1 = get_or(j, "sigma1", p.sigma1, w);
    p.sigma2 = get_or(j, "sigma2", p.sigma2, w);
    p.sigma3 = get_or(j, "sigma3", p.sigma3, w);
    p.rho12 = get_or(j, "rho12", p.rho12, w);
    p.rho13 = get_or(j, "rho13", p.rho13, w);
    p.rho23 = get_or(j, "rho23", p.rho23, w);
    return p;
  }
  throw ConfigError("model: unknown family '" + family + "'");
}

payoffs::PayoffSpec parse_payoff(const json& j) {
  const std::string w = "payoff";
  check_keys(j, {"kind", "K", "barrier", "eta"}, w);
  payoffs::PayoffSpec p;
  try {
    p.kind = payoffs::parse_kind(require<std::string>(j, "kind", w));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("payoff: ") + e.what());
  }
  p.K = require<double>(j, "K", w);
  if (j.contains("barrier")) p.barrier = get_or(j, "barrier", 0.0, w);
  p.eta = get_or(j, "eta", std::vector<double>{}, w);
  try {
    payoffs::validate(payoffs::with_default_eta(p));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(e.what());
  }
  return p;
}

fourier::QuadConfig parse_quad(const json& j, fourier::QuadConfig q, const std::string& w) {
  check_keys(j, {"abs_tol", "rel_tol", "max_evals", "truncation_start", "domain_2d", "infinite_2d",
                 "infinite_scale", "rule_2d"},
             w);
  q.abs_tol = get_or(j, "abs_tol", q.abs_tol, w);
  q.rel_tol = get_or(j, "rel_tol", q.rel_tol, w);
  q.max_evals = get_or(j, "max_evals", q.max_evals, w);
  q.truncation_start = get_or(j, "truncation_start", q.truncation_start, w);
  q.infinite_2d = get_or(j, "infinite_2d", q.infinite_2d, w);
  q.infinite_scale = get_or(j, "infinite_scale", q.infinite_scale, w);
  if (j.contains("domain_2d")) {
    const auto b = get_or(j, "domain_2d", std::vector<double>{}, w);
    if (b.size() != 4 || !(b[0] < b[1] && b[2] < b[3]))
      throw ConfigError(w + ".domain_2d: expected [lo1, hi1, lo2, hi2] with lo < hi");
    q.domain_2d = {b[0], b[1], b[2], b[3]};
  }
  if (j.contains("rule_2d")) {
    const auto r = get_or(j, "rule_2d", std::string{}, w);
    if (r == "gk7") q.rule_2d = quad::CubatureRule::GK7;
    else if (r == "gk15") q.rule_2d = quad::CubatureRule::GK15;
    else throw ConfigError(w + ".rule_2d: expected gk7 or gk15");
  }
  if (!(q.abs_tol > 0.0) || q.rel_tol < 0.0) throw ConfigError(w + ": tolerances must be positive");
  if (q.max_evals < 21) throw ConfigError(w + ".max_evals must be >= 21");
  return q;
}

void parse_pricer(const json& j, engine::PricerSettings& s) {
  const std::string w = "pricer";
  check_keys(j, {"method", "quad", "quad_2d", "mc", "fd"}, w);
  try {
    s.method = engine::parse_method(get_or(j, "method", std::string("fourier"), w));
  } catch (const std::invalid_argument& e) {
    throw ConfigError(std::string("pricer: ") + e.what());
  }
  if (j.contains("quad")) s.quad = parse_quad(j.at("quad"), s.quad, "pricer.quad");
  if (j.contains("quad_2d")) s.quad_2d = parse_quad(j.at("quad_2d"), s.quad_2d, "pricer.quad_2d");
  if (j.contains("mc")) {
    const auto& m = j.at("mc");
    check_keys(m, {"n_paths", "steps_per_year", "antithetic", "exact_terminal_step"}, "pricer.mc");
    s.mc.n_paths = get_or(m, "n_paths", s.mc.n_paths, "pricer.mc");
    s.mc.steps_per_year = get_or(m, "steps_per_year", s.mc.steps_per_year, "pricer.mc");
    s.mc.antithetic = get_or(m, "antithetic", s.mc.antithetic, "pricer.mc");
    s.mc.exact_terminal_step = get_or(m, "exact_terminal_step", s.mc.exact_terminal_step, "pricer.mc");
    if (s.mc.n_paths == 0 || (s.mc.antithetic && s.mc.n_paths % 2))
      throw ConfigError("pricer.mc.n_paths must be positive and even with antithetic variates");
    if (s.mc.steps_per_year == 0) throw ConfigError("pricer.mc.steps_per_year must be >= 1");
  }
  if (j.contains("fd")) {
    const auto& f = j.at("fd");
    const std::string wf = "pricer.fd";
    check_keys(f, {"grid_factor", "n_time", "n_space", "half_width", "center", "cell_average_payoff",
                   "rannacher_steps"},
               wf);
    s.fd.grid_factor = get_or(f, "grid_factor", s.fd.grid_factor, wf);
    s.fd.n_time = get_or(f, "n_time", s.fd.n_time, wf);
    s.fd.n_space = get_or(f, "n_space", s.fd.n_space, wf);
    s.fd.half_width = get_or(f, "half_width", s.fd.half_width, wf);
    s.fd.cell_average_payoff = get_or(f, "cell_average_payoff", s.fd.cell_average_payoff, wf);
    s.fd.rannacher_steps = get_or(f, "rannacher_steps", s.fd.rannacher_steps, wf);
    if (f.contains("center")) {
      const auto c = get_or(f, "center", std::string{}, wf);
      if (c == "strike") s.fd.center = fd::GridCenter::Strike;
      else if (c == "spot") s.fd.center = fd::GridCenter::Spot;
      else throw ConfigError(wf + ".center: expected strike or spot");
    }
  }
}

std::vector<std::size_t> parse_index_list(const json& j, const std::string& w) {
  // either an explicit list or {"from": a, "to": b}
  if (j.is_object()) {
    check_keys(j, {"from", "to"}, w);
    const auto a = require<std::size_t>(j, "from", w), b = require<std::size_t>(j, "to", w);
    if (a > b) throw ConfigError(w + ": from > to");
    std::vector<std::size_t> out;
    for (auto n = a; n <= b; ++n) out.push_back(n);
    return out;
  }
  try {
    return j.get<std::vector<std::size_t>>();
  } catch (const json::exception& e) {
    throw ConfigError(w + ": " + e.what());
  }
}

}  // namespace

RunConfig parse_config(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    throw ConfigError(std::string("invalid JSON: ") + e.what());
  }
  check_keys(j, {"model", "payoff", "spot", "domain", "binding", "pricer", "cheb", "study", "seed", "threads"},
             "config");
  RunConfig cfg;
  if (!j.contains("model")) throw ConfigError("config: missing required block 'model'");
  if (!j.contains("payoff")) throw ConfigError("config: missing required block 'payoff'");
  cfg.binding.base.model = parse_model(j.at("model"));
  cfg.binding.base.payoff = parse_payoff(j.at("payoff"));
  cfg.binding.base.spot = get_or(j, "spot", std::vector<double>{1.0}, "config");
  cfg.seed = get_or(j, "seed", cfg.seed, "config");
  cfg.threads = get_or(j, "threads", cfg.threads, "config");

  if (j.contains("domain")) {
    const auto& d = j.at("domain");
    check_keys(d, {"names", "lo", "hi"}, "domain");
    try {
      cfg.domain.emplace(require<std::vector<double>>(d, "lo", "domain"),
                         require<std::vector<double>>(d, "hi", "domain"),
                         get_or(d, "names", std::vector<std::string>{}, "domain"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("domain: ") + e.what());
    }
    // binding: axis name -> slot, defaulting to the axis name itself
    json b = j.value("binding", json::object());
    if (!b.is_object()) throw ConfigError("binding: expected an object");
    for (std::size_t i = 0; i < cfg.domain->dim(); ++i) {
      const auto name = cfg.domain->axis_name(i);
      cfg.binding.axes.emplace_back(name, b.contains(name) ? get_or(b, name, name, "binding") : name);
    }
    for (const auto& [key, _] : b.items())
      if (cfg.domain->find_axis(key) == cfg.domain->dim())
        throw ConfigError("binding: '" + key + "' is not a domain axis");
    try {
      cfg.binding.validate();
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("binding: ") + e.what());
    }
  } else if (j.contains("binding")) {
    throw ConfigError("binding: needs a domain block");
  }

  if (j.contains("pricer")) parse_pricer(j.at("pricer"), cfg.settings);
  cfg.settings.mc.seed = cfg.seed;
  cfg.settings.mc.n_threads = 1;  // parallelism sits at node level

  if (j.contains("cheb")) {
    const auto& c = j.at("cheb");
    check_keys(c, {"degrees"}, "cheb");
    try {
      cfg.degrees.emplace(require<std::vector<std::size_t>>(c, "degrees", "cheb"));
    } catch (const std::invalid_argument& e) {
      throw ConfigError(std::string("cheb: ") + e.what());
    }
    if (cfg.domain && cfg.degrees->dim() != cfg.domain->dim())
      throw ConfigError("cheb.degrees: dimension differs from the domain");
  }
  if (j.contains("study")) {
    const auto& s = j.at("study");
    check_keys(s, {"grid_points", "N_list", "M_list", "noise_floor"}, "study");
    cfg.study.grid_points = get_or(s, "grid_points", cfg.study.grid_points, "study");
    if (cfg.study.grid_points < 2) throw ConfigError("study.grid_points must be >= 2");
    if (s.contains("N_list")) cfg.study.N_list = parse_index_list(s.at("N_list"), "study.N_list");
    if (s.contains("M_list")) cfg.study.M_list = parse_index_list(s.at("M_list"), "study.M_list");
    cfg.study.noise_floor = get_or(s, "noise_floor", cfg.study.noise_floor, "study");
  }
  return cfg;
}

RunConfig load_config(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot read config file '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return parse_config(ss.str());
}

}  // namespace pop::config
