#include "pop/cli.hpp"

#include <cstdio>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include <CLI11.hpp>

#include "pop/config.hpp"
#include "pop/error_bounds.hpp"

namespace pop::cli {

namespace {

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct Common {
  std::string config_path;
  std::string out_path;
  std::optional<std::uint64_t> seed;
  std::optional<std::size_t> threads;
};

config::RunConfig load(const Common& c) {
  auto cfg = config::load_config(c.config_path);
  if (c.seed) {
    cfg.seed = *c.seed;
    cfg.settings.mc.seed = *c.seed;
  }
  if (c.threads) cfg.threads = *c.threads;
  return cfg;
}

void require_surrogate_blocks(const config::RunConfig& cfg) {
  if (!cfg.domain) throw config::ConfigError("config: missing required block 'domain'");
  if (!cfg.degrees) throw config::ConfigError("config: missing required block 'cheb'");
}

// Writes to the -o file when given, else stdout.
class Output {
 public:
  explicit Output(const std::string& path) {
    if (!path.empty()) {
      file_.open(path);
      if (!file_) throw UsageError("cannot write '" + path + "'");
    }
  }
  std::ostream& os() { return file_.is_open() ? file_ : std::cout; }

 private:
  std::ofstream file_;
};

std::map<std::string, double> parse_assignments(const std::string& text) {
  std::map<std::string, double> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    const auto eq = item.find('=');
    if (eq == std::string::npos) throw UsageError("point entry '" + item + "' is not name=value");
    auto trim = [](std::string s) {
      const auto a = s.find_first_not_of(" \t"), b = s.find_last_not_of(" \t\r");
      return a == std::string::npos ? std::string{} : s.substr(a, b - a + 1);
    };
    const auto name = trim(item.substr(0, eq));
    const auto value = trim(item.substr(eq + 1));
    try {
      std::size_t used = 0;
      const double v = std::stod(value, &used);
      if (used != value.size()) throw std::invalid_argument(value);
      out[name] = v;
    } catch (const std::exception&) {
      throw UsageError("point entry '" + item + "' has no numeric value");
    }
  }
  return out;
}

double take(std::map<std::string, double>& a, const std::string& name) {
  auto it = a.find(name);
  if (it == a.end()) throw UsageError("point lacks '" + name + "'");
  const double v = it->second;
  a.erase(it);
  return v;
}

cheb::Point to_point(const cheb::Hyperrectangle& dom, const std::string& text) {
  auto a = parse_assignments(text);
  cheb::Point p(dom.dim());
  for (std::size_t i = 0; i < dom.dim(); ++i) p[i] = take(a, dom.axis_name(i));
  if (!a.empty()) throw UsageError("point has unknown axis '" + a.begin()->first + "'");
  return p;
}

std::string fmt12(double v) {
  char buf[64];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

std::string read_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw UsageError("cannot read '" + path + "'");
  std::stringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

// ---------------------------------------------------------------------------

int cmd_build(const Common& c, const std::string& nodes_path) {
  const auto cfg = load(c);
  require_surrogate_blocks(cfg);
  const auto s = engine::build_surrogate(cfg.binding, *cfg.domain, *cfg.degrees, cfg.settings, cfg.threads);
  if (c.out_path.empty()) {
    std::cout << cheb::serialize(s) << "\n";
  } else {
    std::ofstream out(c.out_path);
    if (!out) throw UsageError("cannot write '" + c.out_path + "'");
    out << cheb::serialize(s) << "\n";
  }
  if (!nodes_path.empty()) {
    std::ofstream log(nodes_path);
    if (!log) throw UsageError("cannot write '" + nodes_path + "'");
    const auto& dom = s.domain();
    for (std::size_t i = 0; i < dom.dim(); ++i) log << dom.axis_name(i) << ",";
    log << "price\n";
    log.precision(17);
    for (const auto& node : cheb::tensor_nodes(s.degrees(), dom)) {
      for (double x : node) log << x << ",";
      log << s.evaluate(node) << "\n";
    }
  }
  std::cerr << "offline time: " << s.meta().at("offline_ms") << " ms, " << s.coeffs().size()
            << " coefficients\n";
  return kOk;
}

int cmd_price(const std::string& surrogate_path, const std::string& point, const std::string& batch,
              bool moneyness, bool american) {
  const auto s = cheb::deserialize(read_file(surrogate_path));
  std::vector<std::string> lines;
  if (!point.empty()) lines.push_back(point);
  if (!batch.empty()) {
    std::stringstream ss(read_file(batch));
    std::string line;
    while (std::getline(ss, line))
      if (line.find_first_not_of(" \t\r") != std::string::npos) lines.push_back(line);
  }
  if (lines.empty()) throw UsageError("price: give --point or --batch");
  for (const auto& l : lines) {
    double v;
    if (moneyness) {
      auto a = parse_assignments(l);
      const double T = take(a, "T"), S0 = take(a, "S0"), K = take(a, "K");
      if (!a.empty()) throw UsageError("point has unknown entry '" + a.begin()->first + "'");
      v = engine::price_call_via_moneyness(s, T, S0, K);
    } else if (american) {
      const auto& dom = s.domain();
      if (dom.find_axis("K") == dom.dim() || dom.find_axis("T") == dom.dim())
        throw UsageError("--american needs a surrogate over axes K and T");
      v = s.evaluate(to_point(dom, l));
    } else {
      v = s.evaluate(to_point(s.domain(), l));
    }
    std::cout << fmt12(v) << "\n";
  }
  return kOk;
}

int cmd_study(const Common& c) {
  const auto cfg = load(c);
  require_surrogate_blocks(cfg);
  const auto s = engine::build_surrogate(cfg.binding, *cfg.domain, *cfg.degrees, cfg.settings, cfg.threads);
  const engine::GridSpec grid(*cfg.domain, cfg.study.grid_points);
  auto settings = cfg.settings;
  settings.mc.seed = cfg.seed + 1;  // fresh paths for the reference grid
  const auto rep = engine::error_study(s, engine::make_reference(cfg.binding, settings), grid, cfg.threads);
  Output out(c.out_path);
  auto& os = out.os();
  os.precision(10);
  os << "{\n  \"eps_linf\": " << rep.eps_linf << ",\n  \"eps_l2\": " << rep.eps_l2 << ",\n  \"argmax\": {";
  for (std::size_t i = 0; i < rep.argmax.size(); ++i)
    os << (i ? ", " : "") << "\"" << cfg.domain->axis_name(i) << "\": " << rep.argmax[i];
  os << "},\n  \"reference_at_argmax\": " << rep.reference_at_argmax
     << ",\n  \"surrogate_at_argmax\": " << rep.surrogate_at_argmax << ",\n  \"grid_points\": " << rep.grid_points
     << ",\n  \"offline_ms\": " << rep.offline_ms << ",\n  \"online_ms\": " << rep.online_ms
     << ",\n  \"reference_ms\": " << rep.reference_ms << "\n}\n";
  return kOk;
}

int cmd_converge(const Common& c) {
  const auto cfg = load(c);
  if (!cfg.domain) throw config::ConfigError("config: missing required block 'domain'");
  if (cfg.study.N_list.empty()) throw config::ConfigError("study.N_list is empty");
  const engine::GridSpec grid(*cfg.domain, cfg.study.grid_points);
  const auto res = engine::convergence_study(engine::make_reference(cfg.binding, cfg.settings), *cfg.domain,
                                             cfg.study.N_list, grid, cfg.study.noise_floor, cfg.threads);
  Output out(c.out_path);
  auto& os = out.os();
  os << "N,eps_linf,eps_l2,offline_ms,online_ms\n";
  os.precision(10);
  for (const auto& r : res.rows)
    os << r.N << "," << r.eps_linf << "," << r.eps_l2 << "," << r.offline_ms << "," << r.online_ms << "\n";
  if (res.slope)
    std::cerr << "slope: " << *res.slope << " (" << res.fitted_points << " pre-saturation points)\n";
  else
    std::cerr << "slope: saturated\n";
  return kOk;
}

int cmd_timing(const Common& c) {
  const auto cfg = load(c);
  require_surrogate_blocks(cfg);
  if (cfg.study.M_list.empty()) throw config::ConfigError("study.M_list is empty");
  const auto s = engine::build_surrogate(cfg.binding, *cfg.domain, *cfg.degrees, cfg.settings, cfg.threads);
  const double offline = std::stod(s.meta().at("offline_ms"));
  const auto res = engine::timing_study(s, engine::make_reference(cfg.binding, cfg.settings), cfg.study.M_list,
                                        offline, cfg.threads ? cfg.threads : 1);
  Output out(c.out_path);
  auto& os = out.os();
  os << "M,online_ms,offline_plus_online_ms,reference_ms\n";
  os.precision(10);
  for (const auto& r : res.rows)
    os << r.M << "," << r.online_ms << "," << r.offline_plus_online_ms << "," << r.reference_ms << "\n";
  if (res.break_even_M)
    std::cerr << "break-even M: " << *res.break_even_M << "\n";
  else
    std::cerr << "break-even M: not reached\n";
  return kOk;
}

int cmd_plan(double V, const std::vector<double>& rho, double target, std::size_t max_per_axis, double eps_bar) {
  const bounds::EllipseParams ell(rho);
  const auto deg = bounds::plan_degrees(V, ell, target, max_per_axis);
  for (std::size_t i = 0; i < deg.dim(); ++i) std::cout << (i ? "," : "") << deg[i];
  std::cout << "\n";
  std::cerr << "bound: " << bounds::bound_multi({V, ell, deg});
  if (eps_bar > 0.0) std::cerr << ", with node noise: " << bounds::noisy_bound({V, ell, deg}, eps_bar);
  std::cerr << "\n";
  return kOk;
}

int cmd_reference_price(const Common& c, const std::string& point) {
  auto cfg = load(c);
  cfg.settings.mc.n_threads = cfg.threads;
  engine::Problem pb = cfg.binding.base;
  if (!point.empty()) {
    if (!cfg.domain) throw UsageError("--point needs a domain block naming the axes");
    pb = cfg.binding.bind(to_point(*cfg.domain, point));
  }
  const auto res = engine::reference_price(pb, cfg.settings);
  std::cout << fmt12(res.price);
  if (res.conf_half_width > 0.0) std::cout << "," << fmt12(res.conf_half_width);
  std::cout << "\n";
  return kOk;
}

}  // namespace

int run(int argc, char** argv) {
  CLI::App app{"Chebyshev surrogate pricing: build, evaluate and study parametric option price surfaces"};
  app.require_subcommand(1);
  app.set_help_all_flag("--help-all");

  Common common;
  auto add_common = [&](CLI::App* sub, bool with_out) {
    sub->add_option("config", common.config_path, "JSON run configuration")->required()->check(CLI::ExistingFile);
    if (with_out) sub->add_option("-o,--out", common.out_path, "Output file (default stdout)");
    sub->add_option("--seed", common.seed, "Override the configured random seed");
    sub->add_option("--threads", common.threads, "Worker threads (default POP_THREADS or all cores)");
  };

  std::string nodes_path;
  auto* build = app.add_subcommand("build", "Price all Chebyshev nodes and write the surrogate JSON");
  add_common(build, true);
  build->add_option("--nodes", nodes_path, "Also write node coordinates and prices as CSV");

  std::string surrogate_path, point, batch;
  bool moneyness = false, american = false;
  auto* price = app.add_subcommand("price", "Evaluate a stored surrogate");
  price->add_option("surrogate", surrogate_path, "Surrogate JSON")->required()->check(CLI::ExistingFile);
  price->add_option("--point", point, "Point as name=value,...");
  price->add_option("--batch", batch, "File with one point per line")->check(CLI::ExistingFile);
  price->add_flag("--moneyness", moneyness, "Point gives T,S0,K for a (T, moneyness) call surrogate");
  price->add_flag("--american", american, "Point gives K,T for an American put surrogate");

  auto* study = app.add_subcommand("study", "Error study of one surrogate on the evaluation grid (JSON)");
  add_common(study, true);
  auto* converge = app.add_subcommand("converge", "Convergence study over study.N_list (CSV)");
  add_common(converge, true);
  auto* timing = app.add_subcommand("timing", "Timing study over study.M_list (CSV)");
  add_common(timing, true);

  double V = 1.0, target = 1e-6, eps_bar = 0.0;
  std::vector<double> rho;
  std::size_t max_per_axis = 200;
  auto* plan = app.add_subcommand("plan", "Smallest uniform degree meeting an error target");
  plan->add_option("--V", V, "Bound of |price| on the Bernstein ellipse")->required();
  plan->add_option("--rho", rho, "Ellipse parameter per axis")->required();
  plan->add_option("--target", target, "Target interpolation error")->required();
  plan->add_option("--max", max_per_axis, "Largest degree to try");
  plan->add_option("--noise", eps_bar, "Node price noise level, reported alongside");

  std::string ref_point;
  auto* ref = app.add_subcommand("reference-price", "Price once with the configured reference pricer");
  add_common(ref, false);
  ref->add_option("--point", ref_point, "Axis values as name=value,...");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? kOk : kUsage;
  }

  try {
    if (*build) return cmd_build(common, nodes_path);
    if (*price) return cmd_price(surrogate_path, point, batch, moneyness, american);
    if (*study) return cmd_study(common);
    if (*converge) return cmd_converge(common);
    if (*timing) return cmd_timing(common);
    if (*plan) return cmd_plan(V, rho, target, max_per_axis, eps_bar);
    if (*ref) return cmd_reference_price(common, ref_point);
  } catch (const config::ConfigError& e) {
    std::cerr << "config error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cheb::FormatError& e) {
    std::cerr << "surrogate file error: " << e.what() << "\n";
    return kConfigError;
  } catch (const UsageError& e) {
    std::cerr << "error: " << e.what() << "\n";
    return kConfigError;
  } catch (const cheb::DomainError& e) {
    std::cerr << "out of domain: axis '" << e.axis_name() << "': " << e.what() << "\n";
    return kOutOfDomain;
  } catch (const std::exception& e) {
    std::cerr << "pricing error: " << e.what() << "\n";
    return kPricingError;
  }
  return kUsage;
}

}  // namespace pop::cli
