#include "pop/cheb.hpp"

#include <algorithm>
#include <cmath>
#include <iomanip>
#include <limits>
#include <numbers>
#include <sstream>

#include <json.hpp>

namespace pop::cheb {

namespace {

// Slack for points computed as lo + k/n (hi - lo), which can overshoot by an ulp.
constexpr double kDomainSlack = 1e-12;

std::vector<std::size_t> shape_of(const DegreeVector& deg) {
  std::vector<std::size_t> dims(deg.dim());
  for (std::size_t i = 0; i < deg.dim(); ++i) dims[i] = deg[i] + 1;
  return dims;
}

// Row-major (n+1)x(n+1) matrix mapping node values along one axis to coefficients.
// A DCT-I could replace this; callers only see apply_along_axis.
std::vector<double> coefficient_matrix(std::size_t n) {
  if (n == 0) return {1.0};
  const std::size_t m = n + 1;
  std::vector<double> mat(m * m);
  const double inv_n = 1.0 / static_cast<double>(n);
  for (std::size_t j = 0; j < m; ++j) {
    const double wj = (j == 0 || j == n) ? 1.0 : 2.0;
    for (std::size_t k = 0; k < m; ++k) {
      const double hk = (k == 0 || k == n) ? 0.5 : 1.0;
      // reduce j*k modulo 2n so the cosine argument stays in [0, 2 pi)
      const double arg = std::numbers::pi * static_cast<double>((j * k) % (2 * n)) * inv_n;
      mat[j * m + k] = wj * inv_n * hk * std::cos(arg);
    }
  }
  return mat;
}

// out[o, r, i] = sum_k mat[r, k] * in[o, k, i] with rows x cols matrix along `axis`.
std::vector<double> apply_along_axis(const std::vector<double>& in,
                                     const std::vector<std::size_t>& dims, std::size_t axis,
                                     const std::vector<double>& mat, std::size_t rows) {
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= dims[a];
  for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= dims[a];
  const std::size_t cols = dims[axis];
  std::vector<double> out(outer * rows * inner, 0.0);
  for (std::size_t o = 0; o < outer; ++o) {
    const double* src = in.data() + o * cols * inner;
    double* dst = out.data() + o * rows * inner;
    for (std::size_t r = 0; r < rows; ++r) {
      for (std::size_t k = 0; k < cols; ++k) {
        const double w = mat[r * cols + k];
        if (w == 0.0) continue;
        const double* s = src + k * inner;
        double* d = dst + r * inner;
        for (std::size_t i = 0; i < inner; ++i) d[i] += w * s[i];
      }
    }
  }
  return out;
}

// T_0(t), ..., T_n(t) by the three-term recurrence.
void chebyshev_values(double t, std::size_t n, double* out) {
  out[0] = 1.0;
  if (n == 0) return;
  out[1] = t;
  for (std::size_t j = 2; j <= n; ++j) out[j] = 2.0 * t * out[j - 1] - out[j - 2];
}

std::string fmt17(double v) {
  std::ostringstream os;
  os << std::setprecision(17) << v;
  return os.str();
}

}  // namespace

// ---------------------------------------------------------------------------
// Hyperrectangle / DegreeVector

Hyperrectangle::Hyperrectangle(std::vector<double> lo, std::vector<double> hi,
                               std::vector<std::string> names)
    : lo_(std::move(lo)), hi_(std::move(hi)), names_(std::move(names)) {
  if (lo_.empty()) throw std::invalid_argument("hyperrectangle: dimension must be >= 1");
  if (lo_.size() != hi_.size())
    throw std::invalid_argument("hyperrectangle: lo/hi length mismatch");
  if (!names_.empty() && names_.size() != lo_.size())
    throw std::invalid_argument("hyperrectangle: names length mismatch");
  for (std::size_t i = 0; i < lo_.size(); ++i) {
    if (!std::isfinite(lo_[i]) || !std::isfinite(hi_[i]))
      throw std::invalid_argument("hyperrectangle: non-finite bound on axis " + axis_name(i));
    if (!(lo_[i] < hi_[i]))
      throw std::invalid_argument("hyperrectangle: need lo < hi on axis " + axis_name(i));
  }
}

std::string Hyperrectangle::axis_name(std::size_t i) const {
  if (i < names_.size() && !names_[i].empty()) return names_[i];
  return "x" + std::to_string(i);
}

std::size_t Hyperrectangle::find_axis(std::string_view name) const {
  for (std::size_t i = 0; i < dim(); ++i)
    if (axis_name(i) == name) return i;
  return dim();
}

double Hyperrectangle::volume() const {
  double v = 1.0;
  for (std::size_t i = 0; i < dim(); ++i) v *= width(i);
  return v;
}

DegreeVector::DegreeVector(std::vector<std::size_t> degrees, std::size_t node_cap)
    : n_(std::move(degrees)) {
  if (n_.empty()) throw std::invalid_argument("degree vector: dimension must be >= 1");
  double count = 1.0;
  for (auto n : n_) count *= static_cast<double>(n) + 1.0;
  if (count > static_cast<double>(node_cap))
    throw std::invalid_argument("degree vector: node count " + fmt17(count) +
                                " exceeds cap " + std::to_string(node_cap));
}

DegreeVector DegreeVector::uniform(std::size_t dim, std::size_t n) {
  return DegreeVector(std::vector<std::size_t>(dim, n));
}

std::size_t DegreeVector::node_count() const noexcept {
  std::size_t c = 1;
  for (auto n : n_) c *= n + 1;
  return c;
}

// ---------------------------------------------------------------------------
// Nodes and maps

std::vector<double> cheb_nodes(std::size_t n) {
  if (n == 0) return {1.0};
  std::vector<double> nodes(n + 1);
  for (std::size_t k = 0; k <= n; ++k) {
    // symmetric evaluation keeps x_k = -x_{n-k} and exact zeros
    if (2 * k == n) {
      nodes[k] = 0.0;
    } else if (2 * k < n) {
      nodes[k] = std::cos(std::numbers::pi * static_cast<double>(k) / static_cast<double>(n));
    } else {
      nodes[k] = -std::cos(std::numbers::pi * static_cast<double>(n - k) /
                           static_cast<double>(n));
    }
  }
  nodes.front() = 1.0;
  nodes.back() = -1.0;
  return nodes;
}

Point to_domain(std::span<const double> p_ref, const Hyperrectangle& dom) {
  if (p_ref.size() != dom.dim())
    throw std::invalid_argument("to_domain: dimension mismatch");
  Point out(p_ref.size());
  for (std::size_t i = 0; i < p_ref.size(); ++i) {
    const double t = p_ref[i];
    if (!(t >= -1.0 && t <= 1.0))
      throw DomainError("to_domain: reference coordinate " + fmt17(t) + " outside [-1,1] on axis " +
                            dom.axis_name(i),
                        i, dom.axis_name(i));
    if (t == 1.0) {
      out[i] = dom.hi(i);
    } else if (t == -1.0) {
      out[i] = dom.lo(i);
    } else {
      out[i] = dom.hi(i) + 0.5 * (dom.lo(i) - dom.hi(i)) * (1.0 - t);
    }
  }
  return out;
}

Point from_domain(std::span<const double> p, const Hyperrectangle& dom) {
  if (p.size() != dom.dim()) throw std::invalid_argument("from_domain: dimension mismatch");
  Point out(p.size());
  for (std::size_t i = 0; i < p.size(); ++i)
    out[i] = (2.0 * p[i] - dom.lo(i) - dom.hi(i)) / dom.width(i);
  return out;
}

std::vector<Point> tensor_nodes(const DegreeVector& deg, const Hyperrectangle& dom) {
  if (deg.dim() != dom.dim())
    throw std::invalid_argument("tensor_nodes: degree/domain dimension mismatch");
  const std::size_t d = deg.dim();
  std::vector<std::vector<double>> axis_nodes(d);
  for (std::size_t i = 0; i < d; ++i) axis_nodes[i] = cheb_nodes(deg[i]);

  std::vector<Point> pts;
  pts.reserve(deg.node_count());
  std::vector<std::size_t> k(d, 0);
  Point ref(d);
  for (std::size_t count = 0; count < deg.node_count(); ++count) {
    for (std::size_t i = 0; i < d; ++i) ref[i] = axis_nodes[i][k[i]];
    pts.push_back(to_domain(ref, dom));
    for (std::size_t i = d; i-- > 0;) {
      if (++k[i] <= deg[i]) break;
      k[i] = 0;
    }
  }
  return pts;
}

// ---------------------------------------------------------------------------
// Interpolant

Interpolant::Interpolant(Hyperrectangle domain, DegreeVector degrees, std::vector<double> coeffs,
                         Meta meta)
    : domain_(std::move(domain)),
      degrees_(std::move(degrees)),
      coeffs_(std::move(coeffs)),
      meta_(std::move(meta)) {
  if (domain_.dim() != degrees_.dim())
    throw std::invalid_argument("interpolant: degree/domain dimension mismatch");
  if (coeffs_.size() != degrees_.node_count())
    throw std::invalid_argument("interpolant: expected " + std::to_string(degrees_.node_count()) +
                                " coefficients, got " + std::to_string(coeffs_.size()));
}

Interpolant Interpolant::with_meta(const Meta& extra) const {
  Meta m = meta_;
  for (const auto& [k, v] : extra) m[k] = v;
  return Interpolant(domain_, degrees_, coeffs_, std::move(m));
}

double Interpolant::evaluate(std::span<const double> p, bool allow_extrapolation) const {
  const std::size_t d = dim();
  if (p.size() != d)
    throw std::invalid_argument("evaluate: point has " + std::to_string(p.size()) +
                                " coordinates, domain has " + std::to_string(d));

  std::size_t max_len = 0;
  for (std::size_t i = 0; i < d; ++i) max_len = std::max(max_len, degrees_[i] + 1);
  std::vector<double> tvals(d * max_len);

  for (std::size_t i = 0; i < d; ++i) {
    double t = (2.0 * p[i] - domain_.lo(i) - domain_.hi(i)) / domain_.width(i);
    if (!std::isfinite(t))
      throw DomainError("evaluate: non-finite coordinate on axis " + domain_.axis_name(i), i,
                        domain_.axis_name(i));
    if (!allow_extrapolation) {
      if (t < -1.0 - kDomainSlack || t > 1.0 + kDomainSlack)
        throw DomainError("evaluate: " + domain_.axis_name(i) + "=" + fmt17(p[i]) +
                              " outside [" + fmt17(domain_.lo(i)) + ", " + fmt17(domain_.hi(i)) +
                              "]",
                          i, domain_.axis_name(i));
      t = std::clamp(t, -1.0, 1.0);
    }
    chebyshev_values(t, degrees_[i], tvals.data() + i * max_len);
  }

  // Contract the coefficient tensor one axis at a time, last axis first.
  std::vector<double> buf = coeffs_;
  std::size_t size = buf.size();
  for (std::size_t i = d; i-- > 0;) {
    const std::size_t len = degrees_[i] + 1;
    const double* tv = tvals.data() + i * max_len;
    const std::size_t outer = size / len;
    for (std::size_t o = 0; o < outer; ++o) {
      const double* row = buf.data() + o * len;
      double s = 0.0;
      for (std::size_t j = 0; j < len; ++j) s += row[j] * tv[j];
      buf[o] = s;
    }
    size = outer;
  }
  return buf[0];
}

std::vector<double> Interpolant::evaluate_batch(const std::vector<Point>& points,
                                                bool allow_extrapolation) const {
  std::vector<double> out;
  out.reserve(points.size());
  for (std::size_t n = 0; n < points.size(); ++n) {
    try {
      out.push_back(evaluate(points[n], allow_extrapolation));
    } catch (const DomainError& e) {
      throw DomainError("point #" + std::to_string(n) + ": " + e.what(), e.axis(), e.axis_name());
    }
  }
  return out;
}

Interpolant Interpolant::differentiate(std::size_t axis) const {
  if (axis >= dim()) throw std::invalid_argument("differentiate: axis out of range");
  const std::size_t n = degrees_[axis];
  if (n == 0)
    throw std::invalid_argument("differentiate: axis " + domain_.axis_name(axis) +
                                " has degree 0");

  // Derivative of sum a_k T_k is sum b_k T_k with b_{k-1} = b_{k+1} + 2k a_k, b_0 halved.
  const auto dims = shape_of(degrees_);
  std::size_t outer = 1, inner = 1;
  for (std::size_t a = 0; a < axis; ++a) outer *= dims[a];
  for (std::size_t a = axis + 1; a < dims.size(); ++a) inner *= dims[a];
  const double scale = 2.0 / domain_.width(axis);

  std::vector<double> out(outer * n * inner, 0.0);
  std::vector<double> a(n + 1), b(n + 2);
  for (std::size_t o = 0; o < outer; ++o) {
    for (std::size_t i = 0; i < inner; ++i) {
      for (std::size_t k = 0; k <= n; ++k) a[k] = coeffs_[(o * (n + 1) + k) * inner + i];
      std::fill(b.begin(), b.end(), 0.0);
      for (std::size_t k = n; k >= 1; --k) b[k - 1] = b[k + 1] + 2.0 * static_cast<double>(k) * a[k];
      b[0] *= 0.5;
      for (std::size_t k = 0; k < n; ++k) out[(o * n + k) * inner + i] = scale * b[k];
    }
  }

  auto deg = degrees_.values();
  deg[axis] = n - 1;
  Meta m = meta_;
  m["derivative_axes"] = m.count("derivative_axes")
                             ? m["derivative_axes"] + "," + domain_.axis_name(axis)
                             : domain_.axis_name(axis);
  return Interpolant(domain_, DegreeVector(std::move(deg)), std::move(out), std::move(m));
}

Interpolant build_interpolant(const Hyperrectangle& dom, const DegreeVector& deg,
                              std::span<const double> node_values, Meta meta) {
  if (dom.dim() != deg.dim())
    throw std::invalid_argument("build_interpolant: degree/domain dimension mismatch");
  if (node_values.size() != deg.node_count())
    throw std::invalid_argument("build_interpolant: expected " +
                                std::to_string(deg.node_count()) + " node values, got " +
                                std::to_string(node_values.size()));
  for (std::size_t n = 0; n < node_values.size(); ++n)
    if (!std::isfinite(node_values[n]))
      throw std::invalid_argument("build_interpolant: non-finite node value at index " +
                                  std::to_string(n));

  const auto dims = shape_of(deg);
  std::vector<double> c(node_values.begin(), node_values.end());
  for (std::size_t axis = 0; axis < deg.dim(); ++axis)
    c = apply_along_axis(c, dims, axis, coefficient_matrix(deg[axis]), dims[axis]);
  return Interpolant(dom, deg, std::move(c), std::move(meta));
}

// ---------------------------------------------------------------------------
// Serialization

std::string serialize(const Interpolant& interp) {
  const auto& dom = interp.domain();
  auto num_array = [](const auto& xs) {
    std::string s = "[";
    for (std::size_t i = 0; i < xs.size(); ++i) {
      if (i) s += ',';
      s += fmt17(static_cast<double>(xs[i]));
    }
    return s + "]";
  };
  std::vector<std::string> names(dom.dim());
  for (std::size_t i = 0; i < dom.dim(); ++i) names[i] = dom.axis_name(i);

  std::string degrees = "[";
  for (std::size_t i = 0; i < interp.degrees().dim(); ++i) {
    if (i) degrees += ',';
    degrees += std::to_string(interp.degrees()[i]);
  }
  degrees += "]";

  std::string out = "{\"version\":" + std::to_string(kFormatVersion) + ",\n";
  out += "\"domain\":{\"lo\":" + num_array(dom.lo()) + ",\"hi\":" + num_array(dom.hi()) +
         ",\"names\":" + nlohmann::json(names).dump() + "},\n";
  out += "\"degrees\":" + degrees + ",\n";
  out += "\"coeffs\":" + num_array(interp.coeffs()) + ",\n";
  out += "\"meta\":" + nlohmann::json(interp.meta()).dump() + "}\n";
  return out;
}

Interpolant deserialize(std::string_view payload) {
  nlohmann::json j;
  try {
    j = nlohmann::json::parse(payload);
  } catch (const nlohmann::json::parse_error& e) {
    throw FormatError(std::string("surrogate: malformed JSON: ") + e.what());
  }
  if (!j.is_object()) throw FormatError("surrogate: top level must be an object");
  for (const char* key : {"version", "domain", "degrees", "coeffs"})
    if (!j.contains(key)) throw FormatError(std::string("surrogate: missing key '") + key + "'");
  if (!j["version"].is_number_integer())
    throw FormatError("surrogate: version must be an integer");
  if (j["version"].get<int>() != kFormatVersion)
    throw VersionError("surrogate: unsupported format version " + j["version"].dump() +
                       " (expected " + std::to_string(kFormatVersion) + ")");
  try {
    const auto& jd = j.at("domain");
    auto lo = jd.at("lo").get<std::vector<double>>();
    auto hi = jd.at("hi").get<std::vector<double>>();
    std::vector<std::string> names;
    if (jd.contains("names")) names = jd["names"].get<std::vector<std::string>>();
    auto deg = j.at("degrees").get<std::vector<std::size_t>>();
    auto coeffs = j.at("coeffs").get<std::vector<double>>();
    Meta meta;
    if (j.contains("meta")) meta = j["meta"].get<Meta>();
    DegreeVector dv(std::move(deg));
    if (coeffs.size() != dv.node_count())
      throw FormatError("surrogate: " + std::to_string(coeffs.size()) +
                        " coefficients for degrees requiring " +
                        std::to_string(dv.node_count()));
    return Interpolant(Hyperrectangle(std::move(lo), std::move(hi), std::move(names)),
                       std::move(dv), std::move(coeffs), std::move(meta));
  } catch (const nlohmann::json::exception& e) {
    throw FormatError(std::string("surrogate: bad field: ") + e.what());
  } catch (const std::invalid_argument& e) {
    throw FormatError(std::string("surrogate: inconsistent payload: ") + e.what());
  }
}

}  // namespace pop::cheb
