#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace pop::cheb {

using Point = std::vector<double>;
using Meta = std::map<std::string, std::string>;

/// Raised when a point lies outside an interpolation domain (or [-1,1]^D).
class DomainError : public std::domain_error {
 public:
  DomainError(const std::string& what, std::size_t axis, std::string axis_name)
      : std::domain_error(what), axis_(axis), axis_name_(std::move(axis_name)) {}
  std::size_t axis() const noexcept { return axis_; }
  const std::string& axis_name() const noexcept { return axis_name_; }

 private:
  std::size_t axis_;
  std::string axis_name_;
};

/// Malformed or inconsistent surrogate payload.
class FormatError : public std::runtime_error {
  using std::runtime_error::runtime_error;
};

/// Surrogate payload written by a newer/older format revision.
class VersionError : public FormatError {
  using FormatError::FormatError;
};

/// Axis-aligned box [lo_1,hi_1] x ... x [lo_D,hi_D] with lo_i < hi_i.
class Hyperrectangle {
 public:
  Hyperrectangle(std::vector<double> lo, std::vector<double> hi,
                 std::vector<std::string> names = {});

  std::size_t dim() const noexcept { return lo_.size(); }
  const std::vector<double>& lo() const noexcept { return lo_; }
  const std::vector<double>& hi() const noexcept { return hi_; }
  const std::vector<std::string>& names() const noexcept { return names_; }
  double lo(std::size_t i) const { return lo_.at(i); }
  double hi(std::size_t i) const { return hi_.at(i); }
  double width(std::size_t i) const { return hi_.at(i) - lo_.at(i); }
  /// Label of axis i, or "x<i>" when the domain is unnamed.
  std::string axis_name(std::size_t i) const;
  /// Index of the axis with the given label, or dim() if absent.
  std::size_t find_axis(std::string_view name) const;
  /// Product of the axis widths.
  double volume() const;

  bool operator==(const Hyperrectangle&) const = default;

 private:
  std::vector<double> lo_, hi_;
  std::vector<std::string> names_;
};

/// Per-axis polynomial degrees (N_1, ..., N_D).
class DegreeVector {
 public:
  static constexpr std::size_t kDefaultNodeCap = std::size_t{1} << 24;

  explicit DegreeVector(std::vector<std::size_t> degrees,
                        std::size_t node_cap = kDefaultNodeCap);
  /// Same degree n on each of dim axes.
  static DegreeVector uniform(std::size_t dim, std::size_t n);

  std::size_t dim() const noexcept { return n_.size(); }
  std::size_t operator[](std::size_t i) const { return n_.at(i); }
  const std::vector<std::size_t>& values() const noexcept { return n_; }
  /// prod(N_i + 1): number of tensor nodes, and of coefficients.
  std::size_t node_count() const noexcept;

  bool operator==(const DegreeVector&) const = default;

 private:
  std::vector<std::size_t> n_;
};

/// Chebyshev extrema cos(pi k / n), k = 0..n (descending). n = 0 gives {1}.
std::vector<double> cheb_nodes(std::size_t n);

/// Affine map [-1,1]^D -> dom, per axis; +1 maps to hi and -1 to lo.
Point to_domain(std::span<const double> p_ref, const Hyperrectangle& dom);
/// Inverse of to_domain. Does not range-check.
Point from_domain(std::span<const double> p, const Hyperrectangle& dom);

/// Full tensor grid of Chebyshev nodes mapped into dom, row-major (last axis fastest).
std::vector<Point> tensor_nodes(const DegreeVector& deg, const Hyperrectangle& dom);

/// Tensorized Chebyshev interpolant sum_j c_j prod_i T_{j_i}(t_i(p)). Immutable.
class Interpolant {
 public:
  Interpolant(Hyperrectangle domain, DegreeVector degrees, std::vector<double> coeffs,
              Meta meta = {});

  const Hyperrectangle& domain() const noexcept { return domain_; }
  const DegreeVector& degrees() const noexcept { return degrees_; }
  const std::vector<double>& coeffs() const noexcept { return coeffs_; }
  const Meta& meta() const noexcept { return meta_; }
  std::size_t dim() const noexcept { return domain_.dim(); }

  /// Copy with additional/overwritten metadata entries.
  Interpolant with_meta(const Meta& extra) const;

  /// Throws DomainError outside the (closed) domain unless allow_extrapolation.
  double evaluate(std::span<const double> p, bool allow_extrapolation = false) const;
  double operator()(std::span<const double> p) const { return evaluate(p); }

  /// Elementwise evaluate; a DomainError names the offending index.
  std::vector<double> evaluate_batch(const std::vector<Point>& points,
                                     bool allow_extrapolation = false) const;

  /// Exact derivative along axis; degree on that axis drops by one.
  Interpolant differentiate(std::size_t axis) const;

 private:
  Hyperrectangle domain_;
  DegreeVector degrees_;
  std::vector<double> coeffs_;
  Meta meta_;
};

/// Coefficients from node values given in tensor_nodes() order.
Interpolant build_interpolant(const Hyperrectangle& dom, const DegreeVector& deg,
                              std::span<const double> node_values, Meta meta = {});

/// JSON surrogate file (format version 1).
std::string serialize(const Interpolant& interp);
Interpolant deserialize(std::string_view payload);

inline constexpr int kFormatVersion = 1;

}  // namespace pop::cheb
