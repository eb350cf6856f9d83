#include <gtest/gtest.h>

#include <cmath>
#include <numbers>
#include <random>

#include "pop/cheb.hpp"

using namespace pop::cheb;

namespace {

Hyperrectangle unit(std::size_t d) { return {std::vector<double>(d, -1.0), std::vector<double>(d, 1.0)}; }

// T_n(x) via cos(n arccos x): an independent path from the recurrence in the library
double cheb_t(std::size_t n, double x) { return std::cos(static_cast<double>(n) * std::acos(std::clamp(x, -1.0, 1.0))); }

double cheb_t_multi(const std::vector<std::size_t>& mu, const Point& x) {
  double v = 1.0;
  for (std::size_t i = 0; i < mu.size(); ++i) v *= cheb_t(mu[i], x[i]);
  return v;
}

Interpolant interpolate(const Hyperrectangle& dom, const DegreeVector& deg,
                        const std::function<double(const Point&)>& f) {
  std::vector<double> values;
  for (const auto& p : tensor_nodes(deg, dom)) values.push_back(f(p));
  return build_interpolant(dom, deg, values);
}

Point random_point(const Hyperrectangle& dom, std::mt19937_64& rng) {
  Point p(dom.dim());
  for (std::size_t i = 0; i < dom.dim(); ++i)
    p[i] = std::uniform_real_distribution<double>(dom.lo(i), dom.hi(i))(rng);
  return p;
}

}  // namespace

TEST(ChebNodes, SmallDegrees) {
  EXPECT_EQ(cheb_nodes(0), std::vector<double>{1.0});
  const auto n2 = cheb_nodes(2);
  ASSERT_EQ(n2.size(), 3u);
  EXPECT_EQ(n2[0], 1.0);
  EXPECT_NEAR(n2[1], 0.0, 1e-16);
  EXPECT_EQ(n2[2], -1.0);
  const auto n4 = cheb_nodes(4);
  const double h = std::sqrt(2.0) / 2.0;
  const std::vector<double> want{1.0, h, 0.0, -h, -1.0};
  for (std::size_t k = 0; k < 5; ++k) EXPECT_NEAR(n4[k], want[k], 1e-16);
}

TEST(ChebNodes, DescendingWithExactEndpoints) {
  for (std::size_t n = 1; n <= 40; ++n) {
    const auto x = cheb_nodes(n);
    EXPECT_EQ(x.front(), 1.0);
    EXPECT_EQ(x.back(), -1.0);
    for (std::size_t k = 1; k <= n; ++k) EXPECT_LT(x[k], x[k - 1]);
  }
}

TEST(Domain, Mapping) {
  const Hyperrectangle d1({0.5}, {2.0});
  EXPECT_DOUBLE_EQ(to_domain(std::vector<double>{1.0}, d1)[0], 2.0);
  EXPECT_DOUBLE_EQ(to_domain(std::vector<double>{0.0}, d1)[0], 1.25);
  const Hyperrectangle d2({0.8, 0.5}, {1.2, 2.0});
  const auto p = to_domain(std::vector<double>{-1.0, 1.0}, d2);
  EXPECT_EQ(p[0], 0.8);
  EXPECT_EQ(p[1], 2.0);
  EXPECT_THROW(to_domain(std::vector<double>{1.5}, d1), DomainError);
}

TEST(Domain, RoundTrip) {
  const Hyperrectangle d({0.8, 0.5, -3.0}, {1.2, 2.0, 7.0});
  std::mt19937_64 rng(1);
  for (int k = 0; k < 200; ++k) {
    Point ref(3);
    for (auto& v : ref) v = std::uniform_real_distribution<double>(-1.0, 1.0)(rng);
    const auto back = from_domain(to_domain(ref, d), d);
    for (std::size_t i = 0; i < 3; ++i) EXPECT_NEAR(back[i], ref[i], 1e-15 * 10);
  }
}

TEST(Domain, RejectsDegenerate) {
  EXPECT_THROW(Hyperrectangle({1.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Hyperrectangle({2.0}, {1.0}), std::invalid_argument);
  EXPECT_THROW(Hyperrectangle({}, {}), std::invalid_argument);
  EXPECT_THROW(DegreeVector({}), std::invalid_argument);
}

TEST(TensorNodes, Ordering) {
  const auto nodes = tensor_nodes(DegreeVector({1, 1}), unit(2));
  const std::vector<Point> want{{1, 1}, {1, -1}, {-1, 1}, {-1, -1}};
  EXPECT_EQ(nodes, want);
  const auto line = tensor_nodes(DegreeVector({2}), Hyperrectangle({0.0}, {2.0}));
  ASSERT_EQ(line.size(), 3u);
  EXPECT_DOUBLE_EQ(line[0][0], 2.0);
  EXPECT_NEAR(line[1][0], 1.0, 1e-15);
  EXPECT_DOUBLE_EQ(line[2][0], 0.0);
  const auto cube = tensor_nodes(DegreeVector({1, 1, 1}), unit(3));
  EXPECT_EQ(cube.size(), 8u);
  EXPECT_EQ(cube.front(), (Point{1, 1, 1}));
  EXPECT_THROW(tensor_nodes(DegreeVector({1}), unit(2)), std::invalid_argument);
}

TEST(Build, CoefficientExamples) {
  const auto id = build_interpolant(unit(1), DegreeVector({1}), std::vector<double>{1.0, -1.0});
  EXPECT_NEAR(id.coeffs()[0], 0.0, 1e-16);
  EXPECT_NEAR(id.coeffs()[1], 1.0, 1e-16);
  const auto sq = build_interpolant(unit(1), DegreeVector({2}), std::vector<double>{1.0, 0.0, 1.0});
  EXPECT_NEAR(sq.coeffs()[0], 0.5, 1e-16);
  EXPECT_NEAR(sq.coeffs()[1], 0.0, 1e-16);
  EXPECT_NEAR(sq.coeffs()[2], 0.5, 1e-16);
  const auto c = build_interpolant(unit(1), DegreeVector({2}), std::vector<double>{3.0, 3.0, 3.0});
  EXPECT_NEAR(c.coeffs()[0], 3.0, 1e-15);
  EXPECT_NEAR(c.coeffs()[1], 0.0, 1e-15);
  EXPECT_NEAR(c.coeffs()[2], 0.0, 1e-15);
}

TEST(Build, RejectsBadValues) {
  EXPECT_THROW(build_interpolant(unit(1), DegreeVector({2}), std::vector<double>{1.0, 2.0}),
               std::invalid_argument);
  EXPECT_THROW(build_interpolant(unit(1), DegreeVector({1}), std::vector<double>{1.0, NAN}),
               std::invalid_argument);
}

TEST(Build, ZeroDegreeAxisIsConstant) {
  const Hyperrectangle dom({0.0, 0.0}, {1.0, 2.0});
  const auto s = interpolate(dom, DegreeVector({0, 3}), [](const Point& p) { return 2.0 + p[1] * p[1]; });
  // the single node of axis 0 sits at its upper end
  for (double x : {0.0, 0.3, 1.0}) EXPECT_NEAR(s.evaluate(Point{x, 1.5}), 2.0 + 2.25, 1e-13);
  const auto k = build_interpolant(dom, DegreeVector({0, 0}), std::vector<double>{7.5});
  EXPECT_DOUBLE_EQ(k.evaluate(Point{0.2, 0.2}), 7.5);
}

TEST(Evaluate, Examples) {
  const Interpolant sq(unit(1), DegreeVector({2}), {0.5, 0.0, 0.5});
  EXPECT_NEAR(sq.evaluate(Point{0.5}), 0.25, 1e-16);
  const Interpolant id(unit(1), DegreeVector({1}), {0.0, 1.0});
  EXPECT_NEAR(id.evaluate(Point{-0.3}), -0.3, 1e-16);
  const Interpolant c(unit(1), DegreeVector({2}), {3.0, 0.0, 0.0});
  EXPECT_EQ(c.evaluate(Point{0.77}), 3.0);
}

TEST(Evaluate, OutsideDomain) {
  const Interpolant sq(Hyperrectangle({0.0, 0.0}, {1.0, 1.0}, {"T", "moneyness"}), DegreeVector({1, 1}),
                       {0.0, 0.0, 0.0, 1.0});
  try {
    sq.evaluate(Point{0.5, 1.5});
    FAIL() << "expected DomainError";
  } catch (const DomainError& e) {
    EXPECT_EQ(e.axis(), 1u);
    EXPECT_EQ(e.axis_name(), "moneyness");
  }
  EXPECT_NO_THROW(sq.evaluate(Point{0.5, 1.5}, true));
  EXPECT_THROW(sq.evaluate(Point{0.5}), std::invalid_argument);
}

TEST(Evaluate, Batch) {
  const Interpolant id(unit(1), DegreeVector({1}), {0.0, 1.0});
  EXPECT_TRUE(id.evaluate_batch({}).empty());
  const auto v = id.evaluate_batch({{0.5}, {-0.3}});
  EXPECT_NEAR(v[0], 0.5, 1e-16);
  EXPECT_NEAR(v[1], -0.3, 1e-16);
  const Interpolant sq(unit(1), DegreeVector({2}), {0.5, 0.0, 0.5});
  std::vector<Point> grid;
  for (int k = 0; k <= 100; ++k) grid.push_back({-1.0 + 0.02 * k});
  const auto g = sq.evaluate_batch(grid);
  for (std::size_t k = 0; k < grid.size(); ++k) EXPECT_NEAR(g[k], grid[k][0] * grid[k][0], 1e-14);
  try {
    id.evaluate_batch({{0.0}, {0.1}, {2.0}});
    FAIL();
  } catch (const DomainError& e) {
    EXPECT_NE(std::string(e.what()).find("#2"), std::string::npos);
  }
}

TEST(Differentiate, Examples) {
  const Interpolant sq(unit(1), DegreeVector({2}), {0.5, 0.0, 0.5});
  const auto d = sq.differentiate(0);
  ASSERT_EQ(d.degrees()[0], 1u);
  EXPECT_NEAR(d.coeffs()[0], 0.0, 1e-15);
  EXPECT_NEAR(d.coeffs()[1], 2.0, 1e-15);
  const Interpolant id(unit(1), DegreeVector({1}), {0.0, 1.0});
  EXPECT_NEAR(id.differentiate(0).evaluate(Point{0.3}), 1.0, 1e-15);
  const auto sq02 = interpolate(Hyperrectangle({0.0}, {2.0}), DegreeVector({2}), [](const Point& p) { return p[0] * p[0]; });
  const auto dsq = sq02.differentiate(0);
  for (double x = 0.0; x <= 2.0; x += 0.125) EXPECT_NEAR(dsq.evaluate(Point{x}), 2.0 * x, 1e-13);
  EXPECT_THROW(Interpolant(unit(1), DegreeVector({0}), {1.0}).differentiate(0), std::invalid_argument);
  EXPECT_THROW(sq.differentiate(1), std::invalid_argument);
}

TEST(Differentiate, MatchesCentralDifferences) {
  const Hyperrectangle dom({0.5, 0.8}, {2.0, 1.2});
  auto f = [](const Point& p) { return std::exp(-p[0]) * std::sin(3.0 * p[1]) + p[0] * p[1]; };
  const auto s = interpolate(dom, DegreeVector({20, 20}), f);
  std::mt19937_64 rng(7);
  const double h = 1e-5;
  for (std::size_t axis = 0; axis < 2; ++axis) {
    const auto ds = s.differentiate(axis);
    for (int k = 0; k < 50; ++k) {
      auto p = random_point(dom, rng);
      p[axis] = std::clamp(p[axis], dom.lo(axis) + 2 * h, dom.hi(axis) - 2 * h);
      auto up = p, dn = p;
      up[axis] += h;
      dn[axis] -= h;
      const double fd = (s.evaluate(up) - s.evaluate(dn)) / (2 * h);
      EXPECT_NEAR(ds.evaluate(p), fd, 1e-6);
    }
  }
}

TEST(Serialize, RoundTripBitExact) {
  const auto s = interpolate(Hyperrectangle({0.5, 0.8}, {2.0, 1.2}, {"T", "moneyness"}), DegreeVector({7, 4}),
                             [](const Point& p) { return std::exp(p[0] * p[1]) / 3.0; })
                     .with_meta({{"model", "bs"}, {"note", "quote \" and \\ backslash"}});
  const auto back = deserialize(serialize(s));
  EXPECT_EQ(back.coeffs(), s.coeffs());
  EXPECT_EQ(back.domain(), s.domain());
  EXPECT_EQ(back.degrees(), s.degrees());
  EXPECT_EQ(back.meta(), s.meta());
  const Interpolant sq(unit(1), DegreeVector({2}), {0.5, 0.0, 0.5});
  EXPECT_EQ(deserialize(serialize(sq)).coeffs(), sq.coeffs());
}

TEST(Serialize, Errors) {
  const Interpolant sq(unit(1), DegreeVector({2}), {0.5, 0.0, 0.5});
  const auto text = serialize(sq);
  EXPECT_THROW(deserialize(text.substr(0, text.size() / 2)), FormatError);
  auto bumped = text;
  bumped.replace(bumped.find("\"version\":1"), 11, "\"version\":9");
  EXPECT_THROW(deserialize(bumped), VersionError);
  EXPECT_THROW(deserialize(R"({"version":1,"domain":{"lo":[-1],"hi":[1],"names":["x"]},"degrees":[2],"coeffs":[1,2],"meta":{}})"),
               FormatError);
}

// Aliasing: T_mu with mu <= N is reproduced, otherwise the interpolation error stays <= 2.
TEST(Aliasing, ExactBelowDegree) {
  std::mt19937_64 rng(11);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto dom = unit(d);
    const std::size_t n = d == 3 ? 4 : 6;
    const DegreeVector deg = DegreeVector::uniform(d, n);
    std::vector<std::size_t> mu(d, 0);
    std::vector<Point> sample;
    const std::size_t per_axis = d == 1 ? 33 : (d == 2 ? 33 : 12);
    for (std::size_t k = 0; k < static_cast<std::size_t>(std::pow(per_axis, d)); ++k) sample.push_back(random_point(dom, rng));
    while (true) {
      const auto s = interpolate(dom, deg, [&](const Point& p) { return cheb_t_multi(mu, p); });
      double err = 0.0;
      for (const auto& p : sample) err = std::max(err, std::abs(s.evaluate(p) - cheb_t_multi(mu, p)));
      EXPECT_LE(err, 1e-12) << "d=" << d;
      std::size_t i = d;
      while (i-- > 0) {
        if (++mu[i] <= n) break;
        mu[i] = 0;
      }
      if (i == static_cast<std::size_t>(-1)) break;
    }
  }
}

TEST(Aliasing, BoundAboveDegree) {
  std::mt19937_64 rng(5);
  for (std::size_t d = 1; d <= 3; ++d) {
    const auto dom = unit(d);
    const auto deg = DegreeVector::uniform(d, 5);
    for (int trial = 0; trial < 20; ++trial) {
      std::vector<std::size_t> mu(d);
      for (auto& m : mu) m = std::uniform_int_distribution<std::size_t>(0, 30)(rng);
      mu[std::uniform_int_distribution<std::size_t>(0, d - 1)(rng)] = std::uniform_int_distribution<std::size_t>(6, 40)(rng);
      const auto s = interpolate(dom, deg, [&](const Point& p) { return cheb_t_multi(mu, p); });
      for (int k = 0; k < 500; ++k) {
        const auto p = random_point(dom, rng);
        EXPECT_LE(std::abs(s.evaluate(p) - cheb_t_multi(mu, p)), 2.0 + 1e-12);
      }
    }
  }
}

TEST(Properties, InterpolationAtNodes) {
  const Hyperrectangle dom({0.5, 0.8, 1.0}, {2.0, 1.2, 4.0});
  const DegreeVector deg({5, 3, 4});
  auto f = [](const Point& p) { return std::log1p(p[0] * p[1]) + std::cos(p[2]); };
  const auto s = interpolate(dom, deg, f);
  for (const auto& p : tensor_nodes(deg, dom)) EXPECT_NEAR(s.evaluate(p), f(p), 1e-12 * std::max(1.0, std::abs(f(p))));
}

TEST(Properties, PolynomialReproduction) {
  const Hyperrectangle dom({-2.0, 0.0}, {3.0, 1.0});
  auto poly = [](const Point& p) {
    return 1.0 - 2.0 * p[0] + 0.5 * p[0] * p[0] * p[1] + std::pow(p[0], 4) * std::pow(p[1], 3) - p[1] * p[1];
  };
  const auto s = interpolate(dom, DegreeVector({4, 3}), poly);
  std::mt19937_64 rng(3);
  for (int k = 0; k < 300; ++k) {
    const auto p = random_point(dom, rng);
    EXPECT_NEAR(s.evaluate(p), poly(p), 1e-12 * std::max(1.0, std::abs(poly(p))));
  }
}

TEST(Properties, AffineInvariance) {
  const Hyperrectangle dom({0.5, 0.8}, {2.0, 1.2});
  const DegreeVector deg({6, 6});
  auto f = [](const Point& p) { return std::exp(p[0] - p[1]); };
  std::vector<double> values;
  for (const auto& p : tensor_nodes(deg, dom)) values.push_back(f(p));
  const auto on_dom = build_interpolant(dom, deg, values);
  const auto on_ref = build_interpolant(unit(2), deg, values);
  std::mt19937_64 rng(9);
  for (int k = 0; k < 200; ++k) {
    const auto ref = random_point(unit(2), rng);
    EXPECT_NEAR(on_dom.evaluate(to_domain(ref, dom)), on_ref.evaluate(ref), 1e-13);
  }
}
