#include <catch2/catch_amalgamated.hpp>

#include "borelcalc/exptype.hpp"
#include "reference_values.hpp"
#include "test_support.hpp"

using namespace borelcalc;
using Catch::Approx;

namespace {

std::vector<cx> exp_coeffs(cx lambda, std::size_t N) {
  std::vector<cx> a(N + 1);
  a[0] = 1.0;
  for (std::size_t n = 1; n <= N; ++n) a[n] = a[n - 1] * lambda / (double)n;
  return a;
}

}  // namespace

TEST_CASE("order estimator recovers growth order from Taylor data", "[exptype]") {
  CHECK(estimate_order(exp_coeffs(2.0, 64)) == Approx(1.0).margin(0.05));

  std::vector<cx> halforder(65);
  for (std::size_t n = 0; n <= 64; ++n)
    halforder[n] = std::exp(-2.0 * std::lgamma((double)n + 1.0));
  CHECK(estimate_order(halforder) == Approx(0.5).margin(0.05));

  std::vector<cx> cubic(65, cx(0, 0));
  cubic[0] = 2.0;
  cubic[3] = -1.0;
  CHECK(estimate_order(cubic) == 0.0);

  CHECK_THROWS_MATCHES(estimate_order(std::vector<cx>(5, cx(1, 0))), error,
                       error_kind("invalid-sequence"));
}

TEST_CASE("type estimator matches known exponential types", "[exptype]") {
  CHECK(estimate_type(exp_coeffs(2.0, 64)) == Approx(2.0).margin(1e-9));
  CHECK(estimate_type(exp_coeffs(cx(1, 1), 64)) == Approx(std::sqrt(2.0)).margin(1e-9));

  std::vector<cx> cosz(65, cx(0, 0));
  for (std::size_t n = 0; n <= 64; n += 2)
    cosz[n] = (n % 4 == 0 ? 1.0 : -1.0) * std::exp(-std::lgamma((double)n + 1.0));
  CHECK(estimate_type(cosz) == Approx(1.0).margin(1e-9));

  std::vector<cx> cubic(65, cx(0, 0));
  cubic[3] = 7.0;
  CHECK(estimate_type(cubic) == 0.0);
}

TEST_CASE("term and series representations must agree", "[exptype]") {
  auto phi = EntireFn::from_both({{{1.0, 2.0}, 3.0}},
                                 EntireFn::from_terms({{{1.0, 2.0}, 3.0}}).taylor(40));
  CHECK(phi.has_terms());
  CHECK(phi.has_series());
  CHECK(std::abs(phi.eval(0.5) - 2.0 * std::exp(1.5)) < 1e-13);

  auto bad_series = EntireFn::exponential(2.5).taylor(40);
  CHECK_THROWS_MATCHES(EntireFn::from_both({{{1.0, 2.0}, 3.0}}, bad_series), error,
                       error_kind("invalid-representation"));
}

TEST_CASE("declared type cannot undercut the largest frequency", "[exptype]") {
  CHECK_THROWS_MATCHES(EntireFn::from_terms({{{1.0}, cx(0, 3)}}, 2.0), error,
                       error_kind("invalid-type"));
  auto ok = EntireFn::from_terms({{{1.0}, cx(0, 3)}}, 3.0);
  CHECK(ok.type_bound() == 3.0);
  CHECK(EntireFn::exponential(cx(3, 4)).type_bound() == Approx(5.0));
}

TEST_CASE("duplicate frequencies merge and coefficients scale", "[exptype]") {
  auto sum = EntireFn::exponential(1.0) + EntireFn::exponential(1.0);
  REQUIRE(sum.terms().size() == 1);
  CHECK(std::abs(sum.eval(0.3) - 2.0 * std::exp(0.3)) < 1e-14);

  auto scaled = cx(0, 2) * EntireFn::exponential(-1.0);
  CHECK(std::abs(scaled.eval(1.0) - cx(0, 2) * std::exp(-1.0)) < 1e-15);
}

TEST_CASE("derivative acts on both representations", "[exptype]") {
  auto phi = EntireFn::from_terms({{{1.0, 2.0}, 3.0}});  // (1+2z)e^{3z}
  auto dphi = phi.derivative();
  for (cx z : {cx(0.4, -0.2), cx(-1, 1), cx(2, 0)}) {
    cx expect = (5.0 + 6.0 * z) * std::exp(3.0 * z);
    CHECK(std::abs(dphi.eval(z) - expect) <= 1e-12 * std::abs(expect));
  }

  std::vector<cx> cosz(41, cx(0, 0));
  for (std::size_t n = 0; n <= 40; n += 2)
    cosz[n] = (n % 4 == 0 ? 1.0 : -1.0) * std::exp(-std::lgamma((double)n + 1.0));
  auto dcos = EntireFn::from_series(cosz).derivative();
  CHECK(std::abs(dcos.eval(0.5) - (-std::sin(0.5))) < 1e-14);
}

TEST_CASE("Taylor coefficients of exponential polynomials", "[exptype]") {
  auto phi = EntireFn::from_terms({{{1.0, 2.0}, 3.0}});
  auto a = phi.taylor(6);
  CHECK(std::abs(a[0] - 1.0) < 1e-15);
  CHECK(std::abs(a[1] - 5.0) < 1e-14);
  CHECK(std::abs(a[2] - 10.5) < 1e-13);
  // a_n = 3^n/n! + 2 n 3^{n-1}/n!
  CHECK(std::abs(a[6] - (729.0 + 2.0 * 6 * 243.0) / 720.0) < 1e-12);
}

TEST_CASE("exact Borel transform of exponential polynomials", "[exptype]") {
  auto phi = EntireFn::from_terms({{{1.0, 2.0}, 3.0}});
  auto b = borel_exact(phi);
  REQUIRE(b.singularities().size() == 1);
  CHECK(b.singularities()[0].location == cx(3.0, 0.0));
  CHECK(b.singularities()[0].order == 2);
  CHECK(std::abs(b.eval(cx(4, 1)) - refvals::borel_poly_exp_spot) < 1e-14);

  auto two = borel_exact(EntireFn::exponential(1.0) + EntireFn::exponential(-2.0));
  cx z(0.5, 0.5);
  CHECK(std::abs(two.eval(z) - (1.0 / (z - 1.0) + 1.0 / (z + 2.0))) < 1e-14);
}

TEST_CASE("series Borel sum matches the exact transform outside the disc", "[exptype]") {
  auto coeffs = exp_coeffs(2.0, 40);
  for (cx z : {cx(5, 0), cx(0, 4), cx(-3, 3)}) {
    double tail = 0.0;
    cx got = borel_series(coeffs, z, &tail);
    cx expect = 1.0 / (z - 2.0);
    CHECK(std::abs(got - expect) <= 1e-12 * std::abs(expect));
    CHECK(std::abs(got - expect) <= tail + 1e-15);
  }
  CHECK_THROWS_MATCHES(borel_series(coeffs, cx(2.1, 0)), error, error_kind("outside-domain"));
}

TEST_CASE("contour reconstruction inverts the Borel transform", "[exptype]") {
  auto phi = EntireFn::from_terms({{{1.0, 2.0}, 3.0}, {{1.0}, -1.0}});
  auto b = borel_exact(phi);
  auto gamma = circle(cx(0, 0), 4.0);
  for (cx z : {cx(0, 0), cx(1.2, -0.7), cx(-0.5, 2.0), cx(2, 1)}) {
    cx expect = phi.eval(z);
    CHECK(std::abs(polya_reconstruct(b, gamma, z) - expect) <=
          1e-9 * std::max(1.0, std::abs(expect)));
  }
}

TEST_CASE("reconstruction demands enclosure and a clear path", "[exptype]") {
  auto b = borel_exact(EntireFn::from_terms({{{1.0, 2.0}, 3.0}, {{1.0}, -1.0}}));
  CHECK_THROWS_MATCHES(polya_reconstruct(b, circle(cx(0, 0), 2.0), cx(0, 0)), error,
                       error_kind("enclosure"));
  CHECK_THROWS_MATCHES(polya_reconstruct(b, angular_contour(cx(0, 0), 0.75 * pi, 0.1, 6.0),
                                         cx(0, 0)),
                       error, error_kind("invalid-geometry"));

  auto gamma = circle(cx(0, 0), 4.0);
  cx node = contour_nodes(gamma, QuadratureConfig{}.nodes_per_panel)[7];
  BorelFn onpath([node](cx z) { return 1.0 / (z - node); }, {{node, 1}});
  CHECK_THROWS_MATCHES(polya_reconstruct(onpath, gamma, cx(0, 0)), error,
                       error_kind("singularity-on-path"));
}

TEST_CASE("borel validation rejects non-decaying or blowing-up data", "[exptype]") {
  CHECK_THROWS_MATCHES(BorelFn([](cx) { return cx(1.0, 0.0); }, {}), error,
                       error_kind("invalid-borel"));
  CHECK_THROWS_MATCHES(
      BorelFn([](cx) { return cx(std::numeric_limits<double>::quiet_NaN(), 0.0); },
              {{cx(0, 0), 1}}),
      error, error_kind("invalid-borel"));
}

TEST_CASE("measure transform reproduces exponentials from Cauchy kernels", "[exptype]") {
  cx lambda(1.0, 0.5);
  ContourMeasure mu{circle(cx(0, 0), 2.0 * std::abs(lambda)),
                    [lambda](cx s) { return 1.0 / (s - lambda); }};
  for (cx z : {cx(0.7, -0.3), cx(-1, 2), cx(0, 0)}) {
    cx expect = std::exp(lambda * z);
    CHECK(std::abs(p_transform(mu, z) - expect) <= 1e-10 * std::max(1.0, std::abs(expect)));
  }

  ContourMeasure unit{circle(cx(0, 0), 1.0), [](cx s) { return 1.0 / s; }};
  CHECK(unit.mass() == Approx(1.0).epsilon(1e-12));
  CHECK(unit.max_radius() == Approx(1.0).epsilon(1e-12));
}

TEST_CASE("growth metadata prefers declared then structural bounds", "[exptype]") {
  auto series_only = EntireFn::from_series(exp_coeffs(cx(0, 2), 48));
  CHECK(series_only.type_bound() == Approx(2.0).margin(1e-9));
  CHECK(series_only.singular_points().empty());
  CHECK_THROWS_MATCHES(series_only.terms(), error, error_kind("invalid-representation"));

  auto declared = EntireFn::from_series(exp_coeffs(cx(0, 2), 48), 2.5);
  CHECK(declared.type_bound() == 2.5);
}
