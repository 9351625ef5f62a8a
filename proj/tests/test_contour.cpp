#include <catch2/catch_amalgamated.hpp>

#include "borelcalc/contour.hpp"
#include "reference_values.hpp"

using namespace borelcalc;
using Catch::Matchers::WithinAbs;

namespace {
const cx I{0.0, 1.0};
cx over_2pii(cx v) { return v / cx(0.0, 2 * pi); }
}  // namespace

TEST_CASE("circle integrates Cauchy kernels exactly", "[contour]") {
  auto c = circle(cx(0, 0), 2.0);
  auto r = integrate([](cx s) { return 1.0 / s; }, c);
  REQUIRE(r.converged);
  CHECK_THAT(std::abs(over_2pii(r.value) - 1.0), WithinAbs(0.0, 1e-12));

  // residue of e^s/(s-1)^2 at 1 is e
  auto r2 = integrate([](cx s) { return std::exp(s) / ((s - 1.0) * (s - 1.0)); }, c);
  CHECK_THAT(std::abs(over_2pii(r2.value) - std::exp(1.0)), WithinAbs(0.0, 1e-11));

  // no pole enclosed
  auto r3 = integrate([](cx s) { return 1.0 / (s - 5.0); }, c);
  CHECK_THAT(std::abs(r3.value), WithinAbs(0.0, 1e-12));
}

TEST_CASE("trapezoid rule agrees with Gauss on a closed circle", "[contour]") {
  auto c = circle(cx(0.5, -0.25), 1.5);
  QuadratureConfig tz;
  tz.rule = QuadratureConfig::Rule::trapezoid;
  tz.nodes_per_panel = 64;
  auto a = integrate([](cx s) { return std::exp(s) / (s - 0.5); }, c);
  auto b = integrate([](cx s) { return std::exp(s) / (s - 0.5); }, c, tz);
  CHECK_THAT(std::abs(a.value - b.value), WithinAbs(0.0, 1e-10));
}

TEST_CASE("reversing orientation negates integrals and counts", "[contour]") {
  auto c = circle(cx(0, 0), 1.0);
  auto rev = c.reversed();
  rev.validate();
  auto f = [](cx s) { return 1.0 / s; };
  auto a = integrate(f, c);
  auto b = integrate(f, rev);
  CHECK_THAT(std::abs(a.value + b.value), WithinAbs(0.0, 1e-12));
  CHECK(count_zeros([](cx s) { return s; }, c) == 1);
  CHECK(count_zeros([](cx s) { return s; }, rev) == -1);
  CHECK(rev.orientation == -1);
}

TEST_CASE("argument principle counts zeros with multiplicity", "[contour]") {
  auto box = rectangle(cx(-2, -2), cx(2, 2));
  auto f = [](cx s) { return (s - 0.5) * std::pow(s + 1.0 - 0.5 * I, 3); };
  CHECK(count_zeros(f, box) == 4);
  auto small = rectangle(cx(0.2, -0.4), cx(0.9, 0.4));
  CHECK(count_zeros(f, small) == 1);
  // poles count negatively
  CHECK(count_zeros([](cx s) { return 1.0 / (s - 0.5); }, small) == -1);
}

TEST_CASE("zero on the contour is detected", "[contour]") {
  auto c = circle(cx(0, 0), 2.0);
  REQUIRE_THROWS_MATCHES(count_zeros([](cx s) { return s - 2.0; }, c), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                           return e.kind() == "zero-on-boundary";
                         }));
}

TEST_CASE("geometry validation", "[contour]") {
  CHECK_THROWS_AS(circle(cx(0, 0), 0.0), error);
  CHECK_THROWS_AS(rectangle(cx(1, 1), cx(0, 0)), error);
  CHECK_THROWS_AS(angular_contour(cx(0, 0), pi / 3, 0.1, 10.0), error);
  CHECK_THROWS_AS(angular_contour(cx(0, 0), 0.9 * pi, 2.0, 1.0), error);
  Contour gap;
  gap.segments.push_back(Segment::line_between(cx(0, 0), cx(1, 0)));
  gap.segments.push_back(Segment::line_between(cx(2, 0), cx(3, 0)));
  CHECK_THROWS_AS(gap.validate(), error);
}

TEST_CASE("vertex contour reproduces analytic and mpmath values", "[contour]") {
  double psi = 7 * pi / 8;
  auto kappa = angular_contour(cx(0, 0), psi, 0.1, 10.0);
  REQUIRE_FALSE(kappa.closed);

  // (1/2pi i) int ds/s along the path equals (arg sweep)/(2 pi) = psi/pi
  auto r0 = integrate([](cx s) { return 1.0 / s; }, kappa);
  CHECK_THAT(std::abs(over_2pii(r0.value) - psi / pi), WithinAbs(0.0, 1e-10));

  // truncated constant source at t = 0.5 and 1.0, frozen mpmath values
  auto rh = integrate([](cx s) { return std::exp(0.5 * s) / s; }, kappa);
  CHECK_THAT(std::abs(over_2pii(rh.value) - cx(refvals::g_r10_one_t0_5)), WithinAbs(0.0, 1e-9));
  auto r1 = integrate([](cx s) { return std::exp(s) / s; }, kappa);
  CHECK_THAT(std::abs(over_2pii(r1.value) - cx(refvals::g_r10_one_t1_0)), WithinAbs(0.0, 1e-9));
}

TEST_CASE("vertex tube winds once around the path and misses the poles", "[contour]") {
  double psi = 7 * pi / 8;
  auto tube = hankel_tube(cx(0, 0), psi, 0.1, 10.0, 0.2);
  REQUIRE(tube.closed);
  // points on the vertex contour itself
  for (cx p : {cx(0.1, 0.0), 5.0 * std::polar(1.0, psi), 9.9 * std::polar(1.0, -psi)})
    CHECK_THAT(winding_number(tube, p), WithinAbs(1.0, 1e-9));
  // the h=2 poles of zeta(s^2+h), and far-away points
  for (cx p : {cx(0, 1), cx(0, -1), cx(3, 3), cx(-11, 0), cx(0.8, 0.0)})
    CHECK_THAT(winding_number(tube, p), WithinAbs(0.0, 1e-9));
  // integrating the Cauchy kernel around an enclosed point gives 1
  cx at = 2.0 * std::polar(1.0, psi);
  auto r = integrate([at](cx s) { return 1.0 / (s - at); }, tube);
  CHECK_THAT(std::abs(over_2pii(r.value) - 1.0), WithinAbs(0.0, 1e-9));
}

TEST_CASE("dyadic ray panels keep node spacing graded", "[contour]") {
  auto kappa = angular_contour(cx(0, 0), 7 * pi / 8, 0.1, 80.0);
  auto nodes = contour_nodes(kappa, 8);
  REQUIRE(nodes.size() > 100);
  // more than half the nodes sit within |s| <= 8 even though the path reaches 80
  std::size_t close = 0;
  for (cx n : nodes)
    if (std::abs(n) <= 8.0) ++close;
  CHECK(close * 2 > nodes.size());
}

TEST_CASE("failure modes surface as typed errors", "[contour]") {
  auto c = circle(cx(0, 0), 2.0);
  QuadratureConfig tight;
  tight.max_refinements = 1;
  tight.nodes_per_panel = 4;
  CHECK_THROWS_AS(integrate([](cx s) { return 1.0 / (s - cx(2.0 + 1e-7, 0)); }, c, tight), error);

  QuadratureConfig tz;
  tz.rule = QuadratureConfig::Rule::trapezoid;
  auto bad = [](cx s) {
    return s.real() > 1.99 ? cx(std::nan(""), 0) : 1.0 / s;
  };
  REQUIRE_THROWS_MATCHES(integrate(bad, c, tz), error,
                         Catch::Matchers::Predicate<error>([](const error& e) {
                           return e.kind() == "singularity-on-path";
                         }));
}

TEST_CASE("contour JSON roundtrip is byte identical", "[contour]") {
  auto tube = hankel_tube(cx(0.25, -0.125), 0.8 * pi, 0.37, 12.5, 0.21);
  nlohmann::ordered_json j;
  to_json(j, tube);
  std::string once = j.dump(2);
  Contour back;
  from_json(nlohmann::ordered_json::parse(once), back);
  nlohmann::ordered_json j2;
  to_json(j2, back);
  CHECK(once == j2.dump(2));

  auto kappa = angular_contour(cx(0, 0), 7 * pi / 8, 0.1, 40.0);
  nlohmann::ordered_json k;
  to_json(k, kappa);
  Contour kback;
  from_json(nlohmann::ordered_json::parse(k.dump()), kback);
  auto a = integrate([](cx s) { return std::exp(0.3 * s) / s; }, kappa);
  auto b = integrate([](cx s) { return std::exp(0.3 * s) / s; }, kback);
  CHECK(a.value == b.value);
}
