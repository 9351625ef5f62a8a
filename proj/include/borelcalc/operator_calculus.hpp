#pragma once

#include <algorithm>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "borelcalc/exptype.hpp"
#include "borelcalc/symbols.hpp"

namespace borelcalc {

// f(d/dt) phi at t, realized as (1/2pi i) oint e^{st} f(s) B(phi)(s) ds over a
// contour in the symbol's domain winding once around every singularity of the
// transform.

struct AutoContourChoice {
  Contour contour;
  std::string strategy;  // "circle" or "rectangle"
};

namespace detail {

inline void require_nodes_in_domain(const SymbolSpec& f, const Contour& gamma) {
  for (cx n : contour_nodes(gamma, 32))
    if (!f.omega.contains(n))
      throw error("domain-obstruction",
                  "contour node " + cx_str(n) + " leaves the domain of " + f.label);
  // winding around a ray start forces a crossing somewhere, sampled or not
  if (f.omega.kind() == DomainDescriptor::Kind::minus_rays)
    for (const auto& r : f.omega.rays())
      if (std::abs(winding_number(gamma, r.start)) > 0.1)
        throw error("domain-obstruction",
                    "contour winds around the excluded ray from " + cx_str(r.start));
}

inline double min_pole_distance(const SymbolSpec& f, const Contour& gamma) {
  double d = std::numeric_limits<double>::infinity();
  for (cx n : contour_nodes(gamma, 32))
    for (cx p : f.poles) d = std::min(d, std::abs(n - p));
  return d;
}

inline bool admissible(const SymbolSpec& f, const Contour& gamma) {
  for (cx n : contour_nodes(gamma, 32))
    if (!f.omega.contains(n) || !(f.omega.excluded_distance(n) > 0.05)) return false;
  if (f.omega.kind() == DomainDescriptor::Kind::minus_rays)
    for (const auto& r : f.omega.rays())
      if (std::abs(winding_number(gamma, r.start)) > 0.1) return false;
  return min_pole_distance(f, gamma) > 0.05;
}

// Rectangle around pts with a slot cut around each excluded ray, so the
// boundary can wind around singularities that sit beyond the ray starts.
// Rays must be parallel; coordinates are rotated so they run rightward.
inline std::optional<Contour> slotted_box(const DomainDescriptor& omega,
                                          const std::vector<cx>& pts, double margin) {
  const auto& rays = omega.rays();
  if (rays.empty() || pts.empty()) return std::nullopt;
  cx dir = rays[0].dir;
  for (const auto& r : rays)
    if (std::abs(r.dir - dir) > 1e-9) return std::nullopt;
  cx rot = std::conj(dir);

  std::vector<cx> w;
  double x_lo = 1e300, x_hi = -1e300, y_lo = 1e300, y_hi = -1e300;
  for (cx p : pts) {
    cx q = rot * p;
    w.push_back(q);
    x_lo = std::min(x_lo, q.real());
    x_hi = std::max(x_hi, q.real());
    y_lo = std::min(y_lo, q.imag());
    y_hi = std::max(y_hi, q.imag());
  }
  x_lo -= margin;
  x_hi += margin;
  y_lo -= margin;
  y_hi += margin;

  const double hw = 0.12;  // slot half-width; keeps nodes 0.12 off each ray
  struct Slot {
    double y, left;
  };
  std::vector<Slot> slots;
  for (const auto& r : rays) {
    cx q = rot * r.start;
    double a = q.real(), b = q.imag();
    if (b <= y_lo - 0.06 || b >= y_hi + 0.06) continue;  // ray line clears the box
    if (a >= x_hi + 0.06) continue;                      // ray lies right of the box
    y_lo = std::min(y_lo, b - 3 * hw);
    y_hi = std::max(y_hi, b + 3 * hw);
    x_hi = std::max(x_hi, a + 0.2);
    x_lo = std::min(x_lo, a - margin - 0.2);
    slots.push_back({b, a - margin});
  }
  for (const auto& s : slots)
    for (cx q : w)
      if (q.real() >= s.left - 0.05 && std::abs(q.imag() - s.y) <= hw + 0.05)
        return std::nullopt;  // a target point hugs the excluded ray
  for (std::size_t i = 0; i < slots.size(); ++i)
    for (std::size_t j = i + 1; j < slots.size(); ++j)
      if (std::abs(slots[i].y - slots[j].y) < 2 * hw + 0.1) return std::nullopt;
  std::sort(slots.begin(), slots.end(), [](const Slot& a, const Slot& b) { return a.y < b.y; });

  std::vector<cx> v{{x_lo, y_lo}, {x_hi, y_lo}};
  for (const auto& s : slots) {
    v.push_back({x_hi, s.y - hw});
    v.push_back({s.left, s.y - hw});
    v.push_back({s.left, s.y + hw});
    v.push_back({x_hi, s.y + hw});
  }
  v.push_back({x_hi, y_hi});
  v.push_back({x_lo, y_hi});

  Contour c;
  c.closed = true;
  cx back = std::conj(rot);
  for (std::size_t i = 0; i < v.size(); ++i)
    c.segments.push_back(Segment::line_between(back * v[i], back * v[(i + 1) % v.size()]));
  return c;
}

}  // namespace detail

// Contour selection when the caller does not supply one: a circle just outside
// the singularities of B(phi), else a rectangle hugging them. Domains with a
// puncture make the result contour-dependent, so those require an explicit
// contour.
inline AutoContourChoice auto_contour(const SymbolSpec& f, const EntireFn& phi) {
  if (f.omega.kind() == DomainDescriptor::Kind::minus_point)
    throw error("runge-obstruction",
                "domain of " + f.label +
                    " is punctured, so the value depends on the contour class; "
                    "pass a contour explicitly");

  if (phi.has_terms()) {
    double maxl = 0.0;
    double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
    std::vector<cx> sing;
    for (const auto& tm : phi.terms()) {
      if (!f.omega.contains(tm.lambda))
        throw error("domain-obstruction", "transform singularity " + detail::cx_str(tm.lambda) +
                                              " lies outside the domain of " + f.label);
      sing.push_back(tm.lambda);
      maxl = std::max(maxl, std::abs(tm.lambda));
      re_lo = std::min(re_lo, tm.lambda.real());
      re_hi = std::max(re_hi, tm.lambda.real());
      im_lo = std::min(im_lo, tm.lambda.imag());
      im_hi = std::max(im_hi, tm.lambda.imag());
    }
    Contour c = circle(cx{}, 1.25 * std::max(maxl, 0.2));
    if (detail::admissible(f, c)) return {std::move(c), "circle"};
    if (!sing.empty()) {
      Contour r = rectangle(cx(re_lo - 0.2, im_lo - 0.2), cx(re_hi + 0.2, im_hi + 0.2));
      if (detail::admissible(f, r)) return {std::move(r), "rectangle"};
      if (auto s = detail::slotted_box(f.omega, sing, 0.2); s && detail::admissible(f, *s))
        return {std::move(*s), "slotted-rectangle"};
    }
  } else {
    // series data: singularities sit somewhere in the closed type disc
    double tau = phi.type_bound();
    Contour c = circle(cx{}, 1.25 * std::max(tau, 0.2));
    if (detail::admissible(f, c)) return {std::move(c), "circle"};
    double h = tau + std::max(0.2, 0.11 * tau);
    Contour r = rectangle(cx(-h, -h), cx(h, h));
    if (detail::admissible(f, r)) return {std::move(r), "rectangle"};
  }
  throw error("domain-obstruction", "no admissible contour around the transform "
                                    "singularities inside the domain of " +
                                        f.label);
}

inline cx apply(const SymbolSpec& f, const BorelFn& borel, const Contour& gamma, cx t,
                const QuadratureConfig& cfg = {}) {
  if (!gamma.closed) throw error("invalid-geometry", "apply needs a closed contour");
  detail::require_nodes_in_domain(f, gamma);
  auto nodes = contour_nodes(gamma, cfg.nodes_per_panel);
  for (const auto& s : borel.singularities())
    for (cx n : nodes)
      if (std::abs(n - s.location) < 1e-6)
        throw error("singularity-on-path",
                    "contour passes through singularity " + detail::cx_str(s.location));
  for (const auto& s : borel.singularities())
    if (std::abs(winding_number(gamma, s.location) - 1.0) > 0.1)
      throw error("enclosure",
                  "contour does not wind once around " + detail::cx_str(s.location));
  ContourMeasure mu{gamma, [&](cx s) { return f.evaluate(s) * borel.eval(s); }};
  return p_transform(mu, t, cfg);
}

inline cx apply(const SymbolSpec& f, const EntireFn& phi, cx t,
                const std::optional<Contour>& gamma = std::nullopt,
                const QuadratureConfig& cfg = {}) {
  if (phi.has_terms()) {
    BorelFn b = borel_exact(phi);
    if (gamma) return apply(f, b, *gamma, t, cfg);
    return apply(f, b, auto_contour(f, phi).contour, t, cfg);
  }
  // series representation: transform is known outside the type disc only
  double tau = phi.type_bound();
  Contour g = gamma ? *gamma : auto_contour(f, phi).contour;
  if (!g.closed) throw error("invalid-geometry", "apply needs a closed contour");
  detail::require_nodes_in_domain(f, g);
  for (cx n : contour_nodes(g, cfg.nodes_per_panel))
    if (!(std::abs(n) > 1.1 * tau))
      throw error("outside-domain",
                  "contour node " + detail::cx_str(n) + " is too close to the type disc");
  if (std::abs(winding_number(g, cx{}) - 1.0) > 0.1)
    throw error("enclosure", "contour does not wind once around the type disc");
  auto coeffs = phi.series();
  ContourMeasure mu{g, [&](cx s) { return f.evaluate(s) * borel_series(coeffs, s); }};
  return p_transform(mu, t, cfg);
}

// f(lambda), the eigenvalue of f(d/dt) on e^{lambda t}
inline cx apply_eigen(const SymbolSpec& f, cx lambda) {
  for (cx p : f.poles)
    if (std::abs(lambda - p) < 1e-12)
      throw error("outside-domain", "eigenvalue request at a pole of " + f.label);
  if (!f.omega.contains(lambda))
    throw error("outside-domain",
                detail::cx_str(lambda) + " is outside the domain of " + f.label);
  return f.evaluate(lambda);
}

struct SeriesApplication {
  cx value;
  double last_increment = 0.0;
  int terms_used = 0;
};

// Truncated infinite-order form: sum_k a_k phi^(k)(t). Valid when every
// singularity of the transform lies inside the Taylor disc of radius rho.
inline SeriesApplication apply_series(const std::vector<cx>& a, double rho, const EntireFn& phi,
                                      cx t) {
  if (!phi.has_terms())
    throw error("invalid-representation",
                "series application needs exact derivatives, so a term representation");
  for (const auto& tm : phi.terms())
    if (!(std::abs(tm.lambda) < rho))
      throw error("disc-violation", "transform singularity " + detail::cx_str(tm.lambda) +
                                        " is not inside the Taylor disc of radius " +
                                        detail::num_str(rho));
  SeriesApplication out;
  EntireFn d = phi;
  int calm = 0;  // vanishing coefficients alone say nothing about convergence
  for (std::size_t k = 0; k < a.size(); ++k) {
    if (k > 0) d = d.derivative();
    cx inc = a[k] * d.eval(t);
    out.value += inc;
    out.last_increment = std::abs(inc);
    out.terms_used = (int)k + 1;
    calm = out.last_increment < 1e-12 * std::abs(out.value) ? calm + 1 : 0;
    if (k > 0 && calm >= 2) break;
  }
  return out;
}

struct WitnessReport {
  double input_sup_norm = 0.0;     // sup of |phi_n| on the closed unit disc
  double output_magnitude = 0.0;   // |(1/d)(d/dt) phi_n| at t = 0
};

// Small inputs with large images: phi_n = e^{iz/n} - e^{-iz/n} under the
// reciprocal symbol, integrated over a horseshoe that keeps the origin
// outside. The ratio grows like n^2, so no operator norm exists.
inline WitnessReport noncontinuity_witness(int n) {
  if (n < 1) throw error("invalid-argument", "witness index must be at least 1");
  double ln = 1.0 / n;
  EntireFn phi = EntireFn::from_terms({{{1.0}, cx(0.0, ln)}, {{-1.0}, cx(0.0, -ln)}});

  SymbolSpec reciprocal = make_symbol({[](cx s) { return 1.0 / s; },
                                       DomainDescriptor::minus_point(cx{}),
                                       {cx{}},
                                       {},
                                       {},
                                       "reciprocal"});

  double th = 0.4, R = 2.0 * ln, r = 0.5 * ln;
  Contour horseshoe;
  horseshoe.closed = true;
  horseshoe.segments = {
      Segment::arc_about(cx{}, R, th, 2 * pi - th),
      Segment::line_between(R * std::polar(1.0, -th), r * std::polar(1.0, -th)),
      Segment::arc_about(cx{}, r, 2 * pi - th, th),
      Segment::line_between(r * std::polar(1.0, th), R * std::polar(1.0, th)),
  };

  WitnessReport rep;
  for (int k = 0; k < 256; ++k)
    rep.input_sup_norm =
        std::max(rep.input_sup_norm, std::abs(phi.eval(std::polar(1.0, 2 * pi * k / 256.0))));
  rep.output_magnitude = std::abs(apply(reciprocal, phi, cx{}, horseshoe));
  return rep;
}

}  // namespace borelcalc
