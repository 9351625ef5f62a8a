#pragma once

#include <limits>
#include <map>
#include <memory>
#include <optional>
#include <utility>
#include <vector>

#include "borelcalc/operator_calculus.hpp"
#include "borelcalc/zerofinder.hpp"

namespace borelcalc {

// General solution of f(d/dt) phi = g: a particular piece with Borel transform
// B(g)/f carried on a contour around the singularities of B(g), plus
// polynomial-weighted exponentials over the zeros of f.

struct HomogeneousTerm {
  cx s_k;
  int m_k = 1;
  std::vector<cx> p_k;  // ascending, degree < m_k; empty means absent
};

struct ResidualReport {
  std::vector<cx> grid;
  std::vector<double> residuals;
  double max_residual = 0.0;
};

struct SolutionBundle {
  BorelFn particular;
  Contour reconstruction;  // winds once around the singular support of `particular`
  std::vector<HomogeneousTerm> homog;
  ResidualReport residual;
};

namespace detail {

// Candidate contours around the transform singularities of g, filtered for
// admissibility and for keeping well off the zero set of f. Zeros strictly
// inside are harmless; zeros on the path pinch the construction.
inline Contour particular_contour(const SymbolSpec& f, const EntireFn& g) {
  std::vector<cx> sing;
  double maxl = 0.0;
  double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
  for (const auto& tm : g.terms()) {
    if (!f.omega.contains(tm.lambda))
      throw error("domain-obstruction", "transform singularity " + cx_str(tm.lambda) +
                                            " lies outside the domain of " + f.label);
    sing.push_back(tm.lambda);
    maxl = std::max(maxl, std::abs(tm.lambda));
    re_lo = std::min(re_lo, tm.lambda.real());
    re_hi = std::max(re_hi, tm.lambda.real());
    im_lo = std::min(im_lo, tm.lambda.imag());
    im_hi = std::max(im_hi, tm.lambda.imag());
  }

  // Tight hugs first: zeros of f away from the singular support must stay
  // outside, or their residues fold homogeneous components into the result.
  std::vector<Contour> candidates;
  if (!sing.empty())
    for (double m : {0.2, 0.3, 0.45})
      candidates.push_back(rectangle(cx(re_lo - m, im_lo - m), cx(re_hi + m, im_hi + m)));
  double r0 = 1.25 * std::max(maxl, 0.2);
  for (double sc : {1.0, 1.07, 0.93, 1.15, 0.85}) candidates.push_back(circle(cx{}, r0 * sc));
  if (f.omega.kind() == DomainDescriptor::Kind::minus_rays)
    for (double m : {0.2, 0.3})
      if (auto s = slotted_box(f.omega, sing, m)) candidates.push_back(std::move(*s));

  bool any_admissible = false;
  double best_min = -1.0;
  cx pinch_node{};
  for (auto& c : candidates) {
    if (!admissible(f, c)) continue;
    any_admissible = true;
    double mn = std::numeric_limits<double>::infinity();
    cx argmin{};
    for (cx n : contour_nodes(c, 32)) {
      double v = std::abs(f.evaluate(n));
      if (v < mn) {
        mn = v;
        argmin = n;
      }
    }
    if (mn > 1e-6) return c;
    if (mn > best_min) {
      best_min = mn;
      pinch_node = argmin;
    }
  }
  if (!any_admissible)
    throw error("domain-obstruction",
                "no admissible contour around the source transform inside the domain of " +
                    f.label);
  cx z = newton_polish(f.evaluate, pinch_node, 1);
  throw error("pinch", "every candidate contour meets the zero set of " + f.label +
                           " near its zero at " + cx_str(z));
}

// Contour around `inner` for re-applying the symbol to the particular piece;
// must stay admissible and keep a quadrature-friendly gap from the support.
inline Contour surrounding_contour(const SymbolSpec& f, const Contour& inner) {
  auto nodes = contour_nodes(inner, 16);
  double maxr = 0.0;
  double re_lo = 1e300, re_hi = -1e300, im_lo = 1e300, im_hi = -1e300;
  for (cx n : nodes) {
    maxr = std::max(maxr, std::abs(n));
    re_lo = std::min(re_lo, n.real());
    re_hi = std::max(re_hi, n.real());
    im_lo = std::min(im_lo, n.imag());
    im_hi = std::max(im_hi, n.imag());
  }
  std::vector<Contour> candidates;
  for (double m : {0.25, 0.4, 0.6}) candidates.push_back(circle(cx{}, maxr + m));
  for (double m : {0.25, 0.4})
    candidates.push_back(rectangle(cx(re_lo - m, im_lo - m), cx(re_hi + m, im_hi + m)));
  if (f.omega.kind() == DomainDescriptor::Kind::minus_rays)
    for (double m : {0.25, 0.4})
      if (auto s = slotted_box(f.omega, nodes, m)) candidates.push_back(std::move(*s));
  for (auto& c : candidates) {
    if (!admissible(f, c)) continue;
    double gap = std::numeric_limits<double>::infinity();
    for (cx outer : contour_nodes(c, 32))
      for (cx n : nodes) gap = std::min(gap, std::abs(outer - n));
    if (gap > 0.15) return c;
  }
  throw error("domain-obstruction", "no admissible contour surrounds the particular "
                                    "solution's support inside the domain of " +
                                        f.label);
}

}  // namespace detail

inline cx solve_particular(const SymbolSpec& f, const EntireFn& g, cx t,
                           const QuadratureConfig& cfg = {}) {
  Contour gamma = detail::particular_contour(f, g);
  BorelFn bg = borel_exact(g);
  ContourMeasure mu{gamma, [&](cx s) { return bg.eval(s) / f.evaluate(s); }};
  return p_transform(mu, t, cfg);
}

// All certified zeros inside the open ball of radius tau, as (location,
// multiplicity) pairs. Records are taken on faith only past the residual gate.
inline std::vector<std::pair<cx, int>> homogeneous_basis(const SymbolSpec& f, double tau,
                                                         const std::vector<ZeroRecord>& zeros) {
  std::vector<std::pair<cx, int>> out;
  for (const auto& z : zeros) {
    if (!(z.residual <= 1e-8) || !(std::abs(f.evaluate(z.location)) <= 1e-8) ||
        z.multiplicity < 1)
      throw error("certification-required",
                  "zero record at " + detail::cx_str(z.location) + " is not certified");
    if (std::abs(z.location) < tau) out.push_back({z.location, z.multiplicity});
  }
  return out;
}

inline std::vector<cx> default_residual_grid() {
  std::vector<cx> g;
  for (int k = 0; k <= 20; ++k) g.push_back(cx(2.0 * k / 20.0, 0.0));
  return g;
}

inline cx eval_homogeneous(const std::vector<HomogeneousTerm>& homog, cx t) {
  cx total{};
  for (const auto& h : homog) {
    cx p{};
    for (std::size_t d = h.p_k.size(); d-- > 0;) p = p * t + h.p_k[d];
    total += p * std::exp(h.s_k * t);
  }
  return total;
}

inline SolutionBundle assemble(const SymbolSpec& f, const EntireFn& g,
                               const std::vector<ZeroRecord>& zeros, double tau,
                               const std::vector<std::vector<cx>>& coefficients = {},
                               const std::vector<cx>& grid = default_residual_grid(),
                               const QuadratureConfig& cfg = {}) {
  auto basis = homogeneous_basis(f, tau, zeros);
  if (!coefficients.empty() && coefficients.size() != basis.size())
    throw error("shape-mismatch", std::to_string(coefficients.size()) +
                                      " coefficient polynomials for " +
                                      std::to_string(basis.size()) + " basis zeros");
  std::vector<HomogeneousTerm> homog;
  for (std::size_t k = 0; k < basis.size(); ++k) {
    HomogeneousTerm h{basis[k].first, basis[k].second, {}};
    if (!coefficients.empty()) {
      if ((int)coefficients[k].size() > basis[k].second)
        throw error("shape-mismatch", "polynomial at " + detail::cx_str(h.s_k) +
                                          " exceeds multiplicity " +
                                          std::to_string(h.m_k));
      h.p_k = coefficients[k];
    }
    homog.push_back(std::move(h));
  }

  Contour inner = detail::particular_contour(f, g);
  BorelFn bg = borel_exact(g);
  auto ratio_cache = std::make_shared<std::map<std::pair<double, double>, cx>>();
  auto fe = f.evaluate;
  auto ratio = [bg, fe, ratio_cache](cx eta) {
    auto key = std::make_pair(eta.real(), eta.imag());
    auto it = ratio_cache->find(key);
    if (it != ratio_cache->end()) return it->second;
    cx v = bg.eval(eta) / fe(eta);
    (*ratio_cache)[key] = v;
    return v;
  };
  QuadratureConfig inner_cfg = cfg;
  auto dens = [inner, ratio, inner_cfg](cx z) {
    auto r = integrate([&](cx eta) { return ratio(eta) / (z - eta); }, inner, inner_cfg);
    return r.value / cx(0.0, 2 * pi);
  };
  BorelFn particular(dens, bg.singularities());
  Contour outer = detail::surrounding_contour(f, inner);

  ResidualReport rep;
  rep.grid = grid;
  EntireFn hfn = EntireFn::from_terms([&] {
    std::vector<ExpPolyTerm> tm;
    for (const auto& h : homog)
      if (!h.p_k.empty()) tm.push_back({h.p_k, h.s_k});
    return tm;
  }());
  bool has_h = hfn.has_terms() && !hfn.terms().empty();
  std::optional<Contour> hgamma;
  if (has_h) hgamma = auto_contour(f, hfn).contour;
  for (cx t : grid) {
    cx image = apply(f, particular, outer, t, cfg);
    if (has_h) image += apply(f, hfn, t, hgamma, cfg);
    double r = std::abs(image - g.eval(t));
    rep.residuals.push_back(r);
    rep.max_residual = std::max(rep.max_residual, r);
  }
  return SolutionBundle{std::move(particular), std::move(outer), std::move(homog),
                        std::move(rep)};
}

// Value of the assembled solution at t.
inline cx eval_solution(const SolutionBundle& b, cx t, const QuadratureConfig& cfg = {}) {
  return polya_reconstruct(b.particular, b.reconstruction, t, cfg) +
         eval_homogeneous(b.homog, t);
}

}  // namespace borelcalc
