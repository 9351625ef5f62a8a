#pragma once

// Piecewise-smooth integration paths in the complex plane plus the two
// operations everything else leans on: contour integrals with node-doubling
// refinement and argument-principle zero counting.

#include <algorithm>
#include <cmath>
#include <functional>
#include <mutex>
#include <sstream>
#include <unordered_map>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "common.hpp"

namespace borelcalc {

namespace detail {

struct GlRule {
  std::vector<double> x, w;  // nodes/weights on [-1, 1]
};

// Newton on P_n from the Chebyshev initial guess; cached per node count.
inline const GlRule& gl_rule(int n) {
  static std::unordered_map<int, GlRule> cache;
  static std::mutex mu;
  std::lock_guard<std::mutex> lock(mu);
  auto it = cache.find(n);
  if (it != cache.end()) return it->second;

  GlRule rule;
  rule.x.resize(n);
  rule.w.resize(n);
  for (int i = 0; i < (n + 1) / 2; ++i) {
    double t = std::cos(pi * (i + 0.75) / (n + 0.5));
    double p1 = 0.0, dp = 0.0;
    for (int iter = 0; iter < 100; ++iter) {
      double p0 = 1.0;
      p1 = t;
      for (int k = 2; k <= n; ++k) {
        double p2 = ((2 * k - 1) * t * p1 - (k - 1) * p0) / k;
        p0 = p1;
        p1 = p2;
      }
      dp = n * (t * p1 - p0) / (t * t - 1.0);
      double step = p1 / dp;
      t -= step;
      if (std::abs(step) < 1e-15) break;
    }
    rule.x[i] = -t;
    rule.x[n - 1 - i] = t;
    rule.w[i] = rule.w[n - 1 - i] = 2.0 / ((1.0 - t * t) * dp * dp);
  }
  return cache.emplace(n, std::move(rule)).first->second;
}

inline std::string num_str(double v) {
  std::ostringstream os;
  os << v;
  return os.str();
}

inline std::string cx_str(cx z) {
  std::ostringstream os;
  os << z.real() << (z.imag() < 0 ? "" : "+") << z.imag() << "i";
  return os.str();
}

}  // namespace detail

struct Segment {
  enum class Kind { line, arc };

  Kind kind = Kind::line;
  cx a{}, b{};     // endpoints; for arcs derived from center/radius/angles
  cx center{};     // arc only
  double radius = 0.0;
  double ang0 = 0.0, ang1 = 0.0;  // arc only, traversed ang0 -> ang1
  // Lines only: split into |dyadic_panels| panels whose lengths double away
  // from the anchor endpoint (a if positive, b if negative). Concentrates
  // quadrature nodes where ray integrands actually vary.
  int dyadic_panels = 0;

  static Segment line_between(cx from, cx to, int dyadic = 0) {
    Segment s;
    s.kind = Kind::line;
    s.a = from;
    s.b = to;
    s.dyadic_panels = dyadic;
    return s;
  }

  static Segment arc_about(cx center, double radius, double from_angle, double to_angle) {
    Segment s;
    s.kind = Kind::arc;
    s.center = center;
    s.radius = radius;
    s.ang0 = from_angle;
    s.ang1 = to_angle;
    s.a = center + radius * std::polar(1.0, from_angle);
    s.b = center + radius * std::polar(1.0, to_angle);
    return s;
  }

  cx point(double t) const {
    if (kind == Kind::line) return a + (b - a) * t;
    return center + radius * std::polar(1.0, ang0 + (ang1 - ang0) * t);
  }

  cx velocity(double t) const {
    if (kind == Kind::line) return b - a;
    cx radial = radius * std::polar(1.0, ang0 + (ang1 - ang0) * t);
    return cx(0.0, ang1 - ang0) * radial;
  }

  double approx_length() const {
    if (kind == Kind::line) return std::abs(b - a);
    return radius * std::abs(ang1 - ang0);
  }

  Segment reversed() const {
    Segment s = *this;
    std::swap(s.a, s.b);
    if (kind == Kind::arc) std::swap(s.ang0, s.ang1);
    s.dyadic_panels = -dyadic_panels;
    return s;
  }

  // Ascending parameter breakpoints, starting 0 and ending 1.
  void panel_breaks(std::vector<double>& out) const {
    out.clear();
    out.push_back(0.0);
    if (kind == Kind::arc) {
      int m = std::max(1, (int)std::ceil(std::abs(ang1 - ang0) / (pi / 2)));
      for (int k = 1; k < m; ++k) out.push_back((double)k / m);
    } else if (dyadic_panels > 1) {
      for (int k = 1; k < dyadic_panels; ++k)
        out.push_back(std::ldexp(1.0, k - dyadic_panels));
    } else if (dyadic_panels < -1) {
      int m = -dyadic_panels;
      for (int k = m - 1; k >= 1; --k)
        out.push_back(1.0 - std::ldexp(1.0, k - m));
    }
    out.push_back(1.0);
  }
};

class Contour {
 public:
  std::vector<Segment> segments;
  bool closed = false;
  int orientation = +1;  // bookkeeping only; reversed() flips it with the geometry
  std::string label;

  void validate() const {
    if (segments.empty()) throw error("invalid-geometry", "contour has no segments");
    double scale = 1.0;
    for (const auto& s : segments) scale = std::max({scale, std::abs(s.a), std::abs(s.b)});
    for (std::size_t i = 0; i < segments.size(); ++i) {
      const Segment& s = segments[i];
      if (s.kind == Segment::Kind::arc && s.radius <= 0.0)
        throw error("invalid-geometry", "arc radius must be positive");
      if (s.approx_length() <= 0.0)
        throw error("invalid-geometry", "segment has vanishing length");
      for (double t : {0.0, 0.37, 0.74, 1.0})
        if (std::abs(s.velocity(t)) <= 0.0)
          throw error("invalid-geometry", "segment velocity vanishes");
      if (i + 1 < segments.size() && std::abs(segments[i + 1].a - s.b) > 1e-12 * scale)
        throw error("invalid-geometry",
                    "segments are not chained: gap after segment " + std::to_string(i));
    }
    if (closed && std::abs(segments.front().a - segments.back().b) > 1e-12 * scale)
      throw error("invalid-geometry", "closed contour does not return to its start");
  }

  Contour reversed() const {
    Contour c;
    c.closed = closed;
    c.orientation = -orientation;
    c.label = label;
    c.segments.reserve(segments.size());
    for (auto it = segments.rbegin(); it != segments.rend(); ++it)
      c.segments.push_back(it->reversed());
    return c;
  }

  double approx_length() const {
    double len = 0.0;
    for (const auto& s : segments) len += s.approx_length();
    return len;
  }
};

// Counterclockwise circle, four quarter arcs.
inline Contour circle(cx center, double radius, std::string label = "") {
  if (!(radius > 0.0)) throw error("invalid-geometry", "circle radius must be positive");
  Contour c;
  c.closed = true;
  c.label = label.empty() ? "circle r=" + std::to_string(radius) : std::move(label);
  for (int q = 0; q < 4; ++q)
    c.segments.push_back(Segment::arc_about(center, radius, q * pi / 2, (q + 1) * pi / 2));
  c.validate();
  return c;
}

// Counterclockwise axis-aligned rectangle.
inline Contour rectangle(cx lower_left, cx upper_right, std::string label = "") {
  if (!(upper_right.real() > lower_left.real()) || !(upper_right.imag() > lower_left.imag()))
    throw error("invalid-geometry", "rectangle corners are not ordered");
  cx lr{upper_right.real(), lower_left.imag()};
  cx ul{lower_left.real(), upper_right.imag()};
  Contour c;
  c.closed = true;
  c.label = label.empty() ? "rectangle" : std::move(label);
  c.segments.push_back(Segment::line_between(lower_left, lr));
  c.segments.push_back(Segment::line_between(lr, upper_right));
  c.segments.push_back(Segment::line_between(upper_right, ul));
  c.segments.push_back(Segment::line_between(ul, lower_left));
  c.validate();
  return c;
}

namespace detail {
inline int ray_panels(double delta, double r) {
  // First dyadic panel comparable to the vertex arc radius.
  double len = r - delta;
  int m = (int)std::ceil(std::log2(std::max(2.0, len / std::max(delta, 1e-6))));
  return std::clamp(m, 2, 40);
}
}  // namespace detail

// Open vertex contour: inbound ray at angle -psi from radius r down to delta,
// arc of radius delta swept counterclockwise through angle 0, outbound ray at
// +psi back out to radius r. Imaginary part increases at the vertex crossing.
inline Contour angular_contour(cx vertex, double psi, double delta, double r) {
  if (!(psi > pi / 2) || !(psi <= pi))
    throw error("invalid-angle", "opening angle must satisfy pi/2 < psi <= pi");
  if (!(delta > 0.0) || !(delta < r))
    throw error("invalid-geometry", "need 0 < delta < r");
  int m = detail::ray_panels(delta, r);
  cx lo = std::polar(1.0, -psi), hi = std::polar(1.0, psi);
  Contour c;
  c.closed = false;
  std::ostringstream os;
  os << "vertex contour psi=" << psi << " delta=" << delta << " r=" << r;
  c.label = os.str();
  c.segments.push_back(Segment::line_between(vertex + r * lo, vertex + delta * lo, -m));
  c.segments.push_back(Segment::arc_about(vertex, delta, -psi, psi));
  c.segments.push_back(Segment::line_between(vertex + delta * hi, vertex + r * hi, m));
  c.validate();
  return c;
}

// Closed counterclockwise tube of half-width eps around the vertex contour:
// hull-side offsets + an enlarged vertex arc, end caps at radius r, and the
// wedge-side offsets meeting at a corner on the axis bisecting the opening.
// Winds once around every point of the vertex contour and nothing else.
inline Contour hankel_tube(cx vertex, double psi, double delta, double r, double eps) {
  if (!(psi > pi / 2) || !(psi < pi))
    throw error("invalid-angle", "tube needs pi/2 < psi < pi");
  if (!(eps > 0.0) || !(delta + eps < r))
    throw error("invalid-geometry", "tube half-width out of range");
  cx lo = std::polar(1.0, -psi), hi = std::polar(1.0, psi);
  const cx i{0.0, 1.0};
  double xs = std::sqrt((delta + eps) * (delta + eps) - eps * eps);
  double ths = std::atan2(eps, xs);
  double xw = eps / std::tan(pi - psi);
  int m = detail::ray_panels(delta, r);

  Contour c;
  c.closed = true;
  std::ostringstream os;
  os << "vertex tube psi=" << psi << " delta=" << delta << " r=" << r << " eps=" << eps;
  c.label = os.str();
  auto at = [&](cx z) { return vertex + z; };
  // hull side of the lower ray, inward
  c.segments.push_back(Segment::line_between(at((r + i * eps) * lo), at((xs + i * eps) * lo), -m));
  // enlarged vertex arc
  c.segments.push_back(Segment::arc_about(vertex, delta + eps, -psi + ths, psi - ths));
  // hull side of the upper ray, outward
  c.segments.push_back(Segment::line_between(at((xs - i * eps) * hi), at((r - i * eps) * hi), m));
  // cap around the upper ray end
  c.segments.push_back(Segment::arc_about(at(r * hi), eps, psi - pi / 2, psi + pi / 2));
  // wedge side of the upper ray, inward to the corner on the bisector
  c.segments.push_back(Segment::line_between(at((r + i * eps) * hi), at((xw + i * eps) * hi), -m));
  // wedge side of the lower ray, outward
  c.segments.push_back(Segment::line_between(at((xw - i * eps) * lo), at((r - i * eps) * lo), m));
  // cap around the lower ray end
  c.segments.push_back(Segment::arc_about(at(r * lo), eps, -psi - pi / 2, -psi + pi / 2));
  c.validate();
  return c;
}

struct QuadratureConfig {
  int nodes_per_panel = 32;  // >= 4
  enum class Rule { gauss_legendre, trapezoid } rule = Rule::gauss_legendre;
  double refine_rel_tol = 1e-10;
  int max_refinements = 6;
};

struct QuadratureResult {
  cx value{};
  double abs_error = 0.0;  // gap between the last two refinement levels
  double l1_mass = 0.0;    // integral of |density| |ds| at the finest level
  int levels = 0;
  std::size_t evaluations = 0;
  bool converged = false;
};

// All quadrature nodes of a contour at a given per-panel count, in traversal
// order. Used for membership/clearance checks against the same nodes that
// integrate() visits first.
inline std::vector<cx> contour_nodes(const Contour& c, int per_panel = 32) {
  std::vector<cx> out;
  std::vector<double> breaks;
  const auto& rule = detail::gl_rule(per_panel);
  for (const auto& seg : c.segments) {
    seg.panel_breaks(breaks);
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      double ta = breaks[p], tb = breaks[p + 1];
      for (int k = 0; k < per_panel; ++k)
        out.push_back(seg.point(0.5 * (ta + tb) + 0.5 * (tb - ta) * rule.x[k]));
    }
  }
  return out;
}

template <class F>
QuadratureResult integrate(F&& density, const Contour& c, const QuadratureConfig& cfg = {}) {
  if (cfg.nodes_per_panel < 4) throw error("invalid-geometry", "need at least 4 nodes per panel");
  c.validate();

  std::vector<double> breaks;
  QuadratureResult res;

  auto level_value = [&](int level, double& l1) -> cx {
    int n = cfg.nodes_per_panel << level;
    cx total{};
    l1 = 0.0;
    for (const auto& seg : c.segments) {
      seg.panel_breaks(breaks);
      for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
        double ta = breaks[p], tb = breaks[p + 1], half = 0.5 * (tb - ta);
        cx acc{};
        double accl1 = 0.0;
        if (cfg.rule == QuadratureConfig::Rule::gauss_legendre) {
          const auto& rule = detail::gl_rule(n);
          for (int k = 0; k < n; ++k) {
            double t = 0.5 * (ta + tb) + half * rule.x[k];
            cx z = seg.point(t);
            cx fz = density(z);
            ++res.evaluations;
            if (!is_finite(fz))
              throw error("singularity-on-path",
                          "density is not finite at " + detail::cx_str(z));
            cx term = fz * seg.velocity(t);
            acc += rule.w[k] * term;
            accl1 += rule.w[k] * std::abs(term);
          }
        } else {
          for (int k = 0; k <= n; ++k) {
            double t = ta + (tb - ta) * k / n;
            cx z = seg.point(t);
            cx fz = density(z);
            ++res.evaluations;
            if (!is_finite(fz))
              throw error("singularity-on-path",
                          "density is not finite at " + detail::cx_str(z));
            cx term = fz * seg.velocity(t);
            double w = (k == 0 || k == n) ? 1.0 : 2.0;
            acc += w * term / (double)n;
            accl1 += w * std::abs(term) / (double)n;
          }
        }
        total += half * acc;
        l1 += half * accl1;
      }
    }
    return total;
  };

  double l1 = 0.0;
  cx prev = level_value(0, l1);
  for (int level = 1; level <= cfg.max_refinements; ++level) {
    cx cur = level_value(level, l1);
    double gap = std::abs(cur - prev);
    res.value = cur;
    res.abs_error = gap;
    res.l1_mass = l1;
    res.levels = level;
    if (gap <= cfg.refine_rel_tol * std::max(std::abs(cur), 1e-3 * l1) + 1e-300) {
      res.converged = true;
      return res;
    }
    prev = cur;
  }
  std::ostringstream os;
  os << "quadrature did not reach rel tol " << cfg.refine_rel_tol << " within "
     << cfg.max_refinements << " refinements on " << c.label
     << "; best value " << detail::cx_str(res.value) << " gap " << res.abs_error;
  throw error("no-convergence", os.str());
}

struct WindingOptions {
  int initial_per_panel = 24;
  int max_bisect_depth = 42;
  double boundary_zero_rel = 1e-8;  // min|f| below this multiple of max|f| aborts
};

// Argument-principle count of zeros minus poles of f enclosed by a closed
// contour. Tracks arg f along the path, bisecting any step whose argument
// increment exceeds pi/2.
inline int count_zeros(const std::function<cx(cx)>& f, const Contour& c,
                       const WindingOptions& opt = {}) {
  c.validate();
  if (!c.closed) throw error("invalid-geometry", "count_zeros needs a closed contour");

  double minabs = std::numeric_limits<double>::infinity(), maxabs = 0.0;
  auto eval = [&](cx z) {
    cx v = f(z);
    if (!is_finite(v)) throw error("singularity-on-path", "f not finite at " + detail::cx_str(z));
    double a = std::abs(v);
    minabs = std::min(minabs, a);
    maxabs = std::max(maxabs, a);
    return v;
  };

  // An interval is only accepted once its midpoint confirms the principal value:
  // both halves must be small, agree with the parent step mod 2pi, and keep |f|
  // within a factor 2 endpoint to endpoint. A zero skimming the contour can hide
  // a full turn between samples, but not without |f| dipping hard on the way.
  auto calm = [](cx a, cx b) {
    double ma = std::abs(a), mb = std::abs(b);
    return std::min(ma, mb) * 2 >= std::max(ma, mb);
  };
  double total = 0.0;
  std::function<double(const Segment&, double, cx, double, cx, int)> track =
      [&](const Segment& seg, double t0, cx f0, double t1, cx f1, int depth) -> double {
    if (depth >= opt.max_bisect_depth) {
      if (minabs < opt.boundary_zero_rel * maxabs)
        throw error("zero-on-boundary", "zero or pole on the contour near " +
                                            detail::cx_str(seg.point(0.5 * (t0 + t1))));
      throw error("no-convergence", "argument tracking failed near " +
                                        detail::cx_str(seg.point(0.5 * (t0 + t1))));
    }
    double tm = 0.5 * (t0 + t1);
    cx fm = eval(seg.point(tm));
    double d1 = std::arg(fm / f0), d2 = std::arg(f1 / fm);
    if (calm(f0, fm) && calm(fm, f1) && std::abs(d1) <= pi / 2 && std::abs(d2) <= pi / 2 &&
        std::abs(d1 + d2 - std::arg(f1 / f0)) < pi)
      return d1 + d2;
    return track(seg, t0, f0, tm, fm, depth + 1) + track(seg, tm, fm, t1, f1, depth + 1);
  };

  std::vector<double> breaks;
  for (const auto& seg : c.segments) {
    seg.panel_breaks(breaks);
    double prev_t = 0.0;
    cx prev_f = eval(seg.point(0.0));
    for (std::size_t p = 0; p + 1 < breaks.size(); ++p) {
      for (int k = 1; k <= opt.initial_per_panel; ++k) {
        double t = breaks[p] + (breaks[p + 1] - breaks[p]) * k / opt.initial_per_panel;
        cx fv = eval(seg.point(t));
        total += track(seg, prev_t, prev_f, t, fv, 0);
        prev_t = t;
        prev_f = fv;
      }
    }
  }

  if (minabs < opt.boundary_zero_rel * maxabs)
    throw error("zero-on-boundary", "zero on or very near the contour (min|f|/max|f| = " +
                                        std::to_string(minabs / maxabs) + ")");
  double turns = total / (2 * pi);
  double rounded = std::round(turns);
  if (std::abs(turns - rounded) > 0.1)
    throw error("no-convergence",
                "winding number " + std::to_string(turns) + " is not close to an integer");
  return (int)rounded;
}

inline double winding_number(const Contour& c, cx p) {
  return count_zeros([p](cx s) { return s - p; }, c);
}

// JSON wire format
inline void to_json(nlohmann::ordered_json& j, const Segment& s) {
  j = nlohmann::ordered_json{{"kind", s.kind == Segment::Kind::line ? "line" : "arc"},
                             {"from", {s.a.real(), s.a.imag()}},
                             {"to", {s.b.real(), s.b.imag()}}};
  if (s.kind == Segment::Kind::arc) {
    j["center"] = {s.center.real(), s.center.imag()};
    j["radius"] = s.radius;
    j["from_angle"] = s.ang0;
    j["to_angle"] = s.ang1;
  } else if (s.dyadic_panels != 0) {
    j["panels"] = s.dyadic_panels;
  }
}

inline void from_json(const nlohmann::ordered_json& j, Segment& s) {
  std::string kind = j.at("kind").get<std::string>();
  if (kind == "line") {
    auto f = j.at("from"), t = j.at("to");
    s = Segment::line_between(cx(f[0].get<double>(), f[1].get<double>()),
                              cx(t[0].get<double>(), t[1].get<double>()),
                              j.value("panels", 0));
  } else if (kind == "arc") {
    auto ctr = j.at("center");
    s = Segment::arc_about(cx(ctr[0].get<double>(), ctr[1].get<double>()),
                           j.at("radius").get<double>(), j.at("from_angle").get<double>(),
                           j.at("to_angle").get<double>());
  } else {
    throw error("invalid-geometry", "unknown segment kind '" + kind + "'");
  }
}

inline void to_json(nlohmann::ordered_json& j, const Contour& c) {
  j = nlohmann::ordered_json{{"label", c.label},
                             {"closed", c.closed},
                             {"orientation", c.orientation},
                             {"segments", nlohmann::ordered_json::array()}};
  for (const auto& s : c.segments) {
    nlohmann::ordered_json js;
    to_json(js, s);
    j["segments"].push_back(std::move(js));
  }
}

inline void from_json(const nlohmann::ordered_json& j, Contour& c) {
  c.label = j.value("label", "");
  c.closed = j.at("closed").get<bool>();
  c.orientation = j.value("orientation", +1);
  c.segments.clear();
  for (const auto& js : j.at("segments")) {
    Segment s;
    from_json(js, s);
    c.segments.push_back(s);
  }
  c.validate();
}

}  // namespace borelcalc
