#pragma once

// Analytic symbols f on a domain Omega: the Riemann zeta engine, the shifted
// symbol zeta(s^2+h) in its three h-regimes, Dirichlet series, and the CLI
// symbol grammar.

#include <cmath>
#include <cstdlib>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "common.hpp"
#include "contour.hpp"

namespace borelcalc {

namespace detail {

// log sin(pi z), stable for large |Im z|. The result may differ from the
// principal branch by 2 pi i k; callers only ever exponentiate sums of these.
inline cx log_sin_pi(cx z) {
  cx w = pi * z;
  if (w.imag() > 1.0) {
    cx small = std::exp(cx(0, 2) * w);  // |.| <= e^{-2}
    return -cx(0, 1) * w - std::log(2.0) + cx(0, pi / 2) + std::log(1.0 - small);
  }
  if (w.imag() < -1.0) {
    cx small = std::exp(cx(0, -2) * w);
    return cx(0, 1) * w - std::log(2.0) - cx(0, pi / 2) + std::log(1.0 - small);
  }
  return std::log(std::sin(w));
}

inline cx lanczos_log_gamma(cx z) {
  // 15-term rational set for g = 607/128; ~1e-13 relative on Re(z) >= 0.5
  static constexpr double g = 607.0 / 128.0;
  static constexpr double c[15] = {
      0.99999999999999709182,     57.156235665862923517,     -59.597960355475491248,
      14.136097974741747174,     -0.49191381609762019978,    0.33994649984811888699e-4,
      0.46523628927048575665e-4, -0.98374475304879564677e-4, 0.15808870322491248884e-3,
      -0.21026444172410488319e-3, 0.21743961811521264320e-3, -0.16431810653676389022e-3,
      0.84418223983852743293e-4, -0.26190838401581408670e-4, 0.36899182659531622704e-5};
  z -= 1.0;
  cx a = c[0];
  for (int k = 1; k < 15; ++k) a += c[k] / (z + (double)k);
  cx t = z + g + 0.5;
  return 0.5 * std::log(2 * pi) + (z + 0.5) * std::log(t) - t + std::log(a);
}

}  // namespace detail

inline cx log_gamma(cx z) {
  if (z.real() >= 0.5) return detail::lanczos_log_gamma(z);
  // reflection; log-space so huge factors never materialize
  return std::log(pi) - detail::log_sin_pi(z) - detail::lanczos_log_gamma(1.0 - z);
}

inline cx gamma_fn(cx z) { return std::exp(log_gamma(z)); }

namespace detail {

inline constexpr double bernoulli_2k[12] = {
    1.0 / 6,       -1.0 / 30,      1.0 / 42,       -1.0 / 30,
    5.0 / 66,      -691.0 / 2730,  7.0 / 6,        -3617.0 / 510,
    43867.0 / 798, -174611.0 / 330, 854513.0 / 138, -236364091.0 / 2730};

// Euler-Maclaurin continuation. Accurate for Re(s) > -1 or so; the public
// zeta() routes Re(s) < -0.5 through the functional equation instead.
inline cx zeta_em(cx s) {
  int N = std::max(20, (int)std::ceil(std::abs(s.imag())) + 20);
  cx sum{};
  for (int n = 1; n < N; ++n) sum += std::exp(-s * std::log((double)n));
  cx Ns = std::exp(-s * std::log((double)N));
  sum += 0.5 * Ns + Ns * (double)N / (s - 1.0);
  cx P = s;                 // rising factorial s(s+1)...(s+2k-2)
  cx Nfac = Ns / (double)N;  // N^{-s-2k+1}
  double fact = 2.0;        // (2k)!
  for (int k = 1; k <= 12; ++k) {
    sum += bernoulli_2k[k - 1] / fact * P * Nfac;
    P *= (s + (double)(2 * k - 1)) * (s + (double)(2 * k));
    Nfac /= (double)(N) * (double)(N);
    fact *= (double)(2 * k + 1) * (double)(2 * k + 2);
  }
  return sum;
}

}  // namespace detail

inline cx zeta(cx s) {
  if (std::abs(s - 1.0) < 1e-14) throw error("pole", "zeta has its pole at s = 1");
  if (s.real() > 45.0)  // tail below 5^{-45}
    return 1.0 + std::exp(-s * std::log(2.0)) + std::exp(-s * std::log(3.0)) +
           std::exp(-s * std::log(4.0));
  if (s.real() >= -0.5) return detail::zeta_em(s);
  // zeta(s) = 2^s pi^{s-1} sin(pi s/2) Gamma(1-s) zeta(1-s), assembled in log
  // space: the naive product overflows once |Im s| gets past a few hundred
  cx lg = s * std::log(2.0) + (s - 1.0) * std::log(pi) + detail::log_sin_pi(s / 2.0) +
          log_gamma(1.0 - s);
  return std::exp(lg) * zeta(1.0 - s);
}

inline cx zeta_shifted(cx s, double h) {
  cx w = s * s + h;
  if (std::abs(w - 1.0) < 1e-12)
    throw error("pole", "zeta(s^2+h) pole: s^2+h = 1 at s = " + detail::cx_str(s));
  return zeta(w);
}

// ---------------------------------------------------------------------------
// Domains

struct Ray {
  cx start{};
  cx dir{};  // unit direction; the ray is {start + t dir : t >= 0}
};

class DomainDescriptor {
 public:
  enum class Kind { entire, minus_rays, minus_point, half_plane, ball, custom };

  static DomainDescriptor entire() { return DomainDescriptor(Kind::entire); }
  static DomainDescriptor minus_rays(std::vector<Ray> rays) {
    DomainDescriptor d(Kind::minus_rays);
    for (auto& r : rays) r.dir /= std::abs(r.dir);
    d.rays_ = std::move(rays);
    return d;
  }
  static DomainDescriptor minus_point(cx p) {
    DomainDescriptor d(Kind::minus_point);
    d.point_ = p;
    return d;
  }
  static DomainDescriptor half_plane(double re_min) {
    DomainDescriptor d(Kind::half_plane);
    d.re_min_ = re_min;
    return d;
  }
  static DomainDescriptor ball(cx center, double radius) {
    DomainDescriptor d(Kind::ball);
    d.center_ = center;
    d.radius_ = radius;
    return d;
  }
  static DomainDescriptor custom(std::function<bool(cx)> pred) {
    DomainDescriptor d(Kind::custom);
    d.pred_ = std::move(pred);
    return d;
  }

  Kind kind() const { return kind_; }
  const std::vector<Ray>& rays() const { return rays_; }

  bool contains(cx s) const {
    switch (kind_) {
      case Kind::entire: return true;
      case Kind::minus_rays: {
        for (const auto& r : rays_)
          if (ray_distance(r, s) <= 0.0) return false;
        return true;
      }
      case Kind::minus_point: return std::abs(s - point_) > 0.0;
      case Kind::half_plane: return s.real() > re_min_;
      case Kind::ball: return std::abs(s - center_) < radius_;
      case Kind::custom: return pred_(s);
    }
    return false;
  }

  // distance from s to the excluded set (to the domain boundary for
  // half-plane/ball); +inf when there is no describable boundary
  double excluded_distance(cx s) const {
    switch (kind_) {
      case Kind::entire: return std::numeric_limits<double>::infinity();
      case Kind::minus_rays: {
        double d = std::numeric_limits<double>::infinity();
        for (const auto& r : rays_) d = std::min(d, ray_distance(r, s));
        return d;
      }
      case Kind::minus_point: return std::abs(s - point_);
      case Kind::half_plane: return s.real() - re_min_;
      case Kind::ball: return radius_ - std::abs(s - center_);
      case Kind::custom: return std::numeric_limits<double>::infinity();
    }
    return 0.0;
  }

 private:
  explicit DomainDescriptor(Kind k) : kind_(k) {}

  static double ray_distance(const Ray& r, cx s) {
    cx v = s - r.start;
    double t = std::max(0.0, v.real() * r.dir.real() + v.imag() * r.dir.imag());
    return std::abs(v - t * r.dir);
  }

  Kind kind_;
  std::vector<Ray> rays_;
  cx point_{}, center_{};
  double re_min_ = 0.0, radius_ = 0.0;
  std::function<bool(cx)> pred_;
};

// Holomorphy region of zeta(s^2+h). The excluded rays carry the preimages of
// the segment (-inf, 1] under s^2 + h, where the continuation of zeta cannot
// be pulled back single-valued... the pole preimages sit at the ray tips.
inline DomainDescriptor omega_for_h(double h) {
  if (h > 1.0) {
    double q = std::sqrt(h - 1.0);
    return DomainDescriptor::minus_rays({{cx(0, q), cx(1, 0)}, {cx(0, -q), cx(1, 0)}});
  }
  if (h < 1.0) {
    double q = std::sqrt(1.0 - h);
    return DomainDescriptor::minus_rays({{cx(q, 0), cx(0, 1)}, {cx(-q, 0), cx(0, 1)}});
  }
  return DomainDescriptor::minus_rays({{cx(0, 0), cx(1, 0)}});
}

// ---------------------------------------------------------------------------
// Symbols

struct SymbolSpec {
  std::function<cx(cx)> evaluate;
  DomainDescriptor omega = DomainDescriptor::entire();
  std::vector<cx> poles;
  std::optional<cx> taylor_center;
  std::vector<cx> taylor_coeffs;
  std::string label;
};

inline SymbolSpec make_symbol(SymbolSpec spec) {
  for (cx p : spec.poles)
    if (spec.omega.contains(p))
      throw error("invalid-symbol",
                  "listed pole " + detail::cx_str(p) + " lies inside the domain");
  detrng rng(0x5ead00d1eull);
  int probes = 0, attempts = 0;
  while (probes < 6 && attempts < 400) {
    ++attempts;
    cx s = rng.disc(2.5);
    if (!spec.omega.contains(s)) continue;
    bool clear = true;
    for (cx p : spec.poles)
      if (std::abs(s - p) < 0.15) clear = false;
    if (!clear) continue;
    if (!is_finite(spec.evaluate(s)))
      throw error("invalid-symbol", "symbol not finite at probe " + detail::cx_str(s));
    ++probes;
  }
  return spec;
}

inline SymbolSpec symbol_exp() {
  return make_symbol({[](cx s) { return std::exp(s); },
                      DomainDescriptor::entire(),
                      {},
                      {},
                      {},
                      "exp"});
}

// coefficients ascending: c[0] + c[1] s + c[2] s^2 + ...
inline SymbolSpec symbol_poly(std::vector<cx> coeffs) {
  if (coeffs.empty()) throw error("usage", "poly symbol needs coefficients");
  auto eval = [coeffs](cx s) {
    cx p{};
    for (std::size_t d = coeffs.size(); d-- > 0;) p = p * s + coeffs[d];
    return p;
  };
  std::string lbl = "poly:";
  for (std::size_t i = 0; i < coeffs.size(); ++i)
    lbl += (i ? "," : "") + detail::cx_str(coeffs[i]);
  return make_symbol({eval, DomainDescriptor::entire(), {}, cx(0, 0), coeffs, lbl});
}

inline SymbolSpec symbol_zeta_shifted(double h) {
  std::vector<cx> poles;
  if (h > 1.0) {
    double q = std::sqrt(h - 1.0);
    poles = {cx(0, q), cx(0, -q)};
  } else if (h < 1.0) {
    double q = std::sqrt(1.0 - h);
    poles = {cx(q, 0), cx(-q, 0)};
  } else {
    poles = {cx(0, 0)};
  }
  return make_symbol({[h](cx s) { return zeta_shifted(s, h); },
                      omega_for_h(h),
                      poles,
                      {},
                      {},
                      "zeta-shifted:h=" + detail::num_str(h)});
}

// ---------------------------------------------------------------------------
// Dirichlet series

// L(s, chi) for a character table chi of period m (chi[a-1] is the value on
// the class of a). Direct summation plus an Euler-Maclaurin tail per residue
// class; only Re(s) > 1 is on offer, no continuation.
inline cx dirichlet_l(cx s, const std::vector<cx>& chi) {
  if (chi.empty() || chi.size() > 1000)
    throw error("invalid-sequence", "character table size out of range");
  if (!(s.real() > 1.0))
    throw error("outside-domain", "Dirichlet L implemented for Re(s) > 1 only");
  int m = (int)chi.size();
  long long M = std::max<long long>({50, 12LL * m, (long long)std::ceil(std::abs(s.imag())) + 30});
  cx head{};
  for (long long n = 1; n <= M; ++n) {
    cx c = chi[(n - 1) % m];
    if (std::abs(c) != 0.0) head += c * std::exp(-s * std::log((double)n));
  }
  cx tail{};
  for (int a = 1; a <= m; ++a) {
    cx c = chi[a - 1];
    if (std::abs(c) == 0.0) continue;
    long long j0 = (M - a) / m + 1;
    double x0 = (double)(a + m * j0);
    cx x0s = std::exp(-s * std::log(x0));
    cx T = x0s * x0 / ((double)m * (s - 1.0)) + 0.5 * x0s;
    cx P = s;
    cx xfac = x0s / x0;
    double mk = (double)m, fact = 2.0;
    for (int k = 1; k <= 8; ++k) {
      T += detail::bernoulli_2k[k - 1] / fact * mk * P * xfac;
      P *= (s + (double)(2 * k - 1)) * (s + (double)(2 * k));
      xfac /= x0 * x0;
      mk *= (double)m * (double)m;
      fact *= (double)(2 * k + 1) * (double)(2 * k + 2);
    }
    tail += c * T;
  }
  return head + tail;
}

// General Dirichlet series sum a_n / n^s for a bounded coefficient stream.
// Doubling truncation with a Cauchy stop; the series itself is the only
// oracle available for arbitrary coefficients.
inline cx dirichlet_series(cx s, const std::function<cx(long long)>& a,
                           double tol = 1e-10) {
  if (!(s.real() > 1.0))
    throw error("outside-domain", "Dirichlet series implemented for Re(s) > 1 only");
  cx sum{};
  long long n = 0;
  int calm = 0;
  for (long long M = 1024; M <= (1LL << 22); M *= 2) {
    cx before = sum;
    while (n < M) {
      ++n;
      cx an = a(n);
      if (std::abs(an) > 1e6)
        throw error("invalid-sequence", "coefficient |a_n| > 1e6 at n = " + std::to_string(n));
      if (std::abs(an) != 0.0) sum += an * std::exp(-s * std::log((double)n));
    }
    if (std::abs(sum - before) <= tol * std::max(1.0, std::abs(sum))) {
      if (++calm >= 2) return sum;
    } else {
      calm = 0;
    }
  }
  throw error("no-convergence", "series not Cauchy-stable within the term budget");
}

// ---------------------------------------------------------------------------
// Taylor data for zeta(s^2+h), h > 1: a_k = (1/2pi i) oint zeta(s^2+h)/s^{k+1} ds
// on |s| = rho < sqrt(h-1). Odd coefficients vanish by evenness and are pinned.
inline std::vector<cx> taylor_zeta_shifted(double h, int K, double rho) {
  if (!(h > 1.0)) throw error("invalid-argument", "taylor data needs h > 1");
  if (K < 0 || K > 64) throw error("invalid-argument", "order K must lie in [0, 64]");
  double q = std::sqrt(h - 1.0);
  if (!(rho > 0.0) || rho >= q)
    throw error("radius-too-large",
                "need 0 < rho < sqrt(h-1): the circle would meet the poles");
  auto gamma = circle(cx(0, 0), rho);
  std::vector<cx> out(K + 1, cx(0, 0));
  for (int k = 0; k <= K; k += 2) {
    auto r = integrate(
        [&, k](cx s) { return zeta_shifted(s, h) / std::pow(s, (double)(k + 1)); }, gamma);
    out[k] = r.value / cx(0, 2 * pi);
  }
  return out;
}

inline SymbolSpec symbol_dirichlet_l(int mod, std::vector<cx> chi) {
  if (mod <= 0 || (int)chi.size() != mod)
    throw error("usage", "character table must have exactly 'mod' entries");
  std::string lbl = "dirichlet-l:mod=" + std::to_string(mod) + ",chi=";
  for (std::size_t i = 0; i < chi.size(); ++i) lbl += (i ? "," : "") + detail::cx_str(chi[i]);
  return make_symbol({[chi](cx s) { return dirichlet_l(s, chi); },
                      DomainDescriptor::half_plane(1.0),
                      {},
                      {},
                      {},
                      lbl});
}

// ---------------------------------------------------------------------------
// Parsing

// complex literals as "a+bi" with no spaces: 1.5, -2i, 3+0.25i, 1e-3-2e2i
inline cx parse_complex(std::string text) {
  std::erase(text, ' ');
  if (text.empty()) throw error("usage", "empty complex literal");
  auto parse_real = [](const std::string& t) {
    if (t == "" || t == "+") return 1.0;
    if (t == "-") return -1.0;
    char* end = nullptr;
    double v = std::strtod(t.c_str(), &end);
    if (end != t.c_str() + t.size()) throw error("usage", "bad numeric literal '" + t + "'");
    return v;
  };
  if (text.back() == 'i' || text.back() == 'I') {
    std::string body = text.substr(0, text.size() - 1);
    // split at the last +/- that is not an exponent sign and not leading
    for (std::size_t p = body.size(); p-- > 1;) {
      if ((body[p] == '+' || body[p] == '-') && body[p - 1] != 'e' && body[p - 1] != 'E')
        return cx(parse_real(body.substr(0, p)), parse_real(body.substr(p)));
    }
    return cx(0.0, parse_real(body));
  }
  return cx(parse_real(text), 0.0);
}

namespace detail {

inline std::vector<std::string> split(const std::string& text, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    std::size_t p = text.find(sep, start);
    if (p == std::string::npos) {
      out.push_back(text.substr(start));
      return out;
    }
    out.push_back(text.substr(start, p - start));
    start = p + 1;
  }
}

inline double parse_double(const std::string& t) {
  char* end = nullptr;
  double v = std::strtod(t.c_str(), &end);
  if (t.empty() || end != t.c_str() + t.size())
    throw error("usage", "bad numeric literal '" + t + "'");
  return v;
}

}  // namespace detail

// Symbol grammar: "exp" | "poly:c0,c1,..." (ascending powers) |
// "zeta-shifted:h=H" | "dirichlet-l:mod=M,chi=v1,...,vM"
inline SymbolSpec parse_symbol(const std::string& spec) {
  std::string head = spec, rest;
  if (auto p = spec.find(':'); p != std::string::npos) {
    head = spec.substr(0, p);
    rest = spec.substr(p + 1);
  }
  if (head == "exp") {
    if (!rest.empty()) throw error("usage", "exp takes no parameters");
    return symbol_exp();
  }
  if (head == "poly") {
    std::vector<cx> coeffs;
    for (const auto& tok : detail::split(rest, ',')) coeffs.push_back(parse_complex(tok));
    return symbol_poly(std::move(coeffs));
  }
  if (head == "zeta-shifted") {
    if (rest.rfind("h=", 0) != 0)
      throw error("usage", "zeta-shifted wants h=<real>, got '" + rest + "'");
    return symbol_zeta_shifted(detail::parse_double(rest.substr(2)));
  }
  if (head == "dirichlet-l") {
    auto parts = detail::split(rest, ',');
    if (parts.size() < 2 || parts[0].rfind("mod=", 0) != 0 || parts[1].rfind("chi=", 0) != 0)
      throw error("usage", "dirichlet-l wants mod=M,chi=v1,...,vM");
    int mod = (int)detail::parse_double(parts[0].substr(4));
    std::vector<cx> chi;
    chi.push_back(parse_complex(parts[1].substr(4)));
    for (std::size_t i = 2; i < parts.size(); ++i) chi.push_back(parse_complex(parts[i]));
    return symbol_dirichlet_l(mod, std::move(chi));
  }
  throw error("usage", "unknown symbol '" + spec + "'");
}

}  // namespace borelcalc
