#pragma once

// Entire functions of exponential type and their Borel transforms.
// A function is carried either as exponential-polynomial terms
// sum_k p_k(z) e^{lambda_k z} (closed under differentiation, exact Borel
// transform available) or as a truncated power series, or both.

#include <cmath>
#include <functional>
#include <optional>
#include <vector>

#include "common.hpp"
#include "contour.hpp"

namespace borelcalc {

struct ExpPolyTerm {
  std::vector<cx> coeffs;  // ascending: coeffs[d] z^d
  cx lambda{};
};

// Growth order from Taylor data. Fits ln|phi^(n)(0)| ~ alpha n ln n + beta n + c
// over the window n in [N/2, N] and reports 1/(1-alpha); the plain per-n
// quotient converges like 1/ln n and never reaches useful accuracy at N ~ 64.
inline double estimate_order(const std::vector<cx>& coeffs) {
  if (coeffs.size() < 9) throw error("invalid-sequence", "need at least 9 Taylor coefficients");
  std::size_t N = coeffs.size() - 1;
  double s11 = 0, s12 = 0, s13 = 0, s22 = 0, s23 = 0, s33 = 0, b1 = 0, b2 = 0, b3 = 0;
  int pts = 0;
  for (std::size_t n = N / 2; n <= N; ++n) {
    double mag = std::abs(coeffs[n]);
    if (!(mag > 0.0)) continue;
    double L = std::lgamma((double)n + 1.0) + std::log(mag);
    double u = n * std::log((double)n), v = (double)n;
    s11 += u * u; s12 += u * v; s13 += u; s22 += v * v; s23 += v; s33 += 1.0;
    b1 += u * L; b2 += v * L; b3 += L;
    ++pts;
  }
  if (pts < 3) return 0.0;  // polynomial convention
  double det = s11 * (s22 * s33 - s23 * s23) - s12 * (s12 * s33 - s23 * s13) +
               s13 * (s12 * s23 - s22 * s13);
  if (std::abs(det) < 1e-30) return 0.0;
  double alpha = (b1 * (s22 * s33 - s23 * s23) - s12 * (b2 * s33 - s23 * b3) +
                  s13 * (b2 * s23 - s22 * b3)) / det;
  alpha = std::min(alpha, 1.0 - 1e-6);
  double rho = 1.0 / (1.0 - alpha);
  return std::max(rho, 0.0);
}

// Exponential type: max over the window of |phi^(n)(0)|^{1/n}.
inline double estimate_type(const std::vector<cx>& coeffs) {
  if (coeffs.size() < 9) throw error("invalid-sequence", "need at least 9 Taylor coefficients");
  std::size_t N = coeffs.size() - 1;
  double best = 0.0;
  for (std::size_t n = N / 2; n <= N; ++n) {
    double mag = std::abs(coeffs[n]);
    if (!(mag > 0.0)) continue;
    best = std::max(best, std::exp((std::lgamma((double)n + 1.0) + std::log(mag)) / n));
  }
  return best;
}

class EntireFn {
 public:
  static EntireFn from_terms(std::vector<ExpPolyTerm> terms,
                             std::optional<double> declared_type = {}) {
    EntireFn f;
    f.terms_ = normalize_terms(std::move(terms));
    f.has_terms_ = true;
    f.declared_type_ = declared_type;
    f.check_declared_type();
    return f;
  }

  static EntireFn from_series(std::vector<cx> series, std::optional<double> declared_type = {}) {
    EntireFn f;
    f.series_ = std::move(series);
    f.has_series_ = true;
    f.declared_type_ = declared_type;
    return f;
  }

  static EntireFn from_both(std::vector<ExpPolyTerm> terms, std::vector<cx> series,
                            std::optional<double> declared_type = {}) {
    EntireFn f;
    f.terms_ = normalize_terms(std::move(terms));
    f.has_terms_ = true;
    f.series_ = std::move(series);
    f.has_series_ = true;
    f.declared_type_ = declared_type;
    f.check_declared_type();
    // the two representations must describe the same function
    detrng rng(0x9b1ecf00d5ull);
    for (int k = 0; k < 16; ++k) {
      cx z = rng.disc(1.0);
      cx a = f.eval_terms(z), b = f.eval_series(z);
      if (std::abs(a - b) > 1e-8 * std::max(1.0, std::abs(a)))
        throw error("invalid-representation",
                    "term and series representations disagree at " + detail::cx_str(z));
    }
    return f;
  }

  static EntireFn exponential(cx lambda, cx amplitude = 1.0) {
    return from_terms({{{amplitude}, lambda}});
  }

  static EntireFn polynomial(std::vector<cx> coeffs) {
    return from_terms({{std::move(coeffs), cx(0, 0)}});
  }

  cx eval(cx z) const { return has_terms_ ? eval_terms(z) : eval_series(z); }

  bool has_terms() const { return has_terms_; }
  bool has_series() const { return has_series_; }
  const std::vector<ExpPolyTerm>& terms() const {
    if (!has_terms_) throw error("invalid-representation", "no term representation");
    return terms_;
  }
  const std::vector<cx>& series() const {
    if (!has_series_) throw error("invalid-representation", "no series representation");
    return series_;
  }
  std::optional<double> declared_type() const { return declared_type_; }

  // Upper bound for the exponential type, preferring exact knowledge.
  double type_bound() const {
    if (declared_type_) return *declared_type_;
    if (has_terms_) return max_abs_lambda();
    if (series_.size() >= 9) return estimate_type(series_);
    return 0.0;
  }

  std::vector<cx> singular_points() const {
    std::vector<cx> out;
    if (has_terms_)
      for (const auto& t : terms_) out.push_back(t.lambda);
    return out;
  }

  EntireFn derivative() const {
    if (has_terms_) {
      std::vector<ExpPolyTerm> out;
      for (const auto& t : terms_) {
        // d/dz [p e^{lz}] = (p' + l p) e^{lz}
        std::vector<cx> q(t.coeffs.size() + 1, cx(0, 0));
        for (std::size_t d = 0; d < t.coeffs.size(); ++d) {
          q[d] += t.lambda * t.coeffs[d];
          if (d >= 1) q[d - 1] += (double)d * t.coeffs[d];
        }
        while (q.size() > 1 && std::abs(q.back()) == 0.0) q.pop_back();
        out.push_back({std::move(q), t.lambda});
      }
      return from_terms(std::move(out), declared_type_);
    }
    std::vector<cx> shifted;
    for (std::size_t n = 1; n < series_.size(); ++n) shifted.push_back((double)n * series_[n]);
    return from_series(std::move(shifted), declared_type_);
  }

  // Taylor coefficients a_0..a_N about 0.
  std::vector<cx> taylor(std::size_t N) const {
    std::vector<cx> a(N + 1, cx(0, 0));
    if (has_terms_) {
      for (const auto& t : terms_)
        for (std::size_t d = 0; d < t.coeffs.size(); ++d) {
          cx pw = 1.0;  // lambda^m / m!
          for (std::size_t m = 0; d + m <= N; ++m) {
            a[d + m] += t.coeffs[d] * pw;
            pw *= t.lambda / (double)(m + 1);
          }
        }
    } else {
      for (std::size_t n = 0; n <= N && n < series_.size(); ++n) a[n] = series_[n];
    }
    return a;
  }

  friend EntireFn operator+(const EntireFn& x, const EntireFn& y) {
    if (!x.has_terms_ || !y.has_terms_)
      throw error("invalid-representation", "sum needs term representations");
    std::vector<ExpPolyTerm> all = x.terms_;
    all.insert(all.end(), y.terms_.begin(), y.terms_.end());
    std::optional<double> dt;
    if (x.declared_type_ && y.declared_type_) dt = std::max(*x.declared_type_, *y.declared_type_);
    return from_terms(std::move(all), dt);
  }

  friend EntireFn operator*(cx scale, const EntireFn& x) {
    EntireFn f = x;
    for (auto& t : f.terms_)
      for (auto& c : t.coeffs) c *= scale;
    for (auto& c : f.series_) c *= scale;
    return f;
  }

 private:
  static std::vector<ExpPolyTerm> normalize_terms(std::vector<ExpPolyTerm> in) {
    std::vector<ExpPolyTerm> out;
    for (auto& t : in) {
      while (!t.coeffs.empty() && std::abs(t.coeffs.back()) == 0.0) t.coeffs.pop_back();
      if (t.coeffs.empty()) continue;
      bool merged = false;
      for (auto& o : out)
        if (std::abs(o.lambda - t.lambda) <= 1e-14 * std::max(1.0, std::abs(t.lambda))) {
          if (o.coeffs.size() < t.coeffs.size()) o.coeffs.resize(t.coeffs.size(), cx(0, 0));
          for (std::size_t d = 0; d < t.coeffs.size(); ++d) o.coeffs[d] += t.coeffs[d];
          merged = true;
          break;
        }
      if (!merged) out.push_back(std::move(t));
    }
    return out;
  }

  void check_declared_type() const {
    if (declared_type_ && has_terms_ && *declared_type_ < max_abs_lambda() - 1e-12)
      throw error("invalid-type", "declared type is below max |lambda_k|");
  }

  double max_abs_lambda() const {
    double m = 0.0;
    for (const auto& t : terms_) m = std::max(m, std::abs(t.lambda));
    return m;
  }

  cx eval_terms(cx z) const {
    cx total{};
    for (const auto& t : terms_) {
      cx p{};
      for (std::size_t d = t.coeffs.size(); d-- > 0;) p = p * z + t.coeffs[d];
      total += p * std::exp(t.lambda * z);
    }
    return total;
  }

  cx eval_series(cx z) const {
    cx p{};
    for (std::size_t n = series_.size(); n-- > 0;) p = p * z + series_[n];
    return p;
  }

  std::vector<ExpPolyTerm> terms_;
  std::vector<cx> series_;
  bool has_terms_ = false, has_series_ = false;
  std::optional<double> declared_type_;
};

struct BorelSingularity {
  cx location{};
  int order = 1;  // pole order when known, 0 for branch-type singularities
};

// Analytic continuation of a Borel transform outside its singular set,
// evaluable wherever the carrier function is.
class BorelFn {
 public:
  BorelFn(std::function<cx(cx)> eval, std::vector<BorelSingularity> singularities)
      : eval_(std::move(eval)), sing_(std::move(singularities)) {
    // finite off the singular set, decaying at infinity
    for (const auto& s : sing_) {
      cx probe = s.location + 1e-5 * (1.0 + std::abs(s.location)) * std::polar(1.0, 0.83);
      if (!is_finite(eval_(probe)))
        throw error("invalid-borel", "transform not finite near " + detail::cx_str(s.location));
    }
    for (double th : {0.3, 2.1, 4.0})
      if (!(std::abs(eval_(1e6 * std::polar(1.0, th))) <= 1e-3))
        throw error("invalid-borel", "transform does not vanish at infinity");
  }

  cx eval(cx z) const { return eval_(z); }
  const std::vector<BorelSingularity>& singularities() const { return sing_; }

 private:
  std::function<cx(cx)> eval_;
  std::vector<BorelSingularity> sing_;
};

// Exact Borel transform of an exponential polynomial:
// B(c z^d e^{lz})(s) = c d! / (s-l)^{d+1}.
inline BorelFn borel_exact(const EntireFn& phi) {
  auto terms = phi.terms();  // copy shared into the closure
  std::vector<BorelSingularity> sing;
  for (const auto& t : terms) sing.push_back({t.lambda, (int)t.coeffs.size()});
  auto eval = [terms](cx z) {
    cx total{};
    for (const auto& t : terms) {
      cx inv = 1.0 / (z - t.lambda), pw = inv;
      double fact = 1.0;
      for (std::size_t d = 0; d < t.coeffs.size(); ++d) {
        total += t.coeffs[d] * fact * pw;
        pw *= inv;
        fact *= (double)(d + 1);
      }
    }
    return total;
  };
  return BorelFn(std::move(eval), std::move(sing));
}

// Borel transform from truncated Taylor data: sum a_n n! / z^{n+1}, valid for
// |z| comfortably above the estimated type. Optionally reports a geometric
// tail bound.
inline cx borel_series(const std::vector<cx>& coeffs, cx z, double* tail_bound = nullptr) {
  double tau = estimate_type(coeffs);
  if (!(std::abs(z) > 1.1 * tau))
    throw error("outside-domain", "borel_series needs |z| > 1.1 x estimated type");
  cx m = 1.0 / z, total{};
  double last = 0.0;
  for (std::size_t n = 0; n < coeffs.size(); ++n) {
    cx term = coeffs[n] * m;
    total += term;
    if (std::abs(term) > 0.0) last = std::abs(term);
    m *= (double)(n + 1) / z;
  }
  if (tail_bound) {
    double q = std::min(0.95, 1.05 * tau / std::abs(z));
    *tail_bound = last * q / (1.0 - q);
  }
  return total;
}

// Polya inversion: phi(z) = (1/2pi i) oint e^{sz} B(s) ds over a closed
// contour winding once around every singularity of B.
inline cx polya_reconstruct(const BorelFn& b, const Contour& gamma, cx z,
                            const QuadratureConfig& cfg = {}) {
  if (!gamma.closed) throw error("invalid-geometry", "reconstruction needs a closed contour");
  auto nodes = contour_nodes(gamma, cfg.nodes_per_panel);
  for (const auto& s : b.singularities())
    for (cx n : nodes)
      if (std::abs(n - s.location) < 1e-6)
        throw error("singularity-on-path",
                    "contour passes through singularity " + detail::cx_str(s.location));
  for (const auto& s : b.singularities()) {
    double w = winding_number(gamma, s.location);
    if (std::abs(w - 1.0) > 0.1)
      throw error("enclosure", "contour does not wind once around " +
                                   detail::cx_str(s.location));
  }
  auto r = integrate([&](cx s) { return std::exp(s * z) * b.eval(s); }, gamma, cfg);
  return r.value / cx(0.0, 2 * pi);
}

// Measure supported on a contour, integrated against ds/(2 pi i).
struct ContourMeasure {
  Contour support;
  std::function<cx(cx)> density;

  double mass(const QuadratureConfig& cfg = {}) const {
    auto r = integrate(density, support, cfg);
    return r.l1_mass / (2 * pi);
  }

  double max_radius(int per_panel = 16) const {
    double m = 0.0;
    for (cx n : contour_nodes(support, per_panel)) m = std::max(m, std::abs(n));
    return m;
  }
};

inline cx p_transform(const ContourMeasure& mu, cx z, const QuadratureConfig& cfg = {}) {
  auto r = integrate([&](cx s) { return std::exp(s * z) * mu.density(s); }, mu.support, cfg);
  return r.value / cx(0.0, 2 * pi);
}

}  // namespace borelcalc
