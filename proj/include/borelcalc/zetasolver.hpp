#pragma once

#include <memory>
#include <string>
#include <utility>
#include <vector>

#include "borelcalc/solver.hpp"

namespace borelcalc {

// Angular-contour solver for zeta(d^2/dt^2 + h) phi = g with h > 1, for
// sources g on [0, inf) whose Laplace transform is known in closed form and
// has its first singularity at 0. The truncated source g_r and solution
// phi_r live on the finite vertex contour kappa_r; r -> infinity recovers
// the equation in the limit sense.

struct LaplaceSource {
  std::string name;
  std::function<double(double)> g;        // the source on [0, inf)
  std::function<cx(cx)> laplace;          // closed-form transform
  cx first_singularity{};                 // must be 0
  double max_angle = pi;                  // largest usable opening angle
  std::string notes;
};

inline LaplaceSource make_source(const std::string& name) {
  LaplaceSource src;
  src.name = name;
  auto parts = detail::split(name, ':');
  if (parts[0] == "one") {
    if (parts.size() != 1) throw error("usage", "source 'one' takes no parameter");
    src.g = [](double) { return 1.0; };
    src.laplace = [](cx s) { return 1.0 / s; };
    src.notes = "simple pole at 0";
  } else if (parts[0] == "power") {
    if (parts.size() != 2) throw error("usage", "source 'power' needs an exponent, e.g. power:0.5");
    double nu = detail::parse_double(parts[1]);
    if (!(nu >= 0.0)) throw error("usage", "power exponent must be >= 0");
    double amp = std::tgamma(nu + 1.0);
    src.g = [nu](double t) { return std::pow(t, nu); };
    src.laplace = [nu, amp](cx s) { return amp * std::pow(s, -(nu + 1.0)); };
    src.notes = "branch point at 0, principal cut along the negative reals";
  } else if (parts[0] == "expdecay") {
    if (parts.size() != 2) throw error("usage", "source 'expdecay' needs a rate, e.g. expdecay:1");
    double b = detail::parse_double(parts[1]);
    throw error("normalization", "source " + name + " has its first singularity at " +
                                     detail::num_str(-b) +
                                     ", not 0; translation of sources is not implemented");
  } else {
    throw error("usage", "unknown source '" + name + "'; available: one, power:<nu>, expdecay:<b>");
  }
  if (std::abs(src.first_singularity) > 0.0)
    throw error("normalization", "source must have its first singularity at 0");
  for (cx s : {cx(2.0, 0.0), cx(3.0, 0.0), 0.5 * std::polar(1.0, 0.8 * pi),
               4.0 * std::polar(1.0, -0.8 * pi)})
    if (!is_finite(src.laplace(s)))
      throw error("invalid-source", "transform of " + name + " not finite at " + detail::cx_str(s));
  return src;
}

struct ResidueTerm {
  cx tau;      // simple zero of zeta(s^2+h)
  cx c;        // canonical correction coefficient
  cx deriv;    // d/ds zeta(s^2+h) at tau
};

struct TruncatedPair {
  LaplaceSource source;
  double h = 2.0, psi = 7 * pi / 8, delta = 0.1, r = 10.0;
  bool delta_adjusted = false;
  Contour kappa;
  int n_r = -1;                            // zeros in the closed r-ball, once counted
  std::vector<ResidueTerm> residue_terms;  // filled when zeros are attached

  // P(mu_r): the truncated source
  cx g_r(cx z, const QuadratureConfig& cfg = {}) const {
    return quad([&](cx s) { return std::exp(s * z) * source.laplace(s); }, z, cfg, true);
  }

  // particular solution of the truncated equation
  cx phi_r(cx z, const QuadratureConfig& cfg = {}) const {
    double hh = h;
    return quad([&, hh](cx s) { return std::exp(s * z) * source.laplace(s) / zeta_shifted(s, hh); },
                z, cfg, true);
  }

  // K*mu_r: the Borel transform of g_r away from kappa_r
  cx borel_g(cx z, const QuadratureConfig& cfg = {}) const {
    return quad([&](cx s) { return source.laplace(s) / (z - s); }, z, cfg, false);
  }

 private:
  template <class F>
  cx quad(F&& f, cx z, const QuadratureConfig& cfg, bool sector_hint) const {
    try {
      return integrate(std::forward<F>(f), kappa, cfg).value / cx(0.0, 2 * pi);
    } catch (const error& e) {
      if (e.kind() != "no-convergence" || !sector_hint) throw;
      double up = (z * std::polar(1.0, psi)).real(), dn = (z * std::polar(1.0, -psi)).real();
      throw error("no-convergence",
                  std::string(e.what()) + "; Re(z e^{+i psi}) = " + detail::num_str(up) +
                      ", Re(z e^{-i psi}) = " + detail::num_str(dn) +
                      "; positive growth along a ray puts z outside the reliable sector");
    }
  }
};

inline TruncatedPair truncated_pair(const LaplaceSource& src, double h, double psi = 7 * pi / 8,
                                    double delta = 0.1, double r = 10.0) {
  if (!(h > 1.0))
    throw error("unsupported", "h <= 1 unsupported in the angular-contour solver");
  if (!(psi > 0.75 * pi) || !(psi <= src.max_angle))
    throw error("invalid-angle", "need 3 pi/4 < psi <= " + detail::num_str(src.max_angle) +
                                     " for source " + src.name);
  TruncatedPair pair;
  pair.source = src;
  pair.h = h;
  pair.psi = psi;
  pair.r = r;
  double q = std::sqrt(h - 1.0);
  pair.delta = delta;
  if (q - delta < 0.05) {
    // arc must clear the poles at +-i sqrt(h-1)
    pair.delta = q - 0.05;
    pair.delta_adjusted = true;
    if (!(pair.delta > 1e-3))
      throw error("geometry", "poles at +-i" + detail::num_str(q) +
                                  " leave no room for the vertex arc; h is too close to 1");
  }
  pair.kappa = angular_contour(cx{}, psi, pair.delta, r);
  double clear = std::numeric_limits<double>::infinity();
  for (cx n : contour_nodes(pair.kappa, 16))
    clear = std::min({clear, std::abs(n - cx(0, q)), std::abs(n - cx(0, -q))});
  if (!(clear >= 0.049))
    throw error("geometry", "contour passes within " + detail::num_str(clear) +
                                " of a pole of the symbol; adjust delta or psi");
  return pair;
}

inline cx g_r_eval(const LaplaceSource& src, double psi, double delta, double r, cx z,
                   const QuadratureConfig& cfg = {}) {
  if (!(psi > 0.75 * pi) || !(psi <= src.max_angle))
    throw error("invalid-angle", "need 3 pi/4 < psi <= " + detail::num_str(src.max_angle));
  TruncatedPair pair;
  pair.source = src;
  pair.psi = psi;
  pair.delta = delta;
  pair.r = r;
  pair.kappa = angular_contour(cx{}, psi, delta, r);
  return pair.g_r(z, cfg);
}

inline cx phi_r_particular(const LaplaceSource& src, double h, double psi, double delta, double r,
                           cx z, const QuadratureConfig& cfg = {}) {
  return truncated_pair(src, h, psi, delta, r).phi_r(z, cfg);
}

// Attaches the canonical residue corrections for the certified simple zeros
// of zeta(s^2+h) in the closed r-ball: c_j = K*mu_r(tau_j) / zeta_j with
// zeta_j the derivative of the shifted symbol at tau_j.
inline TruncatedPair attach_residues(TruncatedPair pair, const std::vector<ZeroRecord>& zeros,
                                     const QuadratureConfig& cfg = {}) {
  auto f = symbol_zeta_shifted(pair.h);
  auto basis = homogeneous_basis(f, pair.r + 1e-9, zeros);
  pair.n_r = (int)basis.size();
  pair.residue_terms.clear();
  for (const auto& [tau, m] : basis) {
    if (m != 1)
      throw error("multiplicity-unsupported",
                  "zero at " + detail::cx_str(tau) + " has multiplicity " + std::to_string(m) +
                      "; polynomial corrections for multiple zeros are not known");
    ResidueTerm term;
    term.tau = tau;
    term.deriv = detail::diff_step(f.evaluate, tau);
    term.c = pair.borel_g(tau, cfg) / term.deriv;
    pair.residue_terms.push_back(term);
  }
  return pair;
}

struct GeneralSolution {
  cx particular;
  std::vector<ResidueTerm> residue_terms;

  cx corrected(cx z) const {
    cx v = particular;
    for (const auto& t : residue_terms) v += t.c * std::exp(t.tau * z);
    return v;
  }
};

inline GeneralSolution phi_r_general(const LaplaceSource& src, double h, double psi, double delta,
                                     double r, cx z, const std::vector<ZeroRecord>& zeros,
                                     const QuadratureConfig& cfg = {}) {
  auto pair = attach_residues(truncated_pair(src, h, psi, delta, r), zeros, cfg);
  return GeneralSolution{pair.phi_r(z, cfg), std::move(pair.residue_terms)};
}

// Borel data of phi_r as a transform evaluable off kappa_r, for re-applying
// the symbol through the operator module. Overflowed zeta downstream of the
// reflection formula reads as an infinite denominator: the transform is 0.
inline BorelFn phi_r_borel(const TruncatedPair& pair, const QuadratureConfig& cfg = {}) {
  double h = pair.h;
  auto cache = std::make_shared<std::map<std::pair<double, double>, cx>>();
  auto eval = [pair, h, cfg, cache](cx z) {
    auto key = std::make_pair(z.real(), z.imag());
    if (auto it = cache->find(key); it != cache->end()) return it->second;
    cx num = pair.borel_g(z, cfg);
    cx den = zeta_shifted(z, h);
    cx v = is_finite(den) ? num / den : cx{};
    (*cache)[key] = v;
    return v;
  };
  // The singular support is all of kappa_r, but points on the path cannot be
  // probed (the transform is only quadrature-evaluable at a standoff). The
  // vertex stands in: it is interior to any contour that surrounds kappa_r,
  // and sits a full arc radius off the path.
  return BorelFn(std::move(eval), {{cx{}, 0}});
}

// Closed contour winding once around kappa_r and nothing else, clear of the
// symbol poles.
inline Contour phi_r_enclosure(const TruncatedPair& pair) {
  double q = std::sqrt(pair.h - 1.0);
  double eps = std::min(0.3, q - pair.delta - 0.05);
  if (!(eps > 0.01))
    throw error("geometry", "no room for an enclosing tube between kappa and the poles");
  return hankel_tube(cx{}, pair.psi, pair.delta, pair.r, eps);
}

// |zeta(d^2+h) phi_r - g_r| on a grid, through the operator module.
inline std::vector<double> truncated_residuals(const TruncatedPair& pair, const std::vector<cx>& ts,
                                               const QuadratureConfig& cfg = {}) {
  auto f = symbol_zeta_shifted(pair.h);
  BorelFn borel = phi_r_borel(pair, cfg);
  Contour tube = phi_r_enclosure(pair);
  std::vector<double> out;
  for (cx t : ts) out.push_back(std::abs(apply(f, borel, tube, t, cfg) - pair.g_r(t, cfg)));
  return out;
}

// Taylor coefficients of g_r from contour moments.
inline std::vector<cx> g_r_taylor(const TruncatedPair& pair, int n_max,
                                  const QuadratureConfig& cfg = {}) {
  std::vector<cx> coeffs;
  double fact = 1.0;
  for (int n = 0; n <= n_max; ++n) {
    if (n > 0) fact *= n;
    auto mom = integrate([&](cx s) { return std::pow(s, n) * pair.source.laplace(s); }, pair.kappa,
                         cfg);
    coeffs.push_back(mom.value / cx(0.0, 2 * pi) / fact);
  }
  return coeffs;
}

struct LimitReport {
  std::vector<double> radii;
  std::vector<cx> values;
  std::vector<double> gaps;   // |values[k] - values[k-1]|
  double rate = 0.0;          // last observed gap ratio
  bool converged = false;
  cx value{};
};

inline bool in_sector(double psi, cx z) {
  return std::abs(z) > 0.0 && std::abs(std::arg(z)) < psi - pi / 2;
}

inline LimitReport f_infinity(const LaplaceSource& src, double h, double psi, double delta, cx z,
                              const std::vector<double>& r_schedule, double tol,
                              const QuadratureConfig& cfg = {}) {
  if (!in_sector(psi, z))
    throw error("outside-domain", "z = " + detail::cx_str(z) +
                                      " lies outside the sector |arg z| < psi - pi/2");
  if (r_schedule.size() < 2) throw error("invalid-argument", "schedule needs at least two radii");
  for (std::size_t k = 1; k < r_schedule.size(); ++k)
    if (!(r_schedule[k] > r_schedule[k - 1]))
      throw error("invalid-argument", "schedule must increase strictly");

  LimitReport rep;
  for (double r : r_schedule) {
    cx v = truncated_pair(src, h, psi, delta, r).phi_r(z, cfg);
    rep.radii.push_back(r);
    rep.values.push_back(v);
    if (rep.values.size() > 1) {
      double gap = std::abs(v - rep.values[rep.values.size() - 2]);
      if (!rep.gaps.empty() && rep.gaps.back() > 0.0) rep.rate = gap / rep.gaps.back();
      rep.gaps.push_back(gap);
      if (gap < tol) {
        rep.converged = true;
        rep.value = v;
        return rep;
      }
    }
  }
  std::string gaps;
  for (double g : rep.gaps) gaps += (gaps.empty() ? "" : ", ") + detail::num_str(g);
  throw error("schedule-exhausted", "gaps [" + gaps + "] never fell below " +
                                        detail::num_str(tol) + "; extend the radius schedule");
}

struct RecoveryReport {
  std::vector<double> radii;
  std::vector<double> max_errors;
  double final_error = 0.0;
};

inline RecoveryReport check_source_recovery(const LaplaceSource& src, double psi, double delta,
                                            const std::vector<double>& t_grid,
                                            const std::vector<double>& r_schedule,
                                            const QuadratureConfig& cfg = {}) {
  for (double t : t_grid)
    if (!(t > 0.0)) throw error("invalid-argument", "recovery grid must lie in (0, inf)");
  RecoveryReport rep;
  for (double r : r_schedule) {
    double worst = 0.0;
    for (double t : t_grid)
      worst = std::max(worst, std::abs(g_r_eval(src, psi, delta, r, t, cfg) - src.g(t)));
    rep.radii.push_back(r);
    rep.max_errors.push_back(worst);
  }
  rep.final_error = rep.max_errors.back();
  return rep;
}

}  // namespace borelcalc
