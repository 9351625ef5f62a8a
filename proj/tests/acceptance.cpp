// End-to-end acceptance gate. Each numbered check prints a single PASS/FAIL
// line with the measured figure of merit and its budget; the process exits
// nonzero if any check fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <sstream>
#include <string>
#include <vector>

#include "borelcalc/borelcalc.hpp"
#include "reference_values.hpp"

using namespace borelcalc;

namespace {

int failures = 0;

class Timer {
  std::chrono::steady_clock::time_point start_ = std::chrono::steady_clock::now();

 public:
  double secs() const {
    return std::chrono::duration<double>(std::chrono::steady_clock::now() - start_).count();
  }
};

void report(int index, const std::string& name, bool pass, const std::string& detail,
            double secs) {
  std::printf("%s  %d. %s (%s; %.1fs)\n", pass ? "PASS" : "FAIL", index, name.c_str(),
              detail.c_str(), secs);
  std::fflush(stdout);
  if (!pass) ++failures;
}

std::string sci(double v) {
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.2e", v);
  return buf;
}

// 1. transform/reconstruction roundtrip over a random exp-poly catalog
void check_roundtrip() {
  Timer timer;
  detrng rng(0xacce97u);
  double worst = 0.0;
  for (int k = 0; k < 25; ++k) {
    int nterms = 1 + (int)(rng.next() % 3);
    std::vector<ExpPolyTerm> terms;
    double maxl = 0.0;
    for (int j = 0; j < nterms; ++j) {
      cx lambda = rng.disc(4.0);
      maxl = std::max(maxl, std::abs(lambda));
      int deg = (int)(rng.next() % 4);
      std::vector<cx> coeffs;
      for (int d = 0; d <= deg; ++d)
        coeffs.push_back(cx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
      if (std::abs(coeffs.back()) < 0.2) coeffs.back() += cx(0.5, 0.0);
      terms.push_back({std::move(coeffs), lambda});
    }
    EntireFn phi = EntireFn::from_terms(std::move(terms));
    BorelFn b = borel_exact(phi);
    Contour gamma = circle(cx{}, 1.25 * std::max(maxl, 0.4) + 0.3);

    double scale = 0.0, err = 0.0;
    for (double radius : {0.5, 1.3, 2.0})
      for (int a = 0; a < 4; ++a) {
        cx z = radius * std::polar(1.0, 2 * pi * a / 4.0 + 0.35);
        cx want = phi.eval(z);
        scale = std::max(scale, std::abs(want));
        err = std::max(err, std::abs(polya_reconstruct(b, gamma, z) - want));
      }
    worst = std::max(worst, err / std::max(scale, 1e-300));
  }
  double secs = timer.secs();
  report(1, "transform/reconstruction roundtrip, 25 functions",
         worst <= 1e-9 && secs < 10.0, "max rel err " + sci(worst) + " vs 1e-09", secs);
}

// 2. f(d/dt) e^{lt} = f(l) e^{lt} across symbol families
void check_eigen() {
  Timer timer;
  detrng rng(0x51e9e2u);
  auto zs2 = symbol_zeta_shifted(2.0);
  auto zs3 = symbol_zeta_shifted(3.0);
  auto zs5 = symbol_zeta_shifted(5.0);
  auto l4 = symbol_dirichlet_l(4, {1.0, 0.0, -1.0, 0.0});
  auto se = symbol_exp();
  double worst = 0.0;
  for (int k = 0; k < 50; ++k) {
    SymbolSpec scratch;
    const SymbolSpec* f = nullptr;
    cx lambda;
    switch (k % 4) {
      case 0:
        f = &se;
        lambda = rng.disc(3.0);
        break;
      case 1: {
        std::vector<cx> c;
        int deg = 1 + (int)(rng.next() % 4);
        for (int d = 0; d <= deg; ++d)
          c.push_back(cx(rng.uniform(-2.0, 2.0), rng.uniform(-2.0, 2.0)));
        if (std::abs(c.back()) < 0.2) c.back() += cx(0.5, 0.0);
        scratch = symbol_poly(std::move(c));
        f = &scratch;
        lambda = rng.disc(3.0);
        break;
      }
      case 2: {
        f = (k % 3 == 0) ? &zs2 : (k % 3 == 1) ? &zs3 : &zs5;
        do {
          lambda = rng.disc(2.0);
        } while (!f->omega.contains(lambda) || f->omega.excluded_distance(lambda) < 0.25 ||
                 std::abs(lambda - f->poles[0]) < 0.3 || std::abs(lambda - f->poles[1]) < 0.3);
        break;
      }
      default:
        f = &l4;
        lambda = cx(rng.uniform(1.4, 3.0), rng.uniform(-1.5, 1.5));
    }
    double t = rng.uniform(0.0, 1.5);
    cx want = apply_eigen(*f, lambda) * std::exp(lambda * t);
    cx got = apply(*f, EntireFn::exponential(lambda), cx(t, 0.0));
    worst = std::max(worst, std::abs(got - want) / std::max(1.0, std::abs(want)));
  }
  double secs = timer.secs();
  report(2, "eigenfunction identity, 50 random draws", worst <= 1e-9 && secs < 30.0,
         "max rel err " + sci(worst) + " vs 1e-09", secs);
}

// 3. contour application vs the truncated infinite-order series
void check_series_equivalence() {
  Timer timer;
  auto f5 = symbol_zeta_shifted(5.0);
  auto a = taylor_zeta_shifted(5.0, 31, 1.6);
  EntireFn phi = EntireFn::exponential(0.4);
  double worst = 0.0;
  for (double t : {0.0, 1.0, 2.0}) {
    cx via_series = apply_series(a, 1.6, phi, cx(t, 0.0)).value;
    cx via_contour = apply(f5, phi, cx(t, 0.0));
    worst = std::max(worst, std::abs(via_series - via_contour));
  }
  double secs = timer.secs();
  report(3, "series form agrees with the contour form", worst <= 1e-7 && secs < 10.0,
         "max diff " + sci(worst) + " vs 1e-07", secs);
}

// 4. contour-class dependence on a punctured domain, and the unbounded witness
void check_runge_witness() {
  Timer timer;
  SymbolSpec reciprocal = make_symbol({[](cx s) { return 1.0 / s; },
                                       DomainDescriptor::minus_point(cx{}),
                                       {cx{}},
                                       {},
                                       {},
                                       "reciprocal"});
  double lambda = 1.0;
  EntireFn phi = EntireFn::exponential(lambda);
  Contour both = circle(cx{}, 2.0);
  Contour just_lambda = circle(cx(1.0, 0.0), 0.5);
  double worst = 0.0;
  for (double t : {0.0, 0.7, 1.3}) {
    worst = std::max(worst, std::abs(apply(reciprocal, phi, cx(t, 0.0), both) -
                                     (std::exp(lambda * t) - 1.0) / lambda));
    worst = std::max(worst, std::abs(apply(reciprocal, phi, cx(t, 0.0), just_lambda) -
                                     std::exp(lambda * t) / lambda));
  }
  bool witness_ok = true;
  std::string wdetail;
  for (int n : {1, 10, 64}) {
    auto w = noncontinuity_witness(n);
    if (std::abs(w.output_magnitude - 2.0 * n) > 1e-6 * n) {
      witness_ok = false;
      wdetail = " witness n=" + std::to_string(n) + " gave " + sci(w.output_magnitude);
    }
  }
  double secs = timer.secs();
  report(4, "contour-class branches and growth witness",
         worst <= 1e-10 && witness_ok && secs < 30.0,
         "max branch err " + sci(worst) + " vs 1e-10" + wdetail, secs);
}

// Hardy's function is real on the critical line and changes sign at each zero;
// bisecting it localizes ordinates with none of the scanner's machinery.
double hardy_bisect(double lo, double hi) {
  auto hardy = [](double t) {
    double theta = std::imag(log_gamma(cx(0.25, t / 2.0))) - t / 2.0 * std::log(pi);
    return (std::exp(cx(0.0, theta)) * zeta(cx(0.5, t))).real();
  };
  double flo = hardy(lo);
  for (int k = 0; k < 80; ++k) {
    double mid = 0.5 * (lo + hi);
    double fm = hardy(mid);
    if ((flo < 0) == (fm < 0)) {
      lo = mid;
      flo = fm;
    } else {
      hi = mid;
    }
  }
  return 0.5 * (lo + hi);
}

// 5. scanned zeta ordinates vs independent localization, plus pullbacks
void check_zero_certification() {
  Timer timer;
  auto cat = build_zeta_catalog(10);
  double worst = 0.0;
  bool simple = true;
  for (int k = 0; k < 10; ++k) {
    const auto& rec = cat.nontrivial[k];
    double scanned = rec.location.imag();
    double localized = hardy_bisect(scanned - 0.2, scanned + 0.2);
    worst = std::max(worst, std::abs(scanned - localized));
    worst = std::max(worst, std::abs(scanned - refvals::zeta_zero_ordinates[k]));
    simple = simple && rec.multiplicity == 1;
  }

  double pull_worst = 0.0;
  std::size_t n2 = 0, n3 = 0;
  for (double h : {2.0, 3.0}) {
    auto recs = zeros_of_zeta_shifted(h, h == 2.0 ? 3.0 : 2.9, cat);
    (h == 2.0 ? n2 : n3) = recs.size();
    for (const auto& r : recs) {
      pull_worst = std::max(pull_worst, r.residual);
      // every pullback zero in these discs comes from a trivial zero -2n
      double w = (r.location * r.location).real() + h;
      pull_worst = std::max(pull_worst, std::abs(w - 2.0 * std::round(w / 2.0)));
    }
  }
  double secs = timer.secs();
  bool pass = worst <= 1e-6 && simple && pull_worst <= 1e-8 && n2 == 6 && n3 == 4 &&
              secs < 300.0;
  report(5, "zero certification against independent localization", pass,
         "max ordinate diff " + sci(worst) + " vs 1e-06, pullback residual " + sci(pull_worst) +
             " vs 1e-08, counts " + std::to_string(n2) + "/" + std::to_string(n3),
         secs);
}

// 6. the homogeneous basis is annihilated monomial by monomial
void check_annihilation() {
  Timer timer;
  auto grid = default_residual_grid();
  double worst = 0.0;
  int dim_poly = 0, dim_zeta = 0;

  auto f1 = symbol_poly({0.0, 0.0, -1.0, 1.0});  // s^2 (s - 1)
  auto recs1 = scan_zeros(f1, cx(-0.6, -0.5), cx(1.5, 0.5));
  auto basis1 = homogeneous_basis(f1, 1.5, recs1);
  for (const auto& [s_k, m_k] : basis1) {
    dim_poly += m_k;
    for (int j = 0; j < m_k; ++j) {
      std::vector<cx> coeffs(j + 1, cx{});
      coeffs[j] = 1.0;
      EntireFn mono = EntireFn::from_terms({{coeffs, s_k}});
      for (cx t : grid) worst = std::max(worst, std::abs(apply(f1, mono, t)));
    }
  }

  auto cat = build_zeta_catalog(1);
  auto f2 = symbol_zeta_shifted(3.0);
  auto recs2 = zeros_of_zeta_shifted(3.0, 2.5, cat);
  auto basis2 = homogeneous_basis(f2, 2.5, recs2);
  for (const auto& [s_k, m_k] : basis2) {
    dim_zeta += m_k;
    for (int j = 0; j < m_k; ++j) {
      std::vector<cx> coeffs(j + 1, cx{});
      coeffs[j] = 1.0;
      EntireFn mono = EntireFn::from_terms({{coeffs, s_k}});
      for (cx t : grid) worst = std::max(worst, std::abs(apply(f2, mono, t)));
    }
  }
  double secs = timer.secs();
  bool pass = worst <= 1e-8 && dim_poly == 3 && dim_zeta == 2;
  report(6, "homogeneous annihilation and dimension counts", pass,
         "max |image| " + sci(worst) + " vs 1e-08, dims " + std::to_string(dim_poly) + "+" +
             std::to_string(dim_zeta),
         secs);
}

// 7. equation residuals for assembled solutions, and superposition
void check_solver() {
  Timer timer;
  struct Pair {
    SymbolSpec f;
    EntireFn g;
  };
  std::vector<Pair> pairs;
  pairs.push_back({symbol_poly({-3.0, 1.0}), EntireFn::exponential(1.0)});
  pairs.push_back({symbol_poly({0.0, 1.0}), EntireFn::exponential(2.0)});
  pairs.push_back({symbol_poly({1.0, 0.0, 1.0}),
                   EntireFn::from_terms({{{1.0, 1.0}, cx(2.0, 0.0)}})});
  pairs.push_back({symbol_poly({2.0, -3.0, 1.0}), EntireFn::exponential(3.0)});
  pairs.push_back({symbol_poly({-1.0, 2.0, 0.0, 1.0}),
                   EntireFn::from_terms({{{1.0, 1.0}, cx{}}, {{1.0}, cx(-1.0, 0.0)}})});
  pairs.push_back({symbol_zeta_shifted(2.0), EntireFn::exponential(0.3)});
  pairs.push_back({symbol_zeta_shifted(3.0), EntireFn::exponential(0.5, 2.0)});
  pairs.push_back({symbol_zeta_shifted(5.0),
                   EntireFn::from_terms({{{1.0, 1.0}, cx(0.3, 0.0)}})});
  pairs.push_back({symbol_poly({0.0, 0.0, -1.0, 1.0}), EntireFn::exponential(2.0)});
  pairs.push_back({symbol_poly({1.0, 1.0}), EntireFn::polynomial({1.0, 0.0, 2.0})});

  double worst = 0.0;
  for (const auto& p : pairs) {
    SolutionBundle b = assemble(p.f, p.g, {}, 0.0);
    worst = std::max(worst, b.residual.max_residual);
  }

  // linearity: solving the sum matches the sum of solutions
  auto f = symbol_poly({1.0, 0.0, 1.0});
  EntireFn g1 = EntireFn::exponential(2.0);
  EntireFn g2 = EntireFn::from_terms({{{1.0, 1.0}, cx(2.0, 0.0)}});
  EntireFn g12 = EntireFn::from_terms({{{1.0}, cx(2.0, 0.0)}, {{1.0, 1.0}, cx(2.0, 0.0)}});
  SolutionBundle b1 = assemble(f, g1, {}, 0.0);
  SolutionBundle b2 = assemble(f, g2, {}, 0.0);
  SolutionBundle b12 = assemble(f, g12, {}, 0.0);
  double super = 0.0;
  for (double t : {0.0, 0.7, 1.4}) {
    cx lhs = eval_solution(b12, cx(t, 0.0));
    cx rhs = eval_solution(b1, cx(t, 0.0)) + eval_solution(b2, cx(t, 0.0));
    super = std::max(super, std::abs(lhs - rhs));
  }
  double secs = timer.secs();
  report(7, "solver residuals for 10 pairs and superposition",
         worst <= 1e-7 && super <= 1e-9,
         "max residual " + sci(worst) + " vs 1e-07, superposition " + sci(super) + " vs 1e-09",
         secs);
}

// 8. truncated zeta equation: residuals, geometric decay, recovery, angle freedom
void check_angular_limit() {
  Timer timer;
  auto one = make_source("one");
  double psi = 7 * pi / 8;
  std::vector<cx> grid = {cx(0.5, 0.0), cx(1.0, 0.0), cx(2.0, 0.0)};

  double max_residual = 0.0;
  std::vector<std::vector<cx>> values;
  for (double r : {10.0, 20.0, 40.0}) {
    auto pair = truncated_pair(one, 2.0, psi, 0.1, r);
    for (double res : truncated_residuals(pair, grid))
      max_residual = std::max(max_residual, res);
    std::vector<cx> vals;
    for (cx t : grid) vals.push_back(pair.phi_r(t));
    values.push_back(std::move(vals));
  }
  double gap1 = 0.0, gap2 = 0.0;
  for (std::size_t i = 0; i < grid.size(); ++i) {
    gap1 = std::max(gap1, std::abs(values[1][i] - values[0][i]));
    gap2 = std::max(gap2, std::abs(values[2][i] - values[1][i]));
  }
  double ratio = gap2 / gap1;

  double recovery = 0.0;
  for (cx t : grid)
    recovery = std::max(recovery, std::abs(g_r_eval(one, psi, 0.1, 80.0, t) - 1.0));

  auto fa = f_infinity(one, 2.0, 0.8 * pi, 0.1, cx(1.0, 0.0), {10.0, 20.0, 40.0}, 1e-7);
  auto fb = f_infinity(one, 2.0, 0.9 * pi, 0.1, cx(1.0, 0.0), {10.0, 20.0, 40.0}, 1e-7);
  double angle_dev = std::abs(fa.value - fb.value);

  double secs = timer.secs();
  bool pass = max_residual <= 1e-5 && ratio < 0.7 && recovery <= 0.01 && angle_dev <= 1e-6 &&
              secs < 600.0;
  report(8, "truncated zeta equation and angular limit", pass,
         "residual " + sci(max_residual) + " vs 1e-05, decay ratio " + sci(ratio) +
             " vs 0.7, recovery " + sci(recovery) + " vs 1e-02, angle dev " + sci(angle_dev) +
             " vs 1e-06",
         secs);
}

// 9. reruns of CLI commands are byte-identical
void check_determinism() {
  Timer timer;
  std::vector<std::vector<std::string>> invocations = {
      {"borel", "--fn", "pexp:2|0,1", "--s", "3,4"},
      {"apply", "--symbol", "zeta-shifted:h=2", "--fn", "exp:0.3", "--t", "0:1:0.5"},
      {"solve", "--symbol", "poly:-3,1", "--rhs", "exp:1", "--t", "0:1:0.5"},
      {"zeros", "--symbol", "poly:0,0,-1,1", "--radius", "1.5"},
      {"zeta-solve", "--h", "2", "--source", "one", "--r", "4,8", "--t", "0.5,1"},
      {"recover", "--source", "one", "--r", "4,8", "--t", "0.5,1", "--out", "csv"},
  };
  bool pass = true;
  std::string which;
  for (const auto& args : invocations) {
    std::ostringstream out1, err1, out2, err2;
    int c1 = cli::run(args, out1, err1);
    int c2 = cli::run(args, out2, err2);
    if (c1 != 0 || c2 != 0 || out1.str() != out2.str() || out1.str().empty()) {
      pass = false;
      which = " first divergence: " + args[0];
      break;
    }
  }
  double secs = timer.secs();
  report(9, "byte-identical reports on rerun", pass,
         std::to_string(invocations.size()) + " commands rerun" + which, secs);
}

}  // namespace

int main() {
  check_roundtrip();
  check_eigen();
  check_series_equivalence();
  check_runge_witness();
  check_zero_certification();
  check_annihilation();
  check_solver();
  check_angular_limit();
  check_determinism();
  if (failures) {
    std::printf("%d of 9 acceptance checks failed\n", failures);
    return 1;
  }
  std::printf("all 9 acceptance checks passed\n");
  return 0;
}
