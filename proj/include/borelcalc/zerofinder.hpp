#pragma once

// Zero location and certification for symbols: argument-principle scans with
// Newton refinement, the persisted catalog of Riemann zeta zeros, and the
// pullback of catalogued zeros through s^2 + h.

#include <algorithm>
#include <fstream>
#include <string>
#include <vector>

#include "common.hpp"
#include "contour.hpp"
#include "symbols.hpp"

namespace borelcalc {

struct ZeroRecord {
  cx location{};
  int multiplicity = 1;
  double residual = 0.0;  // |f(location)|
  enum class Method { scan, pullback } method = Method::scan;
  cx derivative_at_zero{};  // central difference; meaningful for simple zeros
};

namespace detail {

inline cx diff_step(const std::function<cx(cx)>& f, cx s) {
  double e = 1e-6 * std::max(1.0, std::abs(s));
  return (f(s + e) - f(s - e)) / (2.0 * e);
}

// multiplicity-aware Newton: step m f/f', quadratic even at an m-fold zero
inline cx newton_polish(const std::function<cx(cx)>& f, cx s, int m) {
  for (int it = 0; it < 60; ++it) {
    cx fv = f(s);
    if (std::abs(fv) == 0.0) return s;
    cx dv = diff_step(f, s);
    if (!is_finite(dv) || std::abs(dv) == 0.0) return s;
    cx step = (double)m * fv / dv;
    s -= step;
    if (std::abs(step) < 1e-13 * std::max(1.0, std::abs(s))) break;
  }
  return s;
}

// count_zeros with boundary jitter: grow the box about its center until no
// zero sits on an edge
inline int counted_with_jitter(const std::function<cx(cx)>& f, cx& lo, cx& hi) {
  for (int attempt = 0;; ++attempt) {
    try {
      return count_zeros(f, rectangle(lo, hi));
    } catch (const error& e) {
      if (e.kind() != "zero-on-boundary" || attempt >= 5)
        throw error("scan-failure", "cell [" + cx_str(lo) + ", " + cx_str(hi) +
                                        "] kept a zero on its boundary: " + e.what());
      cx c = 0.5 * (lo + hi);
      double grow = 1.0 + 7.3e-4 * (double)(attempt + 1);
      lo = c + grow * (lo - c);
      hi = c + grow * (hi - c);
    }
  }
}

}  // namespace detail

// Recursive quadrisection over a closed box, Newton refinement per isolated
// cell. Multiple zeros are reported with the argument-principle count of the
// tightest isolating cell; simplicity is certified, never assumed.
inline std::vector<ZeroRecord> scan_zeros(const SymbolSpec& f, cx box_lo, cx box_hi,
                                          int max_depth = 40) {
  for (cx p : f.poles)
    if (p.real() >= box_lo.real() && p.real() <= box_hi.real() && p.imag() >= box_lo.imag() &&
        p.imag() <= box_hi.imag())
      throw error("invalid-argument", "pole " + detail::cx_str(p) + " inside the scan box");

  std::vector<ZeroRecord> found;
  struct Cell {
    cx lo, hi;
    int depth;
  };
  std::vector<Cell> stack{{box_lo, box_hi, max_depth}};
  auto split = [&](cx lo, cx hi, int depth) {
    cx c = 0.5 * (lo + hi);
    stack.push_back({lo, c, depth - 1});
    stack.push_back({cx(c.real(), lo.imag()), cx(hi.real(), c.imag()), depth - 1});
    stack.push_back({cx(lo.real(), c.imag()), cx(c.real(), hi.imag()), depth - 1});
    stack.push_back({c, hi, depth - 1});
  };
  while (!stack.empty()) {
    auto [lo, hi, depth] = stack.back();
    stack.pop_back();
    int count = detail::counted_with_jitter(f.evaluate, lo, hi);
    if (count == 0) continue;
    double side = std::max(hi.real() - lo.real(), hi.imag() - lo.imag());
    bool last_resort = depth == 0 || side < 1e-4;
    if (count > 1 && !last_resort) {
      split(lo, hi, depth);
      continue;
    }
    cx s = detail::newton_polish(f.evaluate, 0.5 * (lo + hi), count);
    double margin = 0.1 * side;
    bool inside = s.real() >= lo.real() - margin && s.real() <= hi.real() + margin &&
                  s.imag() >= lo.imag() - margin && s.imag() <= hi.imag() + margin;
    if (!inside) {
      // polishing wandered out of the cell; refine until the centroid is in
      // the basin, or give up on this cell (overlapping neighbours cover it)
      if (!last_resort) split(lo, hi, depth);
      continue;
    }
    ZeroRecord rec;
    rec.location = s;
    rec.multiplicity = count;
    rec.residual = std::abs(f.evaluate(s));
    rec.method = ZeroRecord::Method::scan;
    if (count == 1) rec.derivative_at_zero = detail::diff_step(f.evaluate, s);
    found.push_back(rec);
  }

  // jittered cells overlap a little; merge duplicate refinements of one zero
  std::sort(found.begin(), found.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    return a.location.real() != b.location.real() ? a.location.real() < b.location.real()
                                                  : a.location.imag() < b.location.imag();
  });
  std::vector<ZeroRecord> out;
  for (const auto& r : found) {
    bool dup = false;
    for (const auto& o : out)
      if (std::abs(r.location - o.location) < 1e-7 * std::max(1.0, std::abs(r.location)))
        dup = true;
    if (!dup) out.push_back(r);
  }
  return out;
}

// argument-principle count over |s| = radius, shrinking slightly if a zero
// sits on the circle
inline int count_in_disc(const SymbolSpec& f, double radius) {
  for (int attempt = 0;; ++attempt) {
    try {
      return count_zeros(f.evaluate, circle(cx(0, 0), radius));
    } catch (const error& e) {
      if (e.kind() != "zero-on-boundary" || attempt >= 5) throw;
      radius *= 1.0 - 3.7e-4 * (double)(attempt + 1);
    }
  }
}

// ---------------------------------------------------------------------------
// Zeta zero catalog

struct ZetaZeroCatalog {
  std::vector<ZeroRecord> nontrivial;  // upper-half ordinates, increasing
  double max_ordinate() const {
    return nontrivial.empty() ? 0.0 : nontrivial.back().location.imag();
  }
};

namespace detail {

// bumped when the zeta evaluator or certification parameters change
inline constexpr const char* catalog_version = "zeta-em12/newton-cd6/boxes-1e-3 v1";
inline constexpr double catalog_box_halfwidth = 1e-3;

inline SymbolSpec zeta_symbol() {
  return make_symbol({[](cx s) { return zeta(s); },
                      DomainDescriptor::minus_point(cx(1, 0)),
                      {cx(1, 0)},
                      {},
                      {},
                      "zeta"});
}

inline void certify_record(const std::function<cx(cx)>& f, const ZeroRecord& rec,
                           double residual_tol) {
  if (rec.residual > residual_tol)
    throw error("certification", "residual " + num_str(rec.residual) + " at " +
                                     cx_str(rec.location) + " exceeds tolerance");
  double hw = catalog_box_halfwidth * std::max(1.0, std::abs(rec.location));
  cx lo = rec.location - cx(hw, hw), hi = rec.location + cx(hw, hw);
  if (counted_with_jitter(f, lo, hi) != rec.multiplicity)
    throw error("certification",
                "box count does not match multiplicity at " + cx_str(rec.location));
}

}  // namespace detail

inline void save_zeta_catalog(const ZetaZeroCatalog& cat, const std::string& path) {
  nlohmann::ordered_json j;
  j["format"] = "zeta-zero-catalog";
  j["version"] = detail::catalog_version;
  j["zeros"] = nlohmann::ordered_json::array();
  for (const auto& r : cat.nontrivial) {
    j["zeros"].push_back({{"re", r.location.real()},
                          {"im", r.location.imag()},
                          {"multiplicity", r.multiplicity},
                          {"residual", r.residual},
                          {"derivative", {r.derivative_at_zero.real(), r.derivative_at_zero.imag()}}});
  }
  std::ofstream out(path);
  if (!out) throw error("io", "cannot write catalog to " + path);
  out << j.dump(1) << "\n";
}

// First N nontrivial zeros by upward scan on the critical strip; each entry
// certified by an isolating box count before it is accepted.
inline ZetaZeroCatalog build_zeta_catalog(int N, const std::string& persist_path = "") {
  if (N < 1 || N > 100) throw error("invalid-argument", "catalog size must lie in [1, 100]");
  auto f = detail::zeta_symbol();
  ZetaZeroCatalog cat;
  for (int k = 0; (int)cat.nontrivial.size() < N && k < 60; ++k) {
    double t0 = 10.0 + 4.0 * k;
    auto recs = scan_zeros(f, cx(0.01, t0), cx(0.99, t0 + 4.0));
    std::sort(recs.begin(), recs.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
      return a.location.imag() < b.location.imag();
    });
    for (auto& r : recs) {
      if ((int)cat.nontrivial.size() >= N) break;
      detail::certify_record(f.evaluate, r, 1e-10);
      cat.nontrivial.push_back(r);
    }
  }
  if ((int)cat.nontrivial.size() < N)
    throw error("scan-failure", "strip sweep exhausted before finding " + std::to_string(N));
  if (!persist_path.empty()) save_zeta_catalog(cat, persist_path);
  return cat;
}

// Load and re-certify. A version mismatch means the evaluator changed since
// the file was written; refuse rather than trust stale boxes.
inline ZetaZeroCatalog load_zeta_catalog(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("io", "cannot read catalog " + path);
  nlohmann::json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw error("io", std::string("catalog parse failure: ") + e.what());
  }
  if (j.value("format", "") != "zeta-zero-catalog" ||
      j.value("version", "") != detail::catalog_version)
    throw error("stale-catalog", "catalog version mismatch; rebuild with `catalog`");
  auto f = detail::zeta_symbol();
  ZetaZeroCatalog cat;
  for (const auto& row : j.at("zeros")) {
    ZeroRecord r;
    r.location = cx(row.at("re").get<double>(), row.at("im").get<double>());
    r.multiplicity = row.at("multiplicity").get<int>();
    r.residual = row.at("residual").get<double>();
    r.method = ZeroRecord::Method::scan;
    r.derivative_at_zero =
        cx(row.at("derivative")[0].get<double>(), row.at("derivative")[1].get<double>());
    detail::certify_record(f.evaluate, r, 1e-10);
    cat.nontrivial.push_back(r);
  }
  return cat;
}

// ---------------------------------------------------------------------------
// Pullback through s^2 + h

// All zeros of zeta(s^2+h) with |s| < tau: square-root branches of w - h over
// catalogued nontrivial zeros w (both conjugates) and trivial zeros -2n. Each
// pullback is re-certified against the shifted symbol, never trusted.
inline std::vector<ZeroRecord> zeros_of_zeta_shifted(double h, double tau,
                                                     const ZetaZeroCatalog& catalog) {
  if (!(tau > 0.0)) throw error("invalid-argument", "radius must be positive");
  double t2 = tau * tau;
  double dh = h - 0.5;
  double need = t2 * t2 - dh * dh;  // nontrivial w = 1/2 + it needed iff t^2 <= need
  if (need > 0.0) {
    double t_max = std::sqrt(need);
    if (catalog.max_ordinate() < t_max)
      throw error("incomplete-catalog",
                  "need zeta zeros up to ordinate " + detail::num_str(t_max) +
                      ", catalog stops at " + detail::num_str(catalog.max_ordinate()));
  }

  std::vector<cx> ws;
  for (const auto& r : catalog.nontrivial) {
    if (std::abs(r.location - cx(h, 0)) <= t2) ws.push_back(r.location);
    cx wc = std::conj(r.location);
    if (std::abs(wc - cx(h, 0)) <= t2) ws.push_back(wc);
  }
  int n_max = (int)std::floor((t2 + std::abs(h)) / 2.0) + 1;
  for (int n = 1; n <= n_max; ++n)
    if (std::abs(cx(-2.0 * n, 0) - cx(h, 0)) <= t2) ws.push_back(cx(-2.0 * n, 0));

  auto fz = [h](cx s) { return zeta_shifted(s, h); };
  std::vector<ZeroRecord> out;
  for (cx w : ws) {
    cx root = std::sqrt(w - h);
    for (cx s : {root, -root}) {
      if (!(std::abs(s) < tau)) continue;
      s = detail::newton_polish(fz, s, 1);
      ZeroRecord rec;
      rec.location = s;
      rec.method = ZeroRecord::Method::pullback;
      rec.residual = std::abs(fz(s));
      double hw = 1e-3 * std::max(1.0, std::abs(s));
      cx lo = s - cx(hw, hw), hi = s + cx(hw, hw);
      rec.multiplicity = detail::counted_with_jitter(fz, lo, hi);
      if (rec.multiplicity < 1)
        throw error("certification", "pullback lost the zero at " + detail::cx_str(s));
      if (rec.residual > 1e-8)
        throw error("certification", "pullback residual too large at " + detail::cx_str(s));
      if (rec.multiplicity == 1) rec.derivative_at_zero = detail::diff_step(fz, s);
      out.push_back(rec);
      if (std::abs(root) < 1e-12) break;  // both branches coincide at s = 0
    }
  }
  std::sort(out.begin(), out.end(), [](const ZeroRecord& a, const ZeroRecord& b) {
    return a.location.real() != b.location.real() ? a.location.real() < b.location.real()
                                                  : a.location.imag() < b.location.imag();
  });
  return out;
}

}  // namespace borelcalc
