#pragma once

// Command-line driver: flag parsing, JSON config merge, dispatch, and report
// emission. Exit codes: 0 success, 1 math or I/O failure (machine-readable
// error object on the error stream), 2 usage problems (usage text).

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdlib>
#include <fstream>
#include <map>
#include <optional>
#include <ostream>
#include <string>
#include <utility>
#include <vector>

#include <nlohmann/json.hpp>

#include "borelcalc/solver.hpp"
#include "borelcalc/zetasolver.hpp"

namespace borelcalc {
namespace cli {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// Flag registry

struct FlagSpec {
  const char* name;
  bool required = false;
  bool repeatable = false;
  const char* help = "";
};

struct CommandSpec {
  const char* name;
  const char* brief;
  std::vector<FlagSpec> flags;
};

inline const std::vector<CommandSpec>& command_table() {
  static const std::vector<CommandSpec> table = [] {
    std::vector<FlagSpec> common = {
        {"config", false, false, "JSON file with defaults; explicit flags win"},
        {"out", false, false, "-, json, csv, or a file path (default -)"},
        {"format", false, false, "json or csv; otherwise taken from the path suffix"},
    };
    std::vector<FlagSpec> quad = {
        {"nodes", false, false, "quadrature nodes per panel (default 32)"},
        {"rel-tol", false, false, "quadrature refinement tolerance (default 1e-10)"},
    };
    auto with = [&](std::vector<FlagSpec> own, bool integrates = false) {
      if (integrates) own.insert(own.end(), quad.begin(), quad.end());
      own.insert(own.end(), common.begin(), common.end());
      return own;
    };
    const char* fn_help = "exp:<l>[,<a>] | poly:<c0,c1,...> | pexp:<l>|<c0,...>; repeat to sum";
    const char* grid_help = "start:stop:step or comma list";
    return std::vector<CommandSpec>{
        {"borel",
         "evaluate the transform of an exponential-polynomial function",
         with({{"fn", true, true, fn_help},
               {"s", true, false, "evaluation points: real grid or complex comma list"}})},
        {"apply",
         "apply a symbol to a function of exponential type on a time grid",
         with({{"symbol", true, false, "exp | poly:... | zeta-shifted:h=H | dirichlet-l:..."},
               {"fn", true, true, fn_help},
               {"t", true, false, grid_help}},
              true)},
        {"solve",
         "solve f(d/dt) phi = g and report the residual on a grid",
         with({{"symbol", true, false, "symbol f"},
               {"rhs", true, true, "right-hand side g, same grammar as --fn"},
               {"t", true, false, grid_help},
               {"tau", false, false, "homogeneous basis from zeros with |s| < tau"},
               {"zeros", false, false, "zero records JSON (output of `zeros`)"},
               {"coeff", false, true, "homogeneous coefficients per zero, ascending (re,im) order"},
               {"catalog", false, false, "zeta zero catalog path (default $BORELCALC_CATALOG)"}},
              true)},
        {"zeros",
         "locate and certify zeros of a symbol",
         with({{"symbol", true, false, "symbol f"},
               {"radius", false, false, "search the closed disc of this radius"},
               {"box-lo", false, false, "lower-left corner a+bi of a search box"},
               {"box-hi", false, false, "upper-right corner of a search box"},
               {"catalog", false, false, "zeta zero catalog path (default $BORELCALC_CATALOG)"}})},
        {"zeta-solve",
         "truncated solutions of zeta(d^2/dt^2 + h) phi = g over a radius schedule",
         with({{"h", true, false, "shift, must exceed 1"},
               {"source", true, false, "one | power:<nu> | expdecay:<b>"},
               {"r", true, false, "truncation radii, strictly increasing comma list"},
               {"t", true, false, grid_help},
               {"psi", false, false, "contour angle, e.g. 0.875pi (default)"},
               {"delta", false, false, "vertex arc radius (default 0.1)"},
               {"tau", false, false, "attach residue corrections at zeros with |s| < tau"},
               {"catalog", false, false, "zeta zero catalog path (default $BORELCALC_CATALOG)"}},
              true)},
        {"recover",
         "check that truncated sources approach the source on a grid",
         with({{"source", true, false, "one | power:<nu> | expdecay:<b>"},
               {"r", true, false, "truncation radii, strictly increasing comma list"},
               {"t", true, false, "positive time grid"},
               {"psi", false, false, "contour angle (default 0.875pi)"},
               {"delta", false, false, "vertex arc radius (default 0.1)"}},
              true)},
        {"catalog",
         "build and persist the certified zeta zero catalog",
         with({{"n", true, false, "number of nontrivial zeros, 1..100"},
               {"catalog", false, false, "persist path (default $BORELCALC_CATALOG)"}})},
    };
  }();
  return table;
}

inline std::string usage_text(const CommandSpec* cmd) {
  std::string u = "usage: borelcalc <command> --flag value ...\n";
  if (cmd) {
    u += "\n  " + std::string(cmd->name) + ": " + cmd->brief + "\n";
    for (const auto& f : cmd->flags) {
      u += "    --" + std::string(f.name);
      u += f.required ? " (required)" : "";
      u += f.repeatable ? " (repeatable)" : "";
      u += "  " + std::string(f.help) + "\n";
    }
  } else {
    u += "\ncommands:\n";
    for (const auto& c : command_table())
      u += "  " + std::string(c.name) + "  " + c.brief + "\n";
    u += "\nrun `borelcalc <command>` with a missing flag for the full flag list\n";
  }
  return u;
}

// ---------------------------------------------------------------------------
// Invocation: merged flag map

struct Invocation {
  const CommandSpec* cmd = nullptr;
  std::map<std::string, std::vector<std::string>> kv;

  bool has(const std::string& k) const { return kv.count(k) > 0; }
  const std::string& one(const std::string& k) const { return kv.at(k).back(); }
  std::string one_or(const std::string& k, const std::string& dflt) const {
    auto it = kv.find(k);
    return it == kv.end() ? dflt : it->second.back();
  }
  const std::vector<std::string>& all(const std::string& k) const { return kv.at(k); }
};

namespace detail {

inline const FlagSpec* find_flag(const CommandSpec& cmd, const std::string& name) {
  for (const auto& f : cmd.flags)
    if (name == f.name) return &f;
  return nullptr;
}

inline std::string cfg_scalar(const json& v) {
  if (v.is_string()) return v.get<std::string>();
  return v.dump();
}

inline Invocation parse_invocation(const std::vector<std::string>& args,
                                   const CommandSpec*& cmd_out) {
  if (args.empty()) throw error("usage", "no command given");
  Invocation inv;
  for (const auto& c : command_table())
    if (args[0] == c.name) inv.cmd = &c;
  if (!inv.cmd) throw error("usage", "unknown command '" + args[0] + "'");
  cmd_out = inv.cmd;

  for (std::size_t i = 1; i < args.size(); ++i) {
    std::string tok = args[i];
    if (tok.rfind("--", 0) != 0)
      throw error("usage", "expected --flag, got '" + tok + "'");
    tok = tok.substr(2);
    std::string val;
    if (auto p = tok.find('='); p != std::string::npos) {
      val = tok.substr(p + 1);
      tok = tok.substr(0, p);
    } else {
      if (i + 1 >= args.size()) throw error("usage", "flag --" + tok + " wants a value");
      val = args[++i];
    }
    if (!find_flag(*inv.cmd, tok))
      throw error("usage", std::string(inv.cmd->name) + " does not take --" + tok);
    inv.kv[tok].push_back(val);
  }

  if (inv.has("config")) {
    std::ifstream in(inv.one("config"));
    if (!in) throw error("io", "cannot read config " + inv.one("config"));
    json j;
    try {
      in >> j;
    } catch (const std::exception& e) {
      throw error("usage", std::string("config parse failure: ") + e.what());
    }
    if (!j.is_object()) throw error("usage", "config must be a JSON object");
    for (const auto& [key, value] : j.items()) {
      if (!find_flag(*inv.cmd, key))
        throw error("usage", std::string(inv.cmd->name) + " does not take config key '" + key + "'");
      if (inv.has(key)) continue;  // explicit flags win
      if (value.is_array())
        for (const auto& v : value) inv.kv[key].push_back(cfg_scalar(v));
      else
        inv.kv[key].push_back(cfg_scalar(value));
    }
  }

  for (const auto& f : inv.cmd->flags)
    if (f.required && !inv.has(f.name))
      throw error("usage", std::string(inv.cmd->name) + ": missing required --" + f.name);
  return inv;
}

// ---------------------------------------------------------------------------
// Literal parsing beyond symbols.hpp

inline std::vector<double> parse_grid(const std::string& spec) {
  std::vector<double> g;
  if (spec.find(':') != std::string::npos) {
    auto p = borelcalc::detail::split(spec, ':');
    if (p.size() != 3) throw error("usage", "grid wants start:stop:step, got '" + spec + "'");
    double a = borelcalc::detail::parse_double(p[0]);
    double b = borelcalc::detail::parse_double(p[1]);
    double s = borelcalc::detail::parse_double(p[2]);
    if (!(s > 0.0)) throw error("usage", "grid step must be positive");
    if (b < a) throw error("usage", "grid stop precedes start");
    int n = (int)std::floor((b - a) / s + 1e-9);
    for (int k = 0; k <= n; ++k) g.push_back(a + k * s);
    return g;
  }
  for (const auto& tok : borelcalc::detail::split(spec, ','))
    g.push_back(borelcalc::detail::parse_double(tok));
  return g;
}

inline std::vector<cx> parse_points(const std::string& spec) {
  std::vector<cx> pts;
  if (spec.find(':') != std::string::npos) {
    for (double x : parse_grid(spec)) pts.push_back(cx(x, 0.0));
    return pts;
  }
  for (const auto& tok : borelcalc::detail::split(spec, ',')) pts.push_back(parse_complex(tok));
  return pts;
}

inline double parse_angle(const std::string& spec) {
  if (spec.size() >= 2 && spec.substr(spec.size() - 2) == "pi") {
    std::string head = spec.substr(0, spec.size() - 2);
    return (head.empty() ? 1.0 : borelcalc::detail::parse_double(head)) * pi;
  }
  return borelcalc::detail::parse_double(spec);
}

inline std::vector<double> parse_schedule(const std::string& spec) {
  auto r = parse_grid(spec);
  for (std::size_t k = 1; k < r.size(); ++k)
    if (!(r[k] > r[k - 1]))
      throw error("usage", "schedule must be strictly increasing, got '" + spec + "'");
  return r;
}

// --fn / --rhs grammar; atoms joined by repetition or by ';' inside one value
inline EntireFn parse_fn(const std::vector<std::string>& vals) {
  std::vector<ExpPolyTerm> terms;
  for (const auto& v : vals)
    for (const auto& atom : borelcalc::detail::split(v, ';')) {
      auto p = atom.find(':');
      std::string head = p == std::string::npos ? atom : atom.substr(0, p);
      std::string rest = p == std::string::npos ? "" : atom.substr(p + 1);
      if (head == "exp") {
        auto parts = borelcalc::detail::split(rest, ',');
        if (rest.empty() || parts.size() > 2)
          throw error("usage", "exp wants exp:<lambda>[,<amplitude>]");
        cx amp = parts.size() == 2 ? parse_complex(parts[1]) : cx(1.0, 0.0);
        terms.push_back({{amp}, parse_complex(parts[0])});
      } else if (head == "poly") {
        std::vector<cx> c;
        for (const auto& tok : borelcalc::detail::split(rest, ',')) c.push_back(parse_complex(tok));
        terms.push_back({std::move(c), cx{}});
      } else if (head == "pexp") {
        auto bar = rest.find('|');
        if (bar == std::string::npos)
          throw error("usage", "pexp wants pexp:<lambda>|<c0,c1,...>");
        cx lam = parse_complex(rest.substr(0, bar));
        std::vector<cx> c;
        for (const auto& tok : borelcalc::detail::split(rest.substr(bar + 1), ','))
          c.push_back(parse_complex(tok));
        terms.push_back({std::move(c), lam});
      } else {
        throw error("usage", "unknown function atom '" + atom +
                                 "' (exp:<l>[,<a>] | poly:<c0,...> | pexp:<l>|<c0,...>)");
      }
    }
  return EntireFn::from_terms(std::move(terms));
}

inline QuadratureConfig parse_quadrature(const Invocation& inv) {
  QuadratureConfig cfg;
  if (inv.has("nodes")) {
    double n = borelcalc::detail::parse_double(inv.one("nodes"));
    if (!(n >= 4.0 && n <= 4096.0)) throw error("usage", "--nodes wants 4..4096");
    cfg.nodes_per_panel = (int)n;
  }
  if (inv.has("rel-tol")) {
    double t = borelcalc::detail::parse_double(inv.one("rel-tol"));
    if (!(t > 0.0)) throw error("usage", "--rel-tol must be positive");
    cfg.refine_rel_tol = t;
  }
  return cfg;
}

// ---------------------------------------------------------------------------
// Report emission

inline std::string num_str(double v) {
  char buf[40];
  auto r = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, r.ptr);
}

struct Report {
  std::vector<std::string> columns;
  std::vector<json> rows;  // objects keyed exactly by `columns`
  json diagnostics = json::object();
};

inline void write_csv(const Report& rep, std::ostream& os) {
  for (std::size_t k = 0; k < rep.columns.size(); ++k)
    os << (k ? "," : "") << rep.columns[k];
  os << "\n";
  for (const auto& row : rep.rows) {
    for (std::size_t k = 0; k < rep.columns.size(); ++k) {
      if (k) os << ",";
      const json& cell = row.at(rep.columns[k]);
      if (cell.is_null()) continue;
      if (cell.is_string())
        os << cell.get<std::string>();
      else if (cell.is_number_integer())
        os << cell.get<long long>();
      else
        os << num_str(cell.get<double>());
    }
    os << "\n";
  }
}

inline json envelope(const Invocation& inv, const Report& rep) {
  json config = json::object();
  for (const auto& f : inv.cmd->flags) {
    if (!inv.has(f.name) || std::string(f.name) == "config") continue;
    if (f.repeatable) {
      json a = json::array();
      for (const auto& v : inv.all(f.name)) a.push_back(v);
      config[f.name] = a;
    } else {
      config[f.name] = inv.one(f.name);
    }
  }
  json results = json::array();
  for (const auto& row : rep.rows) results.push_back(row);
  return json{{"version", "1.0"},
              {"command", inv.cmd->name},
              {"config", config},
              {"results", results},
              {"diagnostics", rep.diagnostics}};
}

inline void emit_report(const Invocation& inv, const Report& rep, std::ostream& out) {
  std::string target = inv.one_or("out", "-");
  std::string format = inv.one_or("format", "");
  bool to_stream = target == "-" || target == "json" || target == "csv";
  if (format.empty()) {
    if (target == "csv")
      format = "csv";
    else if (target == "json" || target == "-")
      format = "json";
    else
      format = target.size() > 4 && target.substr(target.size() - 4) == ".csv" ? "csv" : "json";
  }
  if (format != "json" && format != "csv")
    throw error("usage", "format must be json or csv, got '" + format + "'");

  std::ofstream file;
  if (!to_stream) {
    file.open(target);
    if (!file) throw error("io", "cannot write report to " + target);
  }
  std::ostream& os = to_stream ? out : file;
  if (format == "csv")
    write_csv(rep, os);
  else
    os << envelope(inv, rep).dump(1) << "\n";
  if (!to_stream && !file) throw error("io", "write failure on " + target);
}

// ---------------------------------------------------------------------------
// Zero records and the catalog

inline json record_row(const ZeroRecord& r) {
  return json{{"re", r.location.real()},
              {"im", r.location.imag()},
              {"multiplicity", r.multiplicity},
              {"residual", r.residual},
              {"method", r.method == ZeroRecord::Method::pullback ? "pullback" : "scan"},
              {"deriv_re", r.derivative_at_zero.real()},
              {"deriv_im", r.derivative_at_zero.imag()}};
}

inline std::vector<ZeroRecord> load_records(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw error("io", "cannot read zero records " + path);
  json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw error("io", std::string("zero record parse failure: ") + e.what());
  }
  const json& rows = j.is_object() && j.contains("results") ? j.at("results") : j;
  if (!rows.is_array()) throw error("io", "zero records want an array or a `zeros` report");
  std::vector<ZeroRecord> out;
  for (const auto& row : rows) {
    ZeroRecord r;
    r.location = cx(row.at("re").get<double>(), row.at("im").get<double>());
    r.multiplicity = row.at("multiplicity").get<int>();
    r.residual = row.at("residual").get<double>();
    r.method = row.value("method", "scan") == std::string("pullback")
                   ? ZeroRecord::Method::pullback
                   : ZeroRecord::Method::scan;
    r.derivative_at_zero = cx(row.value("deriv_re", 0.0), row.value("deriv_im", 0.0));
    out.push_back(r);
  }
  return out;
}

// order by rounded coordinates so that 1e-16 noise in polished locations
// cannot flip the row order between runs
inline void sort_records(std::vector<ZeroRecord>& recs) {
  auto key = [](const ZeroRecord& r) {
    return std::make_pair(std::round(r.location.real() * 1e9),
                          std::round(r.location.imag() * 1e9));
  };
  std::sort(recs.begin(), recs.end(),
            [&](const ZeroRecord& a, const ZeroRecord& b) { return key(a) < key(b); });
}

inline std::string catalog_path(const Invocation& inv) {
  if (inv.has("catalog")) return inv.one("catalog");
  const char* env = std::getenv("BORELCALC_CATALOG");
  return env ? env : "";
}

// Riemann-von Mangoldt estimate of how many nontrivial zeros sit below T
inline int ordinate_count(double t_max) {
  if (t_max < 14.0) return 1;
  double n = t_max / (2 * pi) * std::log(t_max / (2 * pi * std::exp(1.0))) + 7.0 / 8.0;
  return (int)std::ceil(n) + 2;
}

// A pullback radius tau at shift h needs zeta ordinates up to t_max; reuse a
// persisted catalog when it is deep enough, otherwise build and persist.
inline ZetaZeroCatalog catalog_for(double h, double tau, const std::string& path) {
  double dh = h - 0.5;
  double need = tau * tau * tau * tau - dh * dh;
  double t_max = need > 0.0 ? std::sqrt(need) : 0.0;
  if (!path.empty()) {
    std::ifstream probe(path);
    if (probe) {
      ZetaZeroCatalog cat = load_zeta_catalog(path);
      if (cat.max_ordinate() >= t_max || need <= 0.0) return cat;
    }
  }
  int n = std::min(100, ordinate_count(t_max));
  return build_zeta_catalog(n, path);
}

inline std::optional<double> zeta_shift_of(const std::string& symbol_spec) {
  if (symbol_spec.rfind("zeta-shifted:h=", 0) != 0) return std::nullopt;
  return borelcalc::detail::parse_double(symbol_spec.substr(15));
}

// ---------------------------------------------------------------------------
// Command handlers

inline Report cmd_borel(const Invocation& inv) {
  EntireFn fn = parse_fn(inv.all("fn"));
  BorelFn b = borel_exact(fn);
  Report rep;
  rep.columns = {"s_re", "s_im", "value_re", "value_im", "abs_err"};
  for (cx s : parse_points(inv.one("s"))) {
    cx v = b.eval(s);
    if (!is_finite(v))
      throw error("pole", "transform singular at s = " + borelcalc::detail::cx_str(s));
    rep.rows.push_back(json{{"s_re", s.real()},
                            {"s_im", s.imag()},
                            {"value_re", v.real()},
                            {"value_im", v.imag()},
                            {"abs_err", 0.0}});
  }
  json sing = json::array();
  for (const auto& s : b.singularities())
    sing.push_back(json{{"re", s.location.real()}, {"im", s.location.imag()}, {"order", s.order}});
  rep.diagnostics["singularities"] = sing;
  return rep;
}

inline Report cmd_apply(const Invocation& inv) {
  SymbolSpec f = parse_symbol(inv.one("symbol"));
  EntireFn fn = parse_fn(inv.all("fn"));
  QuadratureConfig cfg = parse_quadrature(inv);
  QuadratureConfig check = cfg;
  check.nodes_per_panel += 16;
  AutoContourChoice choice = auto_contour(f, fn);
  Report rep;
  rep.columns = {"t", "value_re", "value_im", "abs_err"};
  for (double t : parse_grid(inv.one("t"))) {
    cx v = apply(f, fn, cx(t, 0.0), choice.contour, cfg);
    cx w = apply(f, fn, cx(t, 0.0), choice.contour, check);
    rep.rows.push_back(json{{"t", t},
                            {"value_re", v.real()},
                            {"value_im", v.imag()},
                            {"abs_err", std::abs(v - w)}});
  }
  rep.diagnostics["symbol"] = f.label;
  rep.diagnostics["contour"] = choice.strategy;
  rep.diagnostics["nodes_per_panel"] = cfg.nodes_per_panel;
  return rep;
}

inline Report cmd_zeros(const Invocation& inv) {
  std::string spec = inv.one("symbol");
  SymbolSpec f = parse_symbol(spec);
  std::vector<ZeroRecord> recs;
  Report rep;
  if (auto h = zeta_shift_of(spec)) {
    if (!inv.has("radius"))
      throw error("usage", "zeros of a shifted zeta symbol want --radius");
    double radius = borelcalc::detail::parse_double(inv.one("radius"));
    ZetaZeroCatalog cat = catalog_for(*h, radius, catalog_path(inv));
    recs = zeros_of_zeta_shifted(*h, radius, cat);
    rep.diagnostics["catalog_ordinates"] = (long long)cat.nontrivial.size();
  } else if (inv.has("radius")) {
    double radius = borelcalc::detail::parse_double(inv.one("radius"));
    double w = radius + 0.15;
    for (auto& r : scan_zeros(f, cx(-w, -w), cx(w, w)))
      if (std::abs(r.location) <= radius) recs.push_back(r);
  } else if (inv.has("box-lo") && inv.has("box-hi")) {
    recs = scan_zeros(f, parse_complex(inv.one("box-lo")), parse_complex(inv.one("box-hi")));
  } else {
    throw error("usage", "zeros wants --radius or both --box-lo and --box-hi");
  }
  sort_records(recs);
  rep.columns = {"re", "im", "multiplicity", "residual", "method", "deriv_re", "deriv_im"};
  for (const auto& r : recs) rep.rows.push_back(record_row(r));
  rep.diagnostics["symbol"] = f.label;
  rep.diagnostics["count"] = (long long)recs.size();
  return rep;
}

inline Report cmd_solve(const Invocation& inv) {
  std::string spec = inv.one("symbol");
  SymbolSpec f = parse_symbol(spec);
  EntireFn g = parse_fn(inv.all("rhs"));
  QuadratureConfig cfg = parse_quadrature(inv);

  std::vector<ZeroRecord> zeros;
  double tau = 0.0;
  if (inv.has("zeros")) {
    zeros = load_records(inv.one("zeros"));
    if (inv.has("tau")) {
      tau = borelcalc::detail::parse_double(inv.one("tau"));
    } else {
      for (const auto& r : zeros) tau = std::max(tau, std::abs(r.location) + 1e-9);
    }
  } else if (inv.has("tau")) {
    tau = borelcalc::detail::parse_double(inv.one("tau"));
    if (auto h = zeta_shift_of(spec)) {
      zeros = zeros_of_zeta_shifted(*h, tau, catalog_for(*h, tau, catalog_path(inv)));
    } else {
      double w = tau + 0.15;
      for (auto& r : scan_zeros(f, cx(-w, -w), cx(w, w)))
        if (std::abs(r.location) < tau) zeros.push_back(r);
    }
  }
  sort_records(zeros);

  std::vector<std::vector<cx>> coeffs;
  if (inv.has("coeff"))
    for (const auto& v : inv.all("coeff")) {
      std::vector<cx> c;
      for (const auto& tok : borelcalc::detail::split(v, ',')) c.push_back(parse_complex(tok));
      coeffs.push_back(std::move(c));
    }

  auto grid = parse_grid(inv.one("t"));
  std::vector<cx> cgrid;
  for (double t : grid) cgrid.push_back(cx(t, 0.0));

  SolutionBundle bundle = assemble(f, g, zeros, tau, coeffs, cgrid, cfg);
  Report rep;
  rep.columns = {"t", "phi_re", "phi_im", "residual"};
  for (std::size_t k = 0; k < grid.size(); ++k) {
    cx v = eval_solution(bundle, cgrid[k], cfg);
    rep.rows.push_back(json{{"t", grid[k]},
                            {"phi_re", v.real()},
                            {"phi_im", v.imag()},
                            {"residual", bundle.residual.residuals[k]}});
  }
  json basis = json::array();
  for (const auto& h : bundle.homog) {
    json coeff = json::array();
    for (cx c : h.p_k) coeff.push_back(json::array({c.real(), c.imag()}));
    basis.push_back(json{{"re", h.s_k.real()},
                         {"im", h.s_k.imag()},
                         {"multiplicity", h.m_k},
                         {"coefficients", coeff}});
  }
  rep.diagnostics["symbol"] = f.label;
  rep.diagnostics["basis"] = basis;
  rep.diagnostics["max_residual"] = bundle.residual.max_residual;
  rep.diagnostics["reconstruction_contour"] = bundle.reconstruction.label;
  return rep;
}

inline Report cmd_zeta_solve(const Invocation& inv) {
  double h = borelcalc::detail::parse_double(inv.one("h"));
  if (!(h > 1.0)) throw error("unsupported", "h <= 1 unsupported in zeta-solve");
  LaplaceSource src = make_source(inv.one("source"));
  double psi = parse_angle(inv.one_or("psi", "0.875pi"));
  double delta = borelcalc::detail::parse_double(inv.one_or("delta", "0.1"));
  auto schedule = parse_schedule(inv.one("r"));
  auto grid = parse_grid(inv.one("t"));
  QuadratureConfig cfg = parse_quadrature(inv);

  std::vector<ZeroRecord> zeros;
  if (inv.has("tau")) {
    double tau = borelcalc::detail::parse_double(inv.one("tau"));
    zeros = zeros_of_zeta_shifted(h, tau, catalog_for(h, tau, catalog_path(inv)));
    sort_records(zeros);
  }

  std::vector<cx> cgrid;
  for (double t : grid) cgrid.push_back(cx(t, 0.0));

  Report rep;
  rep.columns = {"r", "t", "phi_re", "phi_im", "residual", "gap"};
  json stages = json::array();
  std::vector<cx> prev;
  std::vector<std::vector<double>> gaps_by_step;
  for (double r : schedule) {
    TruncatedPair pair = truncated_pair(src, h, psi, delta, r);
    if (!zeros.empty()) pair = attach_residues(std::move(pair), zeros, cfg);
    auto residuals = truncated_residuals(pair, cgrid, cfg);
    std::vector<cx> vals;
    std::vector<double> gaps;
    for (std::size_t k = 0; k < cgrid.size(); ++k) {
      cx v = pair.phi_r(cgrid[k], cfg);
      vals.push_back(v);
      json row{{"r", r},
               {"t", grid[k]},
               {"phi_re", v.real()},
               {"phi_im", v.imag()},
               {"residual", residuals[k]}};
      if (prev.empty())
        row["gap"] = nullptr;
      else {
        double gp = std::abs(v - prev[k]);
        row["gap"] = gp;
        gaps.push_back(gp);
      }
      rep.rows.push_back(std::move(row));
    }
    if (!gaps.empty()) gaps_by_step.push_back(gaps);
    json stage{{"r", r},
               {"delta", pair.delta},
               {"delta_adjusted", pair.delta_adjusted},
               {"n_r", pair.n_r < 0 ? json() : json((long long)pair.n_r)}};
    json terms = json::array();
    for (const auto& term : pair.residue_terms)
      terms.push_back(json{{"tau_re", term.tau.real()},
                           {"tau_im", term.tau.imag()},
                           {"c_re", term.c.real()},
                           {"c_im", term.c.imag()}});
    stage["residue_terms"] = terms;
    stages.push_back(std::move(stage));
    prev = std::move(vals);
  }

  json ratios = json::array();
  bool geometric = gaps_by_step.size() >= 2;
  for (std::size_t k = 1; k < gaps_by_step.size(); ++k) {
    double worst = 0.0;
    for (std::size_t i = 0; i < grid.size(); ++i) {
      double a = gaps_by_step[k - 1][i], b = gaps_by_step[k][i];
      worst = std::max(worst, a > 0.0 ? b / a : 0.0);
    }
    ratios.push_back(worst);
    geometric = geometric && worst < 0.7;
  }
  rep.diagnostics["psi"] = psi;
  rep.diagnostics["source"] = src.name;
  rep.diagnostics["stages"] = stages;
  rep.diagnostics["decay_ratios"] = ratios;
  rep.diagnostics["geometric"] = gaps_by_step.size() >= 2 ? json(geometric) : json();
  return rep;
}

inline Report cmd_recover(const Invocation& inv) {
  LaplaceSource src = make_source(inv.one("source"));
  double psi = parse_angle(inv.one_or("psi", "0.875pi"));
  double delta = borelcalc::detail::parse_double(inv.one_or("delta", "0.1"));
  auto schedule = parse_schedule(inv.one("r"));
  auto grid = parse_grid(inv.one("t"));
  for (double t : grid)
    if (!(t > 0.0)) throw error("usage", "recovery grid must be positive");
  QuadratureConfig cfg = parse_quadrature(inv);

  Report rep;
  rep.columns = {"r", "t", "g_r_re", "g_r_im", "abs_err"};
  json maxima = json::array();
  double final_error = 0.0;
  for (double r : schedule) {
    double worst = 0.0;
    for (double t : grid) {
      cx v = g_r_eval(src, psi, delta, r, cx(t, 0.0), cfg);
      double err = std::abs(v - src.g(t));
      worst = std::max(worst, err);
      rep.rows.push_back(json{{"r", r},
                              {"t", t},
                              {"g_r_re", v.real()},
                              {"g_r_im", v.imag()},
                              {"abs_err", err}});
    }
    maxima.push_back(json{{"r", r}, {"max_abs_err", worst}});
    final_error = worst;
  }
  rep.diagnostics["source"] = src.name;
  rep.diagnostics["per_radius"] = maxima;
  rep.diagnostics["final_max_abs_err"] = final_error;
  return rep;
}

inline Report cmd_catalog(const Invocation& inv) {
  double n = borelcalc::detail::parse_double(inv.one("n"));
  if (!(n >= 1.0 && n <= 100.0)) throw error("usage", "--n wants 1..100");
  ZetaZeroCatalog cat = build_zeta_catalog((int)n, catalog_path(inv));
  Report rep;
  rep.columns = {"index", "re", "im", "multiplicity", "residual"};
  for (std::size_t k = 0; k < cat.nontrivial.size(); ++k) {
    const auto& r = cat.nontrivial[k];
    rep.rows.push_back(json{{"index", (long long)k + 1},
                            {"re", r.location.real()},
                            {"im", r.location.imag()},
                            {"multiplicity", r.multiplicity},
                            {"residual", r.residual}});
  }
  std::string path = catalog_path(inv);
  rep.diagnostics["persisted_to"] = path.empty() ? json() : json(path);
  return rep;
}

}  // namespace detail

// ---------------------------------------------------------------------------

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  const CommandSpec* cmd = nullptr;
  try {
    Invocation inv = detail::parse_invocation(args, cmd);
    detail::Report rep;
    std::string name = inv.cmd->name;
    if (name == "borel")
      rep = detail::cmd_borel(inv);
    else if (name == "apply")
      rep = detail::cmd_apply(inv);
    else if (name == "zeros")
      rep = detail::cmd_zeros(inv);
    else if (name == "solve")
      rep = detail::cmd_solve(inv);
    else if (name == "zeta-solve")
      rep = detail::cmd_zeta_solve(inv);
    else if (name == "recover")
      rep = detail::cmd_recover(inv);
    else
      rep = detail::cmd_catalog(inv);
    detail::emit_report(inv, rep, out);
    return 0;
  } catch (const error& e) {
    if (e.kind() == "usage") {
      err << "error: " << e.what() << "\n\n" << usage_text(cmd);
      return 2;
    }
    err << json{{"error", json{{"kind", e.kind()}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  } catch (const std::exception& e) {
    err << json{{"error", json{{"kind", "internal"}, {"message", e.what()}}}}.dump() << "\n";
    return 1;
  }
}

}  // namespace cli
}  // namespace borelcalc
