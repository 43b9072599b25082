#pragma once

// The ssrchain command line. Everything lives behind run() so tests can drive
// it with in-memory streams; main.cpp only forwards argv.

#include <CLI11.hpp>
#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <utility>
#include <variant>
#include <vector>

#include "ssrchain/ssrchain.hpp"

namespace ssrchain::cli {

inline constexpr int kExitOk = 0;
inline constexpr int kExitUsage = 2;
inline constexpr int kExitSolver = 3;

class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

inline std::string fmt(double v) {
  if (std::isnan(v)) return "nan";
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[40];
  std::snprintf(buf, sizeof buf, "%.12g", v);
  return buf;
}

using Cell = std::variant<double, long long, bool, std::string>;

inline std::string cell_text(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) return fmt(*d);
  if (auto i = std::get_if<long long>(&c)) return std::to_string(*i);
  if (auto b = std::get_if<bool>(&c)) return *b ? "true" : "false";
  return std::get<std::string>(c);
}

// 12 significant digits in JSON as well: round-trip through the text form.
inline nlohmann::ordered_json cell_json(const Cell& c) {
  if (auto d = std::get_if<double>(&c)) {
    if (!std::isfinite(*d)) return nullptr;
    return std::stod(fmt(*d));
  }
  if (auto i = std::get_if<long long>(&c)) return *i;
  if (auto b = std::get_if<bool>(&c)) return *b;
  return std::get<std::string>(c);
}

inline std::string csv_escape(const std::string& s) {
  if (s.find_first_of(",\"\n") == std::string::npos) return s;
  std::string out = "\"";
  for (char ch : s) {
    if (ch == '"') out += '"';
    out += ch;
  }
  return out + "\"";
}

/// Tabular result plus metadata; `object` replaces the table in JSON when set.
struct Report {
  std::vector<std::pair<std::string, std::string>> meta;
  std::vector<std::string> columns;
  std::vector<std::vector<Cell>> rows;
  std::optional<nlohmann::ordered_json> object;

  void add_meta(std::string key, std::string value) { meta.emplace_back(std::move(key), std::move(value)); }

  void write_csv(std::ostream& os) const {
    for (const auto& [k, v] : meta) os << "# " << k << ": " << v << '\n';
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
      for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << csv_escape(cell_text(row[i]));
      os << '\n';
    }
  }

  void write_json(std::ostream& os) const {
    nlohmann::ordered_json doc;
    nlohmann::ordered_json m = nlohmann::ordered_json::object();
    for (const auto& [k, v] : meta) m[k] = v;
    doc["meta"] = m;
    if (object) {
      doc["data"] = *object;
    } else {
      nlohmann::ordered_json data = nlohmann::ordered_json::array();
      for (const auto& row : rows) {
        nlohmann::ordered_json r = nlohmann::ordered_json::object();
        for (std::size_t i = 0; i < row.size(); ++i) r[columns[i]] = cell_json(row[i]);
        data.push_back(std::move(r));
      }
      doc["data"] = std::move(data);
    }
    os << doc.dump(2) << '\n';
  }
};

struct CommonOptions {
  std::string output;
  std::string format;  // empty: command default
};

struct ChainOptions {
  int n = 0;
  double sep = 0.0;
  std::string mode = "sr";
  double omega = 50.0;
  int sr_index = 1;

  ChainParams params() const {
    const auto m = parse_mode(mode);
    if (!m) throw UsageError("unknown mode '" + mode + "' (expected sr, general or markovian)");
    ChainParams p{n, omega, sep, sr_index, *m};
    try {
      validate(p);
    } catch (const ContractViolation& e) {
      throw UsageError(e.what());
    }
    return p;
  }

  void echo(Report& r) const {
    r.add_meta("n_qubits", std::to_string(n));
    r.add_meta("separation", fmt(sep));
    r.add_meta("mode", mode);
    r.add_meta("omega", fmt(omega));
    r.add_meta("sr_index", std::to_string(sr_index));
  }
};

inline void add_chain_flags(CLI::App* cmd, ChainOptions& c, bool need_sep) {
  cmd->add_option("--n", c.n, "number of qubits N")->required()->check(CLI::PositiveNumber);
  auto* sep = cmd->add_option("--sep", c.sep, "qubit separation L [1/gamma_0]");
  if (need_sep) sep->required();
  cmd->add_option("--mode", c.mode, "phase model: sr, general or markovian")->capture_default_str();
  cmd->add_option("--omega", c.omega, "qubit frequency Omega [gamma_0]")->capture_default_str();
  cmd->add_option("--sr-index", c.sr_index, "integer n in Omega L = n pi (sr mode)")->capture_default_str();
}

inline void add_common_flags(CLI::App* cmd, CommonOptions& o) {
  cmd->add_option("-o,--output", o.output, "output file (default: standard output)");
  cmd->add_option("--format", o.format, "csv or json")->check(CLI::IsMember({"csv", "json"}));
}

inline Report base_report(const std::string& command) {
  Report r;
  r.add_meta("tool", "ssrchain");
  r.add_meta("version", kVersion);
  r.add_meta("command", command);
  r.add_meta("units", "rates and detunings in gamma_0, lengths in 1/gamma_0, gamma = 2 i delta");
  return r;
}

inline void emit(const Report& r, const CommonOptions& o, const std::string& default_format, std::ostream& out) {
  const std::string format = o.format.empty() ? default_format : o.format;
  auto write = [&](std::ostream& os) {
    if (format == "json") r.write_json(os);
    else r.write_csv(os);
  };
  if (o.output.empty()) {
    write(out);
    return;
  }
  std::ofstream f(o.output);
  if (!f) throw UsageError("cannot open output file '" + o.output + "'");
  write(f);
  if (!f) throw UsageError("failed writing output file '" + o.output + "'");
}

// ---------------------------------------------------------------- poles

struct PolesOptions {
  ChainOptions chain;
  std::optional<double> re_min, re_max, im_min, im_max;
  bool no_classify = false;
};

inline int cmd_poles(const PolesOptions& o, const CommonOptions& common, std::ostream& out, std::ostream& err) {
  const ChainParams p = o.chain.params();
  if (auto w = validity_warning(p)) err << "warning: " << *w << '\n';
  SearchWindow w = SearchWindow::default_for(p.n_qubits);
  if (o.re_min) w.re_min = *o.re_min;
  if (o.re_max) w.re_max = *o.re_max;
  if (o.im_min) w.im_min = *o.im_min;
  if (o.im_max) w.im_max = *o.im_max;
  try {
    w.check();
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }
  FindOptions fo;
  fo.classify = !o.no_classify;
  const PoleSet set = find_collective_rates(p, w, fo);
  for (const auto& f : set.failures) err << "warning: " << f << '\n';
  if (set.poles.empty() && !set.failures.empty()) {
    err << "error: no pole could be refined in the window\n";
    return kExitSolver;
  }

  Report r = base_report("poles");
  o.chain.echo(r);
  r.add_meta("window", "[" + fmt(w.re_min) + ", " + fmt(w.re_max) + "] x [" + fmt(w.im_min) + ", " + fmt(w.im_max) + "]");
  r.add_meta("classify", fo.classify ? "true" : "false");
  r.columns = {"n_qubits", "separation", "mode",     "re_delta",  "im_delta",
               "re_gamma", "im_gamma",   "classification", "residual", "multiplicity"};
  for (const auto& pole : set.poles) {
    r.rows.push_back({static_cast<long long>(p.n_qubits), p.separation, std::string(to_string(p.mode)),
                      pole.delta.real(), pole.delta.imag(), pole.gamma.real(), pole.gamma.imag(),
                      std::string(to_string(pole.classification)), pole.residual,
                      static_cast<long long>(pole.multiplicity)});
  }
  emit(r, common, "csv", out);
  return kExitOk;
}

// ---------------------------------------------------------------- ssr / sweep

inline const std::vector<std::string>& ssr_columns() {
  static const std::vector<std::string> cols{"n_qubits", "l_critical", "re_gamma_ssr", "im_gamma_ssr",
                                             "coalescence", "residual", "evaluations"};
  return cols;
}

inline std::vector<Cell> ssr_row(const SSRResult& s) {
  return {static_cast<long long>(s.n_qubits), s.l_critical, s.gamma_ssr.real(), s.gamma_ssr.imag(),
          s.coalescence, s.residual, static_cast<long long>(s.evaluations)};
}

struct SsrOptions {
  int n = 0;
  std::vector<double> bracket;
  int sr_index = 1;
};

inline int cmd_ssr(const SsrOptions& o, const CommonOptions& common, std::ostream& out) {
  if (o.n < 2) throw UsageError("ssr requires --n >= 2 (a single emitter has no super-superradiant point)");
  std::optional<std::pair<double, double>> bracket;
  if (!o.bracket.empty()) bracket = std::pair{o.bracket[0], o.bracket[1]};
  const auto used = bracket.value_or(default_bracket(o.n));
  const SSRResult s = maximize_over_separation(o.n, bracket, o.sr_index);

  Report r = base_report("ssr");
  r.add_meta("n_qubits", std::to_string(o.n));
  r.add_meta("bracket", fmt(used.first) + " " + fmt(used.second));
  r.add_meta("sr_index", std::to_string(o.sr_index));
  r.columns = ssr_columns();
  r.rows.push_back(ssr_row(s));
  emit(r, common, "csv", out);
  return kExitOk;
}

struct SweepOptions {
  int n_min = 0;
  int n_max = 0;
  int n_step = 1;
  int jobs = 1;
};

inline int resolve_jobs(int flag_value) {
  if (const char* env = std::getenv("SSRCHAIN_JOBS"); env && *env) {
    char* end = nullptr;
    const long v = std::strtol(env, &end, 10);
    if (*end != '\0' || v < 1 || v > 1024) throw UsageError(std::string("SSRCHAIN_JOBS must be a positive integer, got '") + env + "'");
    return static_cast<int>(v);
  }
  return flag_value;
}

inline int cmd_sweep(const SweepOptions& o, const CommonOptions& common, std::ostream& out, std::ostream& err) {
  if (o.n_step < 1) throw UsageError("--n-step must be >= 1");
  if (o.n_min > o.n_max) throw UsageError("empty N range: --n-min " + std::to_string(o.n_min) + " > --n-max " + std::to_string(o.n_max));
  if (o.n_min < 2) throw UsageError("sweep requires --n-min >= 2");
  const int jobs = resolve_jobs(o.jobs);
  if (jobs < 1) throw UsageError("--jobs must be >= 1");
  std::vector<int> ns;
  for (int n = o.n_min; n <= o.n_max; n += o.n_step) ns.push_back(n);

  const auto entries = scaling_sweep(ns, jobs);
  Report r = base_report("sweep");
  r.add_meta("n_min", std::to_string(o.n_min));
  r.add_meta("n_max", std::to_string(o.n_max));
  r.add_meta("n_step", std::to_string(o.n_step));
  r.add_meta("jobs", std::to_string(jobs));
  r.add_meta("bracket", "default per N");
  r.columns = ssr_columns();
  r.columns.push_back("status");
  std::size_t ok = 0;
  for (const auto& e : entries) {
    if (e.result) {
      auto row = ssr_row(*e.result);
      row.push_back(std::string("ok"));
      r.rows.push_back(std::move(row));
      ++ok;
    } else {
      const double nan = std::numeric_limits<double>::quiet_NaN();
      r.rows.push_back({static_cast<long long>(e.n_qubits), nan, nan, nan, false, nan, 0LL, "error: " + e.error});
      err << "warning: N = " << e.n_qubits << " failed: " << e.error << '\n';
    }
  }
  emit(r, common, "csv", out);
  return 10 * ok >= 9 * entries.size() ? kExitOk : kExitSolver;
}

// ---------------------------------------------------------------- fit

inline std::vector<std::string> split_csv_line(const std::string& line) {
  std::vector<std::string> out;
  std::string cur;
  bool quoted = false;
  for (std::size_t i = 0; i < line.size(); ++i) {
    const char ch = line[i];
    if (quoted) {
      if (ch == '"' && i + 1 < line.size() && line[i + 1] == '"') {
        cur += '"';
        ++i;
      } else if (ch == '"') {
        quoted = false;
      } else {
        cur += ch;
      }
    } else if (ch == '"') {
      quoted = true;
    } else if (ch == ',') {
      out.push_back(cur);
      cur.clear();
    } else if (ch != '\r') {
      cur += ch;
    }
  }
  out.push_back(cur);
  return out;
}

/// Reads the rows with status ok (or no status column) from a sweep CSV.
inline std::vector<SSRResult> read_sweep_csv(std::istream& in) {
  std::vector<SSRResult> results;
  std::vector<std::string> header;
  int col_n = -1, col_l = -1, col_g = -1, col_gi = -1, col_status = -1;
  std::string line;
  for (int lineno = 1; std::getline(in, line); ++lineno) {
    if (line.empty() || line == "\r" || line[0] == '#') continue;
    const auto fields = split_csv_line(line);
    if (header.empty()) {
      header = fields;
      for (std::size_t i = 0; i < header.size(); ++i) {
        const auto& h = header[i];
        const int k = static_cast<int>(i);
        if (h == "n_qubits") col_n = k;
        else if (h == "l_critical") col_l = k;
        else if (h == "re_gamma_ssr") col_g = k;
        else if (h == "im_gamma_ssr") col_gi = k;
        else if (h == "status") col_status = k;
      }
      if (col_n < 0 || col_l < 0 || col_g < 0)
        throw UsageError("line " + std::to_string(lineno) + ": header lacks n_qubits, l_critical or re_gamma_ssr");
      continue;
    }
    if (fields.size() != header.size())
      throw UsageError("line " + std::to_string(lineno) + ": expected " + std::to_string(header.size()) +
                       " fields, found " + std::to_string(fields.size()));
    if (col_status >= 0 && fields[col_status] != "ok") continue;
    auto number = [&](int col) {
      const std::string& s = fields[col];
      std::size_t used = 0;
      double v = 0.0;
      try {
        v = std::stod(s, &used);
      } catch (const std::exception&) {
        used = 0;
      }
      if (s.empty() || used != s.size() || !std::isfinite(v))
        throw UsageError("line " + std::to_string(lineno) + ": '" + header[col] + "' is not a finite number: '" + s + "'");
      return v;
    };
    SSRResult s;
    const double n = number(col_n);
    if (n != std::floor(n) || n < 1)
      throw UsageError("line " + std::to_string(lineno) + ": n_qubits must be a positive integer");
    s.n_qubits = static_cast<int>(n);
    s.l_critical = number(col_l);
    s.gamma_ssr = {number(col_g), col_gi >= 0 ? number(col_gi) : 0.0};
    results.push_back(s);
  }
  if (header.empty()) throw UsageError("input has no header row");
  return results;
}

struct FitOptions {
  std::string input;
  int n_min_fit = 20;
};

inline int cmd_fit(const FitOptions& o, const CommonOptions& common, std::ostream& out) {
  std::ifstream f(o.input);
  if (!f) throw UsageError("cannot open input file '" + o.input + "'");
  const auto results = read_sweep_csv(f);
  ScalingFit fit;
  try {
    fit = fit_scaling(results, o.n_min_fit);
  } catch (const ContractViolation& e) {
    throw UsageError(e.what());
  }

  Report r = base_report("fit");
  r.add_meta("input", o.input);
  r.add_meta("n_min_fit", std::to_string(o.n_min_fit));
  r.add_meta("alpha", fmt(fit.alpha));
  r.add_meta("beta", fmt(fit.beta));
  r.add_meta("alpha_stderr", fmt(fit.alpha_stderr));
  r.add_meta("beta_stderr", fmt(fit.beta_stderr));
  r.columns = {"n_qubits", "re_gamma_ssr", "l_critical", "gamma_deviation", "lc_deviation", "fitted"};
  nlohmann::ordered_json points = nlohmann::ordered_json::array();
  for (std::size_t i = 0; i < results.size(); ++i) {
    const bool fitted = results[i].n_qubits >= o.n_min_fit;
    std::vector<Cell> row{static_cast<long long>(results[i].n_qubits), results[i].gamma_ssr.real(),
                          results[i].l_critical, fit.per_point_deviation[i], fit.lc_deviation[i], fitted};
    nlohmann::ordered_json pj = nlohmann::ordered_json::object();
    for (std::size_t k = 0; k < row.size(); ++k) pj[r.columns[k]] = cell_json(row[k]);
    points.push_back(std::move(pj));
    r.rows.push_back(std::move(row));
  }
  nlohmann::ordered_json obj;
  obj["alpha"] = cell_json(fit.alpha);
  obj["beta"] = cell_json(fit.beta);
  obj["alpha_stderr"] = cell_json(fit.alpha_stderr);
  obj["beta_stderr"] = cell_json(fit.beta_stderr);
  obj["n_min_fit"] = fit.n_min_fit;
  obj["points"] = std::move(points);
  r.object = std::move(obj);
  emit(r, common, "json", out);
  return kExitOk;
}

// ---------------------------------------------------------------- asym

struct AsymOptions {
  bool critical = false;
  bool contour = false;
  double beta_min = 0.1;
  double beta_max = 2.5;
  int steps = 200;
};

inline int cmd_asym(const AsymOptions& o, const CommonOptions& common, std::ostream& out) {
  if (o.critical == o.contour) throw UsageError("asym needs exactly one of --critical or --contour");
  Report r = base_report("asym");
  if (o.critical) {
    const CriticalPair cp = critical_pair();
    r.add_meta("mode", "critical");
    r.columns = {"alpha_c", "beta_c", "tau_c", "residual", "alpha_beta_product"};
    r.rows.push_back({cp.alpha_c, cp.beta_c, cp.tau_c, cp.residual, cp.alpha_c * cp.beta_c});
    nlohmann::ordered_json obj;
    for (std::size_t k = 0; k < r.columns.size(); ++k) obj[r.columns[k]] = cell_json(r.rows[0][k]);
    r.object = std::move(obj);
    emit(r, common, "json", out);
    return kExitOk;
  }
  if (o.steps < 2) throw UsageError("--steps must be >= 2");
  if (!(o.beta_min > 0.0) || o.beta_max < o.beta_min) throw UsageError("need 0 < --beta-min <= --beta-max");
  const auto pts = trace_contour({o.beta_min, o.beta_max}, o.steps);
  r.add_meta("mode", "contour");
  r.add_meta("beta_min", fmt(o.beta_min));
  r.add_meta("beta_max", fmt(o.beta_max));
  r.add_meta("steps", std::to_string(o.steps));
  r.columns = {"beta", "alpha", "branch", "g"};
  for (const auto& p : pts) r.rows.push_back({p.beta, p.alpha, std::string(to_string(p.branch)), g_eval(p.alpha, p.beta)});
  emit(r, common, "csv", out);
  return kExitOk;
}

// ---------------------------------------------------------------- fieldmap

struct FieldmapOptions {
  ChainOptions chain;
  std::vector<double> re_range;
  std::vector<double> im_range;
  int resolution = 200;
  bool deflated = false;
};

inline int cmd_fieldmap(const FieldmapOptions& o, const CommonOptions& common, std::ostream& out) {
  const ChainParams p = o.chain.params();
  if (o.resolution < 2 || o.resolution > 4096) throw UsageError("--resolution must lie in [2, 4096]");
  const double r0 = o.re_range[0], r1 = o.re_range[1], i0 = o.im_range[0], i1 = o.im_range[1];
  if (!(r1 > r0) || !(i1 > i0)) throw UsageError("field-map window has zero area; ranges must be increasing");
  if (o.deflated && p.mode != Mode::sr_condition) throw UsageError("--deflated requires --mode sr");
  const CharFn fn = o.deflated ? CharFn::deflated(p) : CharFn(p, 0);

  Report r = base_report("fieldmap");
  o.chain.echo(r);
  r.add_meta("re_range", fmt(r0) + " " + fmt(r1));
  r.add_meta("im_range", fmt(i0) + " " + fmt(i1));
  r.add_meta("resolution", std::to_string(o.resolution));
  r.add_meta("deflated", o.deflated ? "true" : "false");
  r.columns = {"re_delta", "im_delta", "log10_abs_f"};
  const int m = o.resolution;
  r.rows.reserve(static_cast<std::size_t>(m) * m);
  for (int j = 0; j < m; ++j) {
    const double im = i0 + (i1 - i0) * j / (m - 1);
    for (int i = 0; i < m; ++i) {
      const double re = r0 + (r1 - r0) * i / (m - 1);
      r.rows.push_back({re, im, std::log10(std::abs(fn(cplx{re, im})))});
    }
  }
  emit(r, common, "csv", out);
  return kExitOk;
}

// ---------------------------------------------------------------- entry point

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Collective decay rates of a qubit chain in a 1D waveguide", "ssrchain"};
  app.footer(
      "Units: gamma_0 = v_g = hbar = 1. Rates (re_gamma, im_gamma) and detunings (re_delta, im_delta)\n"
      "are in gamma_0, separations (sep, l_critical) in 1/gamma_0. gamma = 2 i delta.\n"
      "Exit codes: 0 success, 2 usage error, 3 solver failure. SSRCHAIN_JOBS overrides --jobs.");
  app.require_subcommand(1);
  app.set_version_flag("--version", std::string(kVersion));

  CommonOptions common;

  PolesOptions poles;
  auto* c_poles = app.add_subcommand("poles", "collective poles in a search window");
  add_chain_flags(c_poles, poles.chain, true);
  c_poles->add_option("--re-min", poles.re_min, "window: min Re delta [gamma_0]");
  c_poles->add_option("--re-max", poles.re_max, "window: max Re delta [gamma_0]");
  c_poles->add_option("--im-min", poles.im_min, "window: min Im delta [gamma_0]");
  c_poles->add_option("--im-max", poles.im_max, "window: max Im delta [gamma_0]");
  c_poles->add_flag("--no-classify", poles.no_classify, "skip classification by continuation");
  add_common_flags(c_poles, common);

  SsrOptions ssr;
  auto* c_ssr = app.add_subcommand("ssr", "maximize Re Gamma_u over L at fixed N");
  c_ssr->add_option("--n", ssr.n, "number of qubits N (>= 2)")->required();
  c_ssr->add_option("--bracket", ssr.bracket, "separation bracket LO HI [1/gamma_0]")->expected(2);
  c_ssr->add_option("--sr-index", ssr.sr_index, "integer n in Omega L = n pi")->capture_default_str();
  add_common_flags(c_ssr, common);

  SweepOptions sweep;
  auto* c_sweep = app.add_subcommand("sweep", "ssr for a range of N");
  c_sweep->add_option("--n-min", sweep.n_min, "smallest N")->required();
  c_sweep->add_option("--n-max", sweep.n_max, "largest N")->required();
  c_sweep->add_option("--n-step", sweep.n_step, "step in N")->capture_default_str();
  c_sweep->add_option("--jobs", sweep.jobs, "worker threads")->capture_default_str();
  add_common_flags(c_sweep, common);

  FitOptions fit;
  auto* c_fit = app.add_subcommand("fit", "fit Gamma_SSR = alpha N and L_c = beta / N^2 to a sweep CSV");
  c_fit->add_option("--input", fit.input, "sweep CSV")->required();
  c_fit->add_option("--n-min-fit", fit.n_min_fit, "smallest N entering the fit")->capture_default_str();
  add_common_flags(c_fit, common);

  AsymOptions asym;
  auto* c_asym = app.add_subcommand("asym", "large-N theory: critical pair or g = 0 contour");
  c_asym->add_flag("--critical", asym.critical, "solve for (alpha_c, beta_c)");
  c_asym->add_flag("--contour", asym.contour, "trace g(alpha, beta) = 0");
  c_asym->add_option("--beta-min", asym.beta_min, "contour: smallest beta")->capture_default_str();
  c_asym->add_option("--beta-max", asym.beta_max, "contour: largest beta")->capture_default_str();
  c_asym->add_option("--steps", asym.steps, "contour: number of beta values")->capture_default_str();
  add_common_flags(c_asym, common);

  FieldmapOptions fm;
  auto* c_fm = app.add_subcommand("fieldmap", "log10 |f| on a grid of complex detunings");
  add_chain_flags(c_fm, fm.chain, true);
  c_fm->add_option("--re-range", fm.re_range, "Re delta range LO HI [gamma_0]")->expected(2)->required();
  c_fm->add_option("--im-range", fm.im_range, "Im delta range LO HI [gamma_0]")->expected(2)->required();
  c_fm->add_option("--resolution", fm.resolution, "grid points per axis (<= 4096)")->capture_default_str();
  c_fm->add_flag("--deflated", fm.deflated, "use the origin-deflated function (sr mode)");
  add_common_flags(c_fm, common);

  std::vector<std::string> argv_store{"ssrchain"};
  argv_store.insert(argv_store.end(), args.begin(), args.end());
  std::vector<char*> argv;
  for (auto& s : argv_store) argv.push_back(s.data());

  try {
    app.parse(static_cast<int>(argv.size()), argv.data());
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForAllHelp& e) {
    return app.exit(e, out, err);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e, out, err);
  } catch (const CLI::ParseError& e) {
    app.exit(e, out, err);
    return kExitUsage;
  }

  try {
    if (c_poles->parsed()) return cmd_poles(poles, common, out, err);
    if (c_ssr->parsed()) return cmd_ssr(ssr, common, out);
    if (c_sweep->parsed()) return cmd_sweep(sweep, common, out, err);
    if (c_fit->parsed()) return cmd_fit(fit, common, out);
    if (c_asym->parsed()) return cmd_asym(asym, common, out);
    if (c_fm->parsed()) return cmd_fieldmap(fm, common, out);
  } catch (const UsageError& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const ContractViolation& e) {
    err << "error: " << e.what() << '\n';
    return kExitUsage;
  } catch (const Error& e) {
    err << "solver failure: " << e.what() << '\n';
    return kExitSolver;
  }
  return kExitUsage;
}

}  // namespace ssrchain::cli
