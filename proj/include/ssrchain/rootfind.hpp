#pragma once

// Zeros of analytic functions in rectangles of the complex detuning plane:
// argument-principle counting, quadrisection, Newton polishing and
// continuation of a pole along a separation path.

#include <algorithm>
#include <array>
#include <cmath>
#include <complex>
#include <functional>
#include <numbers>
#include <optional>
#include <string>
#include <vector>

#include "ssrchain/charfn.hpp"
#include "ssrchain/core.hpp"

namespace ssrchain {

using AnalyticFn = std::function<cplx(cplx)>;

struct SearchWindow {
  double re_min = -1.0, re_max = 1.0;
  double im_min = -1.0, im_max = 0.0;

  double width() const { return re_max - re_min; }
  double height() const { return im_max - im_min; }
  double size() const { return std::max(width(), height()); }
  cplx center() const { return {0.5 * (re_min + re_max), 0.5 * (im_min + im_max)}; }

  bool contains(cplx z, double slack = 0.0) const {
    return z.real() >= re_min - slack && z.real() <= re_max + slack && z.imag() >= im_min - slack &&
           z.imag() <= im_max + slack;
  }

  void check() const {
    if (!(re_min < re_max) || !(im_min < im_max)) throw ContractViolation("search window has zero or negative area");
  }

  SearchWindow expanded(double fx, double fy) const {
    return {re_min - fx * width(), re_max + fx * width(), im_min - fy * height(), im_max + fy * height()};
  }

  /// Re D in [-1.5N, 1.5N], Im D in [-2.5N, 0].
  static SearchWindow default_for(int n_qubits) {
    const double n = static_cast<double>(n_qubits);
    return {-1.5 * n, 1.5 * n, -2.5 * n, 0.0};
  }
};

enum class PoleClass { zero_mode, markovian_like, exclusively_non_markovian, unclassified };

inline std::string_view to_string(PoleClass c) {
  switch (c) {
    case PoleClass::zero_mode: return "zero-mode";
    case PoleClass::markovian_like: return "markovian-like";
    case PoleClass::exclusively_non_markovian: return "exclusively-non-markovian";
    case PoleClass::unclassified: return "unclassified";
  }
  return "?";
}

struct Pole {
  cplx delta;
  cplx gamma;            ///< 2i * delta
  double residual = 0;   ///< |f| relative to the magnitude of its cancelling terms
  PoleClass classification = PoleClass::unclassified;
  int multiplicity = 1;

  static Pole at(cplx delta, double residual = 0.0, PoleClass cls = PoleClass::unclassified, int mult = 1) {
    return {delta, 2.0 * kI * delta, residual, cls, mult};
  }
};

/// Deterministic ordering: (|D|, Re D, Im D).
inline bool pole_order(const Pole& a, const Pole& b) {
  const double ma = std::abs(a.delta), mb = std::abs(b.delta);
  if (ma != mb) return ma < mb;
  if (a.delta.real() != b.delta.real()) return a.delta.real() < b.delta.real();
  return a.delta.imag() < b.delta.imag();
}

namespace detail {

inline double wrap_angle(double a) {
  constexpr double two_pi = 2.0 * std::numbers::pi;
  a = std::fmod(a + std::numbers::pi, two_pi);
  if (a < 0) a += two_pi;
  return a - std::numbers::pi;
}

class ArgumentTracker {
 public:
  explicit ArgumentTracker(const AnalyticFn& fn) : fn_(fn) {}

  /// Total change of arg f around the rectangle boundary divided by 2 pi, or
  /// nullopt when the boundary passes through (or too close to) a zero.
  std::optional<int> winding(const SearchWindow& w) {
    const std::array<cplx, 5> corners{cplx{w.re_min, w.im_min}, cplx{w.re_max, w.im_min}, cplx{w.re_max, w.im_max},
                                      cplx{w.re_min, w.im_max}, cplx{w.re_min, w.im_min}};
    double total = 0.0;
    for (int e = 0; e < 4; ++e) {
      if (!edge(corners[e], corners[e + 1], total)) return std::nullopt;
    }
    const double turns = total / (2.0 * std::numbers::pi);
    const double rounded = std::round(turns);
    if (std::abs(turns - rounded) > 0.05) return std::nullopt;
    return static_cast<int>(rounded);
  }

 private:
  static bool usable(cplx f) { return std::isfinite(f.real()) && std::isfinite(f.imag()) && f != cplx{0.0}; }

  bool edge(cplx a, cplx b, double& total) {
    constexpr int pieces = 32;
    cplx za = a;
    cplx fa = fn_(za);
    if (!usable(fa)) return false;
    for (int k = 1; k <= pieces; ++k) {
      const cplx zb = (k == pieces) ? b : a + (b - a) * (static_cast<double>(k) / pieces);
      const cplx fb = fn_(zb);
      if (!usable(fb)) return false;
      if (!segment(za, fa, zb, fb, 0, total)) return false;
      za = zb;
      fa = fb;
    }
    return true;
  }

  bool segment(cplx za, cplx fa, cplx zb, cplx fb, int depth, double& total) {
    const cplx zm = 0.5 * (za + zb);
    const cplx fm = fn_(zm);
    if (!usable(fm)) return false;
    const double d1 = wrap_angle(std::arg(fm) - std::arg(fa));
    const double d2 = wrap_angle(std::arg(fb) - std::arg(fm));
    constexpr double limit = std::numbers::pi / 4.0;
    if (std::abs(d1) < limit && std::abs(d2) < limit) {
      total += d1 + d2;
      return true;
    }
    if (depth >= kMaxDepth || std::abs(zb - za) < 1e-13 * (1.0 + std::abs(zm))) return false;
    return segment(za, fa, zm, fm, depth + 1, total) && segment(zm, fm, zb, fb, depth + 1, total);
  }

  static constexpr int kMaxDepth = 48;
  const AnalyticFn& fn_;
};

inline std::optional<int> try_count(const AnalyticFn& fn, const SearchWindow& w) {
  ArgumentTracker tracker(fn);
  return tracker.winding(w);
}

// Count with up to five outward jitters of the boundary; returns the window actually used.
inline std::pair<int, SearchWindow> count_with_jitter(const AnalyticFn& fn, const SearchWindow& window) {
  window.check();
  SearchWindow w = window;
  for (int attempt = 0; attempt <= 5; ++attempt) {
    if (auto c = try_count(fn, w)) return {*c, w};
    const double eps = 1e-7 * (attempt + 1);
    w = window.expanded(eps * std::numbers::sqrt2, eps * std::numbers::phi);
  }
  throw BoundaryDegeneracy("zero on or near the search-window boundary after 5 jitter retries");
}

}  // namespace detail

/// Number of zeros (with multiplicity) of fn inside the window.
inline int count_zeros(const AnalyticFn& fn, const SearchWindow& window) {
  return detail::count_with_jitter(fn, window).first;
}

struct Seed {
  cplx center;
  int multiplicity = 1;
  SearchWindow cell;
  bool cluster = false;  ///< several zeros inside a cell below 1e-12
};

namespace detail {

inline void quadrisect(const AnalyticFn& fn, const SearchWindow& cell, int count, double max_cell,
                       std::vector<Seed>& out) {
  if (count == 0) return;
  const double size = cell.size();
  if (count == 1 && size <= max_cell) {
    out.push_back({cell.center(), 1, cell, false});
    return;
  }
  if (count >= 2 && size < 1e-12 * std::max(1.0, std::abs(cell.center()))) {
    out.push_back({cell.center(), count, cell, true});
    return;
  }
  // Off-centre split points keep symmetry axes (e.g. Re D = 0) off the cut lines.
  static constexpr std::array<double, 6> offsets{0.0137, -0.0213, 0.0311, -0.0419, 0.0523, -0.0631};
  for (double off : offsets) {
    const double xs = cell.re_min + (0.5 + off) * cell.width();
    const double ys = cell.im_min + (0.5 - 0.7 * off) * cell.height();
    const std::array<SearchWindow, 4> kids{SearchWindow{cell.re_min, xs, cell.im_min, ys},
                                           SearchWindow{xs, cell.re_max, cell.im_min, ys},
                                           SearchWindow{cell.re_min, xs, ys, cell.im_max},
                                           SearchWindow{xs, cell.re_max, ys, cell.im_max}};
    std::array<int, 4> counts{};
    bool ok = true;
    int sum = 0;
    for (int k = 0; k < 4 && ok; ++k) {
      const auto c = try_count(fn, kids[k]);
      if (!c || *c < 0) {
        ok = false;
        break;
      }
      counts[k] = *c;
      sum += *c;
    }
    if (!ok || sum != count) continue;
    for (int k = 0; k < 4; ++k) quadrisect(fn, kids[k], counts[k], max_cell, out);
    return;
  }
  // Near-coincident zeros sit inside the round-off disc of f and cannot be
  // separated by any cut; a small enough cell is reported as a cluster.
  if (count >= 2 && size < 1e-4 * std::max(1.0, std::abs(cell.center()))) {
    out.push_back({cell.center(), count, cell, true});
    return;
  }
  throw BoundaryDegeneracy("could not split a cell without cutting through a zero");
}

}  // namespace detail

/// Recursive quadrisection until every cell holds at most one zero and is no
/// larger than max_cell. Multiplicities of the returned seeds sum to the
/// window count.
inline std::vector<Seed> localize_zeros(const AnalyticFn& fn, const SearchWindow& window, double max_cell) {
  if (!(max_cell > 0.0)) throw ContractViolation("localize_zeros: max_cell must be positive");
  const auto [count, used] = detail::count_with_jitter(fn, window);
  std::vector<Seed> seeds;
  detail::quadrisect(fn, used, count, max_cell, seeds);
  return seeds;
}

/// Newton iteration with a central-difference derivative, then a damped
/// Newton fallback. Converges when the step falls below tol * (1 + |z|).
inline cplx refine(const AnalyticFn& fn, cplx seed, double tol = 1e-13) {
  auto finite = [](cplx v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); };
  auto newton_step = [&](cplx z, cplx fz) -> std::optional<cplx> {
    const double h = 1e-7 * (std::abs(z) + 1.0);
    const cplx d = (fn(z + h) - fn(z - h)) / (2.0 * h);
    if (!finite(d) || d == cplx{0.0}) return std::nullopt;
    const cplx s = fz / d;
    if (!finite(s)) return std::nullopt;
    return s;
  };

  cplx z = seed;
  cplx fz = fn(z);
  if (!finite(fz)) throw RefinementFailure(seed, std::abs(fz));
  cplx best = z;
  double best_abs = std::abs(fz);

  for (int it = 0; it < 100; ++it) {
    if (fz == cplx{0.0}) return z;
    const auto s = newton_step(z, fz);
    if (!s) break;
    const cplx zn = z - *s;
    const cplx fn_ = fn(zn);
    if (!finite(fn_)) break;
    if (std::abs(*s) <= tol * (1.0 + std::abs(z))) return zn;
    // Round-off floor: tiny step that no longer reduces |f|.
    if (std::abs(fn_) >= std::abs(fz) && std::abs(*s) <= 1e-9 * (1.0 + std::abs(z)))
      return std::abs(fn_) < std::abs(fz) ? zn : z;
    z = zn;
    fz = fn_;
    if (std::abs(fz) < best_abs) {
      best = z;
      best_abs = std::abs(fz);
    }
  }

  // Damped fallback from the best iterate.
  z = best;
  fz = fn(z);
  for (int it = 0; it < 100; ++it) {
    if (fz == cplx{0.0}) return z;
    const auto s = newton_step(z, fz);
    if (!s) break;
    double lambda = 1.0;
    cplx zn = z - *s;
    cplx fn_ = fn(zn);
    while ((!finite(fn_) || std::abs(fn_) >= std::abs(fz)) && lambda > 1e-6) {
      lambda *= 0.5;
      zn = z - lambda * *s;
      fn_ = fn(zn);
    }
    if (lambda <= 1e-6) break;
    if (std::abs(lambda * *s) <= tol * (1.0 + std::abs(z))) return zn;
    z = zn;
    fz = fn_;
    if (std::abs(fz) < best_abs) {
      best = z;
      best_abs = std::abs(fz);
    }
  }
  throw RefinementFailure(best, best_abs);
}

/// Roots of sum c_k x^k (ascending coefficients). Exact zero low-order
/// coefficients yield exact roots at the origin; the rest use Aberth-Ehrlich.
inline std::vector<cplx> polynomial_roots(std::vector<cplx> coeffs) {
  while (!coeffs.empty() && coeffs.back() == cplx{0.0}) coeffs.pop_back();
  if (coeffs.size() < 2) throw ContractViolation("polynomial_roots: polynomial must have degree >= 1");
  std::vector<cplx> roots;
  std::size_t lead_zeros = 0;
  while (coeffs[lead_zeros] == cplx{0.0}) ++lead_zeros;
  roots.assign(lead_zeros, cplx{0.0});
  coeffs.erase(coeffs.begin(), coeffs.begin() + static_cast<std::ptrdiff_t>(lead_zeros));
  const std::size_t deg = coeffs.size() - 1;
  if (deg == 0) return roots;
  if (deg == 1) {
    roots.push_back(-coeffs[0] / coeffs[1]);
    return roots;
  }

  auto eval = [&](cplx x, cplx& dp) {
    cplx p = coeffs[deg];
    dp = 0.0;
    for (std::size_t k = deg; k-- > 0;) {
      dp = dp * x + p;
      p = p * x + coeffs[k];
    }
    return p;
  };

  double radius = 0.0;
  for (std::size_t k = 0; k < deg; ++k)
    radius = std::max(radius, std::pow(std::abs(coeffs[k] / coeffs[deg]), 1.0 / static_cast<double>(deg - k)));
  std::vector<cplx> z(deg);
  for (std::size_t k = 0; k < deg; ++k)
    z[k] = std::polar(radius, 2.0 * std::numbers::pi * (static_cast<double>(k) + 0.25) / static_cast<double>(deg));

  for (int it = 0; it < 1000; ++it) {
    double worst = 0.0;
    for (std::size_t k = 0; k < deg; ++k) {
      cplx dp;
      const cplx p = eval(z[k], dp);
      if (p == cplx{0.0}) continue;
      const cplx ratio = p / dp;
      cplx repulsion{0.0};
      for (std::size_t j = 0; j < deg; ++j)
        if (j != k) repulsion += 1.0 / (z[k] - z[j]);
      const cplx w = ratio / (1.0 - ratio * repulsion);
      z[k] -= w;
      worst = std::max(worst, std::abs(w) / (1.0 + std::abs(z[k])));
    }
    if (worst < 1e-15) break;
  }
  roots.insert(roots.end(), z.begin(), z.end());
  return roots;
}

struct ContinuationOptions {
  /// Stop early (returning the path so far) once this predicate holds.
  std::function<bool(cplx)> stop_when;
  double refine_tol = 1e-12;
};

namespace detail {

inline CharFn pole_function(const ChainParams& p) {
  return p.mode == Mode::sr_condition ? CharFn::deflated(p) : CharFn(p, 0);
}

// Under the superradiant condition zeros come in pairs D, -conj(D); the
// member with Im Gamma = 2 Re D >= 0 is the one that gets tracked and reported.
inline cplx canonical_member(cplx d, Mode mode) {
  if (mode == Mode::sr_condition && d.real() < 0.0) return -std::conj(d);
  return d;
}

}  // namespace detail

/// Tracks a pole along a separation path (first entry must be params.separation).
/// Steps are halved on failure down to 1e-6 of the segment length.
inline std::vector<Pole> continue_pole(const ChainParams& params, const Pole& pole, const std::vector<double>& l_path,
                                       const ContinuationOptions& opts = {}) {
  validate(params);
  if (l_path.empty()) throw ContractViolation("continue_pole: empty path");
  if (std::abs(l_path.front() - params.separation) > 1e-14 * std::max(1.0, params.separation))
    throw ContractViolation("continue_pole: path must start at params.separation");

  std::vector<Pole> out{pole};
  std::vector<std::pair<double, cplx>> partial{{l_path.front(), pole.delta}};
  cplx z = pole.delta;
  double l = l_path.front();
  std::optional<cplx> slope;  // dD/dL from the last accepted sub-step

  for (std::size_t i = 1; i < l_path.size(); ++i) {
    const double target = l_path[i];
    const double span = target - l;
    double h = span;
    const double min_step = 1e-6 * std::abs(span);
    while (l != target) {
      const double trial = (std::abs(target - l) <= std::abs(h)) ? target : l + h;
      const ChainParams pt = params.with_separation(trial);
      const CharFn fn = detail::pole_function(pt);
      const cplx predicted = slope ? z + *slope * (trial - l) : z;
      bool accepted = false;
      try {
        cplx zn = refine(std::cref(fn), predicted, opts.refine_tol);
        zn = detail::canonical_member(zn, params.mode);
        if (std::abs(zn - z) <= 0.2 * (std::abs(z) + 1e-3) && fn.evaluate(zn).relative() < 1e-8) {
          if (trial != l) slope = (zn - z) / (trial - l);
          z = zn;
          l = trial;
          accepted = true;
        }
      } catch (const RefinementFailure&) {
      }
      if (!accepted) {
        h *= 0.5;
        slope.reset();
        if (std::abs(h) < min_step)
          throw ContinuationBreakdown("continuation step underflow near L = " + std::to_string(l), partial);
      } else {
        h = std::copysign(std::min(std::abs(2.0 * h), std::abs(target - l)), span);
      }
    }
    const CharFn fn = detail::pole_function(params.with_separation(l));
    out.push_back(Pole::at(z, fn.evaluate(z).relative(), pole.classification, pole.multiplicity));
    partial.emplace_back(l, z);
    if (opts.stop_when && opts.stop_when(z)) break;
  }
  return out;
}

struct FindOptions {
  double max_cell = 0.0;        ///< 0 selects window size / 16
  bool classify = true;         ///< classify nonzero poles by continuation to L -> 0
  bool include_zero_modes = true;
  double refine_tol = 1e-13;
  double residual_tol = 1e-9;
};

struct PoleSet {
  std::vector<Pole> poles;
  std::vector<std::string> failures;
};

namespace detail {

/// Separations from L down to the Markovian end point used for classification.
inline std::vector<double> descent_path(const ChainParams& p, double l_end) {
  std::vector<double> path{p.separation};
  double l = p.separation;
  const double max_abs_step =
      p.mode == Mode::general ? std::numbers::pi / (16.0 * p.omega) : std::numeric_limits<double>::infinity();
  while (l > l_end) {
    const double step = std::min(l - l / 1.1, max_abs_step);
    l = std::max(l_end, l - step);
    path.push_back(l);
  }
  return path;
}

inline PoleClass classify_by_continuation(const ChainParams& p, const Pole& pole) {
  const double n = static_cast<double>(p.n_qubits);
  if (std::abs(pole.delta) < 1e-6) return PoleClass::zero_mode;
  // The mirror member of an sr-condition pair is the non-Markovian partner.
  if (p.mode == Mode::sr_condition && pole.delta.real() < -1e-9 * std::abs(pole.delta))
    return PoleClass::exclusively_non_markovian;
  const double l_end = std::min(p.separation, 0.01 / (n * n));
  if (p.separation <= l_end)
    return std::abs(pole.delta) <= n ? PoleClass::markovian_like : PoleClass::exclusively_non_markovian;
  auto on_axis = [](cplx d) { return std::abs(d.real()) <= 1e-6 * std::abs(d); };
  bool watch_fold = false;
  ContinuationOptions opts;
  opts.stop_when = [&](cplx d) { return std::abs(d) > 50.0 * n || (watch_fold && on_axis(d)); };
  try {
    ChainParams cur = p;
    Pole start = pole;
    for (int folds = 0;; ++folds) {
      watch_fold = p.mode == Mode::sr_condition && !on_axis(start.delta);
      const auto l_path = descent_path(cur, l_end);
      const auto path = continue_pole(cur, start, l_path, opts);
      const cplx z = path.back().delta;
      if (!watch_fold || !on_axis(z) || std::abs(z) > 50.0 * n || folds > 8)
        return std::abs(z) <= n ? PoleClass::markovian_like : PoleClass::exclusively_non_markovian;
      // A conjugate pair has reached the axis: past the fold it splits into
      // two real-Gamma poles and the one nearer the origin is followed.
      const ChainParams below = p.with_separation(l_path[path.size() - 1]);
      const CharFn fn = pole_function(below);
      const double r = 0.05 * std::abs(z);
      std::vector<cplx> real_roots;
      for (const Seed& s : localize_zeros(std::cref(fn), {-r, r, -1.05 * std::abs(z), 0.0}, r)) {
        const cplx zr = refine(std::cref(fn), s.center, 1e-13);
        if (on_axis(zr)) real_roots.push_back(zr);
      }
      if (real_roots.empty()) return PoleClass::unclassified;
      start = Pole::at(*std::min_element(real_roots.begin(), real_roots.end(),
                                         [](cplx a, cplx b) { return std::abs(a) < std::abs(b); }));
      const double l_below = below.separation;
      cur = below;
      if (l_below <= l_end)
        return std::abs(start.delta) <= n ? PoleClass::markovian_like : PoleClass::exclusively_non_markovian;
    }
  } catch (const Error&) {
    return PoleClass::unclassified;
  }
}

inline void dedupe(std::vector<Pole>& poles) {
  std::sort(poles.begin(), poles.end(), pole_order);
  std::vector<Pole> out;
  for (const auto& p : poles) {
    bool merged = false;
    for (auto& q : out) {
      if (std::abs(q.delta - p.delta) <= 1e-8 * (1.0 + std::abs(p.delta))) {
        merged = true;
        break;
      }
    }
    if (!merged) out.push_back(p);
  }
  poles = std::move(out);
}

}  // namespace detail

/// Collective poles of the chain inside the window, refined, deduplicated,
/// classified and sorted by |D|.
///
/// Under the superradiant condition the search runs on the deflated function
/// and the (N-1)-fold zero mode at D = 0 is reported as one pole with that
/// multiplicity. In Markovian mode the characteristic function is a
/// polynomial and all N roots are returned regardless of the window.
inline PoleSet find_collective_rates(const ChainParams& params, const SearchWindow& window,
                                     const FindOptions& opts = {}) {
  validate(params);
  window.check();
  PoleSet result;
  const int n = params.n_qubits;

  if (params.mode == Mode::markovian) {
    const auto coeffs = markovian_polynomial(params);
    for (cplx r : polynomial_roots(coeffs)) {
      double num = 0.0, den = 0.0;
      cplx acc{0.0};
      for (std::size_t k = coeffs.size(); k-- > 0;) acc = acc * r + coeffs[k];
      num = std::abs(acc);
      for (std::size_t k = 0; k < coeffs.size(); ++k) den += std::abs(coeffs[k]) * std::pow(std::abs(r), k);
      const PoleClass cls = std::abs(r) < 1e-6 ? PoleClass::zero_mode : PoleClass::markovian_like;
      result.poles.push_back(Pole::at(r, den > 0 ? num / den : num, cls));
    }
    std::sort(result.poles.begin(), result.poles.end(), pole_order);
    return result;
  }

  const CharFn fn = detail::pole_function(params);
  const AnalyticFn f = std::cref(fn);
  // Newton's basin shrinks like 1/(N L) once the propagation phase varies across a cell.
  double max_cell = opts.max_cell;
  if (!(max_cell > 0.0)) {
    max_cell = window.size() / 16.0;
    if (params.separation > 0.0) max_cell = std::min(max_cell, 0.5 / (n * params.separation));
  }

  std::vector<Pole> found;
  auto accept = [&](cplx z, int mult) {
    const double res = fn.evaluate(z).relative();
    if (res > opts.residual_tol) {
      result.failures.push_back("residual " + std::to_string(res) + " too large at (" + std::to_string(z.real()) +
                                ", " + std::to_string(z.imag()) + ")");
      return;
    }
    found.push_back(Pole::at(z, res, PoleClass::unclassified, mult));
  };

  // Next to a near-double zero the Newton step stalls on round-off before it
  // meets the step tolerance; the best iterate stands if its residual passes.
  auto solve = [&](cplx seed) {
    try {
      return refine(f, seed, opts.refine_tol);
    } catch (const RefinementFailure& e) {
      if (fn.evaluate(e.best_iterate()).relative() <= opts.residual_tol) return e.best_iterate();
      throw;
    }
  };

  std::vector<Seed> seeds = localize_zeros(f, window, max_cell);
  for (const Seed& s : seeds) {
    try {
      const cplx z = solve(s.center);
      if (s.cell.contains(z, 0.5 * s.cell.size()) || s.cluster) {
        accept(z, s.multiplicity);
        continue;
      }
    } catch (const RefinementFailure&) {
    }
    // Newton left its cell or diverged: resolve the cell more finely and retry once.
    try {
      int recovered = 0;
      for (const Seed& sub : localize_zeros(f, s.cell, s.cell.size() / 8.0)) {
        const cplx zs = solve(sub.center);
        if (sub.cell.contains(zs, sub.cell.size()) || sub.cluster) {
          accept(zs, sub.multiplicity);
          recovered += sub.multiplicity;
        }
      }
      if (recovered < s.multiplicity)
        result.failures.push_back("no convergent seed in the cell around (" + std::to_string(s.center.real()) + ", " +
                                  std::to_string(s.center.imag()) + ")");
    } catch (const RefinementFailure& e) {
      result.failures.push_back(std::string("refinement failure, residual ") + std::to_string(e.residual()));
    } catch (const BoundaryDegeneracy& e) {
      result.failures.push_back(e.what());
    }
  }
  detail::dedupe(found);

  if (opts.classify) {
    for (auto& p : found) p.classification = detail::classify_by_continuation(params, p);
  } else {
    for (auto& p : found)
      if (std::abs(p.delta) < 1e-6) p.classification = PoleClass::zero_mode;
  }
  if (params.mode == Mode::sr_condition && opts.include_zero_modes && n > 1)
    found.push_back(Pole::at(cplx{0.0}, 0.0, PoleClass::zero_mode, n - 1));

  std::sort(found.begin(), found.end(), pole_order);
  result.poles = std::move(found);
  return result;
}

}  // namespace ssrchain
