#pragma once

// The superradiant pole, its maximization over the qubit separation,
// N sweeps and the scaling-law fits Gamma_SSR = alpha N, L_c = beta / N^2.

#include <algorithm>
#include <atomic>
#include <cmath>
#include <complex>
#include <map>
#include <numbers>
#include <optional>
#include <string>
#include <thread>
#include <utility>
#include <vector>

#include "ssrchain/charfn.hpp"
#include "ssrchain/core.hpp"
#include "ssrchain/rootfind.hpp"

namespace ssrchain {

/// Nominal beta used to place default brackets, L ~ beta_hat / N^2.
inline constexpr double kBetaHat = 1.76;

namespace detail {

// Smallest-|D| nonzero pole; a tying mirror pair reports the Im Gamma >= 0 member.
inline std::optional<Pole> nearest_nonzero(std::vector<Pole> poles) {
  std::erase_if(poles, [](const Pole& p) { return std::abs(p.delta) < 1e-6; });
  if (poles.empty()) return std::nullopt;
  std::sort(poles.begin(), poles.end(), pole_order);
  Pole best = poles.front();
  for (std::size_t i = 1; i < poles.size(); ++i) {
    const cplx mirror = -std::conj(best.delta);
    if (std::abs(poles[i].delta - mirror) <= 1e-8 * (1.0 + std::abs(mirror)) && poles[i].delta.real() > best.delta.real())
      best = poles[i];
  }
  return best;
}

inline PoleSet sr_zeros(const ChainParams& p, const SearchWindow& w) {
  FindOptions o;
  o.classify = false;
  o.include_zero_modes = false;
  return find_collective_rates(p, w, o);
}

}  // namespace detail

/// Gamma_u: the nonzero pole of the deflated function closest to the origin.
/// A hint (the pole at a nearby separation) shrinks the search to the
/// half-box of radius 1.5|hint| about the origin.
inline Pole superradiant_pole(const ChainParams& params, std::optional<cplx> hint = std::nullopt) {
  validate(params);
  if (params.mode != Mode::sr_condition) throw ContractViolation("superradiant_pole requires sr-condition mode");
  if (hint && std::abs(*hint) > 1e-6) {
    const double rho = 1.5 * std::abs(*hint);
    if (auto p = detail::nearest_nonzero(detail::sr_zeros(params, {-rho, rho, -rho, 0.0}).poles)) {
      p->classification = PoleClass::markovian_like;
      return *p;
    }
  }
  if (auto p = detail::nearest_nonzero(detail::sr_zeros(params, SearchWindow::default_for(params.n_qubits)).poles)) {
    p->classification = PoleClass::markovian_like;
    return *p;
  }
  throw WindowExhausted("no nonzero pole in the default search window for N = " + std::to_string(params.n_qubits));
}

struct SSRResult {
  int n_qubits = 0;
  double l_critical = 0.0;
  cplx gamma_ssr;
  bool coalescence = false;
  int evaluations = 0;
  double residual = 0.0;
  double l_golden = 0.0;  ///< maximizer from the golden-section stage alone
};

/// Default maximization bracket for N qubits.
inline std::pair<double, double> default_bracket(int n_qubits) {
  if (n_qubits < 4) return {0.05, 2.0};
  const double n2 = static_cast<double>(n_qubits) * n_qubits;
  return {0.2 * kBetaHat / n2, 3.0 * kBetaHat / n2};
}

struct CoalescencePoint {
  double y;  ///< Gamma / 2 on the axis D = -i y
  double l;
  bool converged;
};

namespace detail {

// On D = -iy the deflated function is purely imaginary, so the pole pair
// merges where H = Im h and dH/dy both vanish.
struct AxisFunction {
  int n_qubits;
  int sr_index;

  // Returns (H, H_y, H_yy) with D-derivatives from a Cauchy trapezoid rule.
  std::array<double, 3> eval(double y, double l) const {
    const CharFn fn = CharFn::deflated(ChainParams::sr(n_qubits, l, sr_index));
    const cplx d = -kI * y;
    constexpr int m = 16;
    const double r = 1e-3 * (std::abs(y) + 1.0);
    cplx d1{0.0}, d2{0.0};
    for (int k = 0; k < m; ++k) {
      const cplx e = std::polar(1.0, 2.0 * std::numbers::pi * k / m);
      const cplx v = fn(d + r * e);
      d1 += v / e;
      d2 += v / (e * e);
    }
    d1 /= (m * r);
    d2 *= 2.0 / (m * r * r);
    const cplx h0 = fn(d);
    // d/dy = -i d/dD
    return {h0.imag(), (-kI * d1).imag(), (-d2).imag()};
  }
};

}  // namespace detail

/// Newton on (H, dH/dy) = 0 in (y, L): the fold where Gamma_u meets its
/// non-Markovian partner on the real-Gamma axis.
inline CoalescencePoint coalescence_solve(int n_qubits, double y0, double l0, int sr_index = 1) {
  const detail::AxisFunction axis{n_qubits, sr_index};
  double y = y0, l = l0;
  bool settled = false;
  for (int it = 0; it < 60; ++it) {
    const auto f = axis.eval(y, l);
    const double dl = 1e-6 * l;
    const auto fp = axis.eval(y, l + dl);
    const auto fm = axis.eval(y, l - dl);
    const double a11 = f[1], a12 = (fp[0] - fm[0]) / (2 * dl);
    const double a21 = f[2], a22 = (fp[1] - fm[1]) / (2 * dl);
    const double det = a11 * a22 - a12 * a21;
    if (det == 0.0 || !std::isfinite(det)) return {y, l, false};
    const double sy = (f[0] * a22 - a12 * f[1]) / det;
    const double sl = (a11 * f[1] - a21 * f[0]) / det;
    double damp = 1.0;
    while (l - damp * sl <= 0.0 && damp > 1e-6) damp *= 0.5;
    y -= damp * sy;
    l -= damp * sl;
    if (!std::isfinite(y) || !std::isfinite(l)) return {y0, l0, false};
    // H_y carries round-off of order sqrt(eps) relative near the fold, so
    // the iteration stalls at about 1e-9 in y; one more step past 1e-8 is enough.
    const bool small = std::abs(sy) <= 1e-8 * std::abs(y) && std::abs(sl) <= 1e-8 * std::abs(l);
    if (small && settled) return {y, l, true};
    settled = small;
  }
  return {y, l, false};
}

/// Gamma_SSR = max over L of Re Gamma_u(L) at fixed N.
///
/// Golden-section search with warm-started pole evaluations, followed by a
/// coalescence solve that pins the cusp where Gamma_u collides with its
/// non-Markovian partner.
inline SSRResult maximize_over_separation(int n_qubits, std::optional<std::pair<double, double>> bracket = std::nullopt,
                                          int sr_index = 1) {
  if (n_qubits < 2) throw ContractViolation("SSR maximization requires N >= 2");
  const auto [lo, hi] = bracket.value_or(default_bracket(n_qubits));
  if (!(lo > 0.0) || !(hi > lo)) throw ContractViolation("bracket must satisfy 0 < lo < hi");

  std::map<double, Pole> samples;
  auto objective = [&](double l) {
    std::optional<cplx> hint;
    if (!samples.empty()) {
      auto it = samples.lower_bound(l);
      if (it == samples.end()) --it;
      else if (it != samples.begin() && std::abs(std::prev(it)->first - l) < std::abs(it->first - l)) --it;
      hint = it->second.delta;
    }
    const Pole p = superradiant_pole(ChainParams::sr(n_qubits, l, sr_index), hint);
    samples[l] = p;
    return p.gamma.real();
  };

  const double width = hi - lo;
  const double invphi = 1.0 / std::numbers::phi;
  double a = lo, b = hi;
  double c = b - (b - a) * invphi, d = a + (b - a) * invphi;
  double fc = objective(c), fd = objective(d);
  while (b - a > 1e-10 * width) {
    if (fc > fd) {
      b = d;
      d = c;
      fd = fc;
      c = b - (b - a) * invphi;
      fc = objective(c);
    } else {
      a = c;
      c = d;
      fc = fd;
      d = a + (b - a) * invphi;
      fd = objective(d);
    }
  }

  // Unimodality of every value seen. Next to the cusp the two real poles are
  // within sqrt(eps) of each other and either may be returned, so samples
  // closer than 1e-4 of the bracket to the best one are not compared.
  auto best = samples.begin();
  for (auto it = samples.begin(); it != samples.end(); ++it)
    if (it->second.gamma.real() > best->second.gamma.real()) best = it;
  const double peak = best->second.gamma.real();
  const double slack = 1e-6 * std::abs(peak);
  const double guard = 1e-4 * width;
  double prev = -std::numeric_limits<double>::infinity();
  for (auto it = samples.begin(); it != best; ++it) {
    if (best->first - it->first < guard) continue;
    if (it->second.gamma.real() < prev - slack) throw BracketError("objective is not unimodal in the bracket; scan first");
    prev = it->second.gamma.real();
  }
  prev = std::numeric_limits<double>::infinity();
  for (auto it = std::next(best); it != samples.end(); ++it) {
    if (it->first - best->first < guard) continue;
    if (it->second.gamma.real() > prev + slack) throw BracketError("objective is not unimodal in the bracket; scan first");
    prev = it->second.gamma.real();
  }
  if (best->first - lo < 1e-6 * width || hi - best->first < 1e-6 * width)
    throw BracketError("maximum sits on the bracket edge; widen the bracket");

  SSRResult r;
  r.n_qubits = n_qubits;
  r.evaluations = static_cast<int>(samples.size());
  r.l_golden = best->first;
  r.l_critical = best->first;
  r.gamma_ssr = best->second.gamma;
  r.residual = best->second.residual;

  const auto co = coalescence_solve(n_qubits, 0.5 * peak, best->first, sr_index);
  if (co.converged && co.l > lo && co.l < hi && std::abs(2.0 * co.y - peak) <= 1e-3 * std::abs(peak) &&
      std::abs(co.l - best->first) <= 1e-2 * width) {
    r.coalescence = true;
    r.l_critical = co.l;
    r.gamma_ssr = cplx{2.0 * co.y, 0.0};
    r.residual = CharFn::deflated(ChainParams::sr(n_qubits, co.l, sr_index)).evaluate(-kI * co.y).relative();
  }
  return r;
}

/// The two smallest-|D| nonzero poles at each separation.
inline std::vector<std::pair<Pole, Pole>> degenerate_pair_probe(int n_qubits, const std::vector<double>& l_values,
                                                                std::optional<SearchWindow> window = std::nullopt) {
  const double n = static_cast<double>(n_qubits);
  const SearchWindow w = window.value_or(SearchWindow{-3.0 * n, 3.0 * n, -6.0 * n, 0.0});
  std::vector<std::pair<Pole, Pole>> out;
  for (double l : l_values) {
    std::vector<Pole> poles;
    for (const Pole& p : detail::sr_zeros(ChainParams::sr(n_qubits, l), w).poles)
      if (std::abs(p.delta) >= 1e-6) poles.insert(poles.end(), static_cast<std::size_t>(p.multiplicity), p);
    if (poles.size() < 2) throw WindowExhausted("fewer than two nonzero poles at L = " + std::to_string(l));
    std::sort(poles.begin(), poles.end(), pole_order);
    out.emplace_back(poles[0], poles[1]);
  }
  return out;
}

struct SweepEntry {
  int n_qubits = 0;
  std::optional<SSRResult> result;
  std::string error;
};

/// maximize_over_separation for every N, fanned out over `jobs` workers.
/// Each N uses its own N^-2 bracket, so the output does not depend on scheduling.
inline std::vector<SweepEntry> scaling_sweep(const std::vector<int>& n_list, int jobs = 1) {
  if (n_list.empty()) throw ContractViolation("scaling_sweep: empty N list");
  for (std::size_t i = 0; i < n_list.size(); ++i) {
    if (n_list[i] < 2) throw ContractViolation("scaling_sweep: N >= 2 required (N = 1 has no SSR)");
    if (i > 0 && n_list[i] <= n_list[i - 1]) throw ContractViolation("scaling_sweep: N list must be strictly ascending");
  }
  std::vector<SweepEntry> out(n_list.size());
  std::atomic<std::size_t> next{0};
  auto worker = [&] {
    for (std::size_t i = next++; i < n_list.size(); i = next++) {
      out[i].n_qubits = n_list[i];
      try {
        out[i].result = maximize_over_separation(n_list[i]);
      } catch (const Error& e) {
        out[i].error = e.what();
      }
    }
  };
  const int workers = std::clamp(jobs, 1, static_cast<int>(n_list.size()));
  std::vector<std::thread> pool;
  for (int k = 1; k < workers; ++k) pool.emplace_back(worker);
  worker();
  for (auto& t : pool) t.join();
  return out;
}

struct ScalingFit {
  double alpha = 0.0;
  double beta = 0.0;
  double alpha_stderr = 0.0;
  double beta_stderr = 0.0;
  int n_min_fit = 0;
  std::vector<int> n_values;                  ///< every input point, fitted or not
  std::vector<double> per_point_deviation;    ///< |alpha N - Gamma| / Gamma
  std::vector<double> lc_deviation;           ///< |beta N^-2 - L_c| / L_c
};

/// Least squares Re Gamma_SSR = alpha N (through the origin) and L_c = beta N^-2
/// over points with N >= n_min_fit.
inline ScalingFit fit_scaling(const std::vector<SSRResult>& results, int n_min_fit = 20) {
  double sxy_a = 0, sxx_a = 0, sxy_b = 0, sxx_b = 0;
  int m = 0;
  for (const auto& r : results) {
    if (r.n_qubits < n_min_fit) continue;
    const double n = r.n_qubits;
    const double x = 1.0 / (n * n);
    sxy_a += n * r.gamma_ssr.real();
    sxx_a += n * n;
    sxy_b += x * r.l_critical;
    sxx_b += x * x;
    ++m;
  }
  if (m < 3) throw ContractViolation("fit_scaling: need at least 3 points with N >= n_min_fit");

  ScalingFit fit;
  fit.n_min_fit = n_min_fit;
  fit.alpha = sxy_a / sxx_a;
  fit.beta = sxy_b / sxx_b;
  double ssa = 0, ssb = 0;
  for (const auto& r : results) {
    const double n = r.n_qubits;
    const double ga = fit.alpha * n;
    const double lb = fit.beta / (n * n);
    fit.n_values.push_back(r.n_qubits);
    fit.per_point_deviation.push_back(std::abs(ga - r.gamma_ssr.real()) / std::abs(r.gamma_ssr.real()));
    fit.lc_deviation.push_back(std::abs(lb - r.l_critical) / std::abs(r.l_critical));
    if (r.n_qubits >= n_min_fit) {
      ssa += (ga - r.gamma_ssr.real()) * (ga - r.gamma_ssr.real());
      ssb += (lb - r.l_critical) * (lb - r.l_critical);
    }
  }
  fit.alpha_stderr = std::sqrt(ssa / (m - 1) / sxx_a);
  fit.beta_stderr = std::sqrt(ssb / (m - 1) / sxx_b);
  return fit;
}

}  // namespace ssrchain
