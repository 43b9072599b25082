#pragma once

// Large-N theory. With Gamma = alpha N and L = beta / N^2 the pole system
// reduces, to leading order, to
//
//   g(alpha, beta) = 2 alpha tau cosh(tau) - (2 + alpha^2 beta) sinh(tau) = 0,
//   tau = sqrt(beta (4 + alpha^2 beta)) / 2.
//
// Substituting the tangency condition alpha beta = 4 gives tau = sqrt(beta + 4)
// and the one-variable equation 4 tau cosh(tau) = (tau^2 + 4) sinh(tau).

#include <cmath>
#include <optional>
#include <utility>
#include <vector>

#include "ssrchain/errors.hpp"

namespace ssrchain {

/// g(alpha, beta). Past tau = 300 both hyperbolic terms equal e^tau / 2 to
/// double precision and the result is reported as (2 alpha tau - q) e^300 / 2:
/// the sign and the zero set are kept, the magnitude is not.
inline double g_eval(double alpha, double beta) {
  if (!(beta >= 0.0)) throw ContractViolation("g_eval: beta must be >= 0");
  const double q = 2.0 + alpha * alpha * beta;
  const double tau = 0.5 * std::sqrt(beta * (4.0 + alpha * alpha * beta));
  if (tau > 300.0) return (2.0 * alpha * tau - q) * 0.5 * std::exp(300.0);
  return 2.0 * alpha * tau * std::cosh(tau) - q * std::sinh(tau);
}

struct BranchPair {
  double beta = 0.0;
  std::optional<double> alpha_small;
  std::optional<double> alpha_large;
};

namespace detail {

template <class F>
double bisect(F&& f, double a, double b) {
  double fa = f(a);
  for (int it = 0; it < 200; ++it) {
    const double m = 0.5 * (a + b);
    if (m <= a || m >= b) break;
    const double fm = f(m);
    if (fm == 0.0) return m;
    if ((fm < 0) == (fa < 0)) {
      a = m;
      fa = fm;
    } else {
      b = m;
    }
  }
  return 0.5 * (a + b);
}

}  // namespace detail

/// Real roots of g(., beta) on alpha in (0, alpha_max]. Two roots below
/// beta_c, none above; at tangency both fields hold the same value.
inline BranchPair solve_branches(double beta, double alpha_max = 50.0) {
  if (!(beta > 0.0)) throw ContractViolation("solve_branches: beta must be > 0");
  constexpr int grid = 2000;
  const double a0 = 1e-4;
  const double ratio = std::pow(alpha_max / a0, 1.0 / (grid - 1));
  auto g = [beta](double a) { return g_eval(a, beta); };

  std::vector<double> roots;
  double a_prev = a0, g_prev = g(a0);
  double a_peak = a0, g_peak = g_prev;
  for (int k = 1; k < grid; ++k) {
    const double a = (k == grid - 1) ? alpha_max : a0 * std::pow(ratio, k);
    const double gv = g(a);
    if ((gv < 0) != (g_prev < 0)) roots.push_back(detail::bisect(g, a_prev, a));
    if (gv > g_peak) {
      g_peak = gv;
      a_peak = a;
    }
    a_prev = a;
    g_prev = gv;
  }

  BranchPair out{beta, std::nullopt, std::nullopt};
  if (roots.empty()) {
    // Near-tangent: both roots may share one grid cell. Golden-section the peak.
    double lo = a_peak / ratio, hi = std::min(alpha_max, a_peak * ratio);
    const double invphi = 0.6180339887498949;
    for (int it = 0; it < 200 && hi - lo > 1e-14 * hi; ++it) {
      const double c = hi - (hi - lo) * invphi, d = lo + (hi - lo) * invphi;
      if (g(c) > g(d)) hi = d;
      else lo = c;
    }
    const double a_star = 0.5 * (lo + hi);
    const double gs = g(a_star);
    if (gs >= 0.0) {
      const double r1 = gs == 0.0 ? a_star : detail::bisect(g, lo / ratio, a_star);
      const double r2 = gs == 0.0 ? a_star : detail::bisect(g, a_star, std::min(alpha_max, hi * ratio));
      out.alpha_small = r1;
      out.alpha_large = r2;
    }
    return out;
  }
  out.alpha_small = roots.front();
  if (roots.size() >= 2) out.alpha_large = roots[1];
  return out;
}

struct CriticalPair {
  double alpha_c = 0.0;
  double beta_c = 0.0;
  double tau_c = 0.0;
  double residual = 0.0;  ///< |g(alpha_c, beta_c)|
};

/// Solves 4 tau cosh(tau) = (tau^2 + 4) sinh(tau) on (0.1, 20] and maps back to
/// (alpha_c, beta_c) = (4 / beta_c, tau_c^2 - 4).
inline CriticalPair critical_pair() {
  // Scaled by 2 e^{-tau} so it stays finite over the whole bracket.
  auto reduced = [](double t) {
    const double e = std::exp(-2.0 * t);
    return 4.0 * t * (1.0 + e) - (t * t + 4.0) * (1.0 - e);
  };
  const double tau = detail::bisect(reduced, 0.1, 20.0);
  CriticalPair cp;
  cp.tau_c = tau;
  cp.beta_c = tau * tau - 4.0;
  cp.alpha_c = 4.0 / cp.beta_c;
  cp.residual = std::abs(g_eval(cp.alpha_c, cp.beta_c));
  return cp;
}

enum class Branch { small, critical, large };

inline const char* to_string(Branch b) {
  switch (b) {
    case Branch::small: return "small";
    case Branch::critical: return "critical";
    case Branch::large: return "large";
  }
  return "?";
}

struct ContourPoint {
  double beta;
  double alpha;
  Branch branch;
};

/// The g = 0 curve over a beta grid as one polyline: the small branch
/// upward in beta, the turning point, then the large branch back down.
inline std::vector<ContourPoint> trace_contour(std::pair<double, double> beta_range, int steps) {
  if (steps < 2) throw ContractViolation("trace_contour: steps must be >= 2");
  const auto [lo, hi] = beta_range;
  if (!(lo > 0.0) || hi < lo) throw ContractViolation("trace_contour: need 0 < beta_min <= beta_max");

  std::vector<double> betas;
  for (int k = 0; k < steps; ++k) {
    const double b = lo + (hi - lo) * static_cast<double>(k) / (steps - 1);
    if (betas.empty() || b != betas.back()) betas.push_back(b);
  }
  const CriticalPair cp = critical_pair();

  std::vector<ContourPoint> small, large;
  for (double b : betas) {
    const BranchPair bp = solve_branches(b);
    if (bp.alpha_small) small.push_back({b, *bp.alpha_small, Branch::small});
    if (bp.alpha_large) large.push_back({b, *bp.alpha_large, Branch::large});
  }
  std::vector<ContourPoint> out(small.begin(), small.end());
  if (cp.beta_c >= lo && cp.beta_c <= hi) out.push_back({cp.beta_c, cp.alpha_c, Branch::critical});
  out.insert(out.end(), large.rbegin(), large.rend());
  return out;
}

}  // namespace ssrchain
