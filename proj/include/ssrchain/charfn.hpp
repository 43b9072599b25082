#pragma once

// The characteristic function f(D) = D^N (T^N)_11 whose zeros are the
// collective poles, plus the Markovian polynomial limit and the
// closed-form (lambda) pole system used as an independent residual check.

#include <cmath>
#include <complex>
#include <vector>

#include "ssrchain/core.hpp"

namespace ssrchain {

namespace detail {

// sin(z)/z, entire.
inline cplx sinc(cplx z) {
  if (std::abs(z) < 1e-4) {
    const cplx z2 = z * z;
    return 1.0 - z2 / 6.0 + z2 * z2 / 120.0;
  }
  return std::sin(z) / z;
}

}  // namespace detail

/// A characteristic-function value together with a bound on the magnitude of
/// the terms that cancel to produce it. value/scale is a backward-error-like residual.
struct CharValue {
  cplx value;
  double scale;

  double relative() const { return scale > 0.0 ? std::abs(value) / scale : std::abs(value); }
};

/// f(D) = D^(N - d) (T^N)_11 with deflation order d in {0, N-1}.
///
/// D * (qubit matrix) is entire, so powers are formed from it directly and f has
/// no singularity at D = 0. The deflated form (d = N-1, sr-condition mode only)
/// removes the (N-1)-fold zero at the origin analytically:
///
///   h(D) = (D + i/2) e^{-ikL} U_{N-1}(x) - D U_{N-2}(x),
///   x    = (-1)^n [cos(DL) + (L/2) sinc(DL)].
class CharFn {
 public:
  explicit CharFn(ChainParams params, int deflation_order = 0) : params_(params), deflation_(deflation_order) {
    validate(params_);
    const int n = params_.n_qubits;
    if (deflation_ != 0 && deflation_ != n - 1)
      throw ContractViolation("deflation order must be 0 or N-1");
    if (deflation_ != 0 && params_.mode != Mode::sr_condition)
      throw ContractViolation("deflation by N-1 is only defined under the superradiant condition");
  }

  static CharFn deflated(const ChainParams& params) { return CharFn(params, params.n_qubits - 1); }

  const ChainParams& params() const { return params_; }
  int deflation_order() const { return deflation_; }
  bool is_deflated() const { return deflation_ == params_.n_qubits - 1; }

  CharValue evaluate(cplx delta) const {
    if (params_.mode == Mode::sr_condition && is_deflated()) return deflated_value(delta);
    return full_value(delta);
  }

  cplx operator()(cplx delta) const { return evaluate(delta).value; }

 private:
  CharValue deflated_value(cplx delta) const {
    const double l = params_.separation;
    const double sign = (params_.sr_index % 2 == 0) ? 1.0 : -1.0;
    const cplx z = delta * l;
    const cplx x = sign * (std::cos(z) + 0.5 * l * detail::sinc(z));
    const auto [u1, u2] = chebyshev_u_pair(x, params_.n_qubits);
    const cplx e = sign * std::exp(-kI * z);
    const cplx first = (delta + 0.5 * kI) * e * u1;
    const cplx second = delta * u2;
    return {first - second, (std::abs(delta) + 0.5) * std::abs(e * u1) + std::abs(second)};
  }

  // (M^N)_11 for M = D Q P via the Cayley-Hamilton (Lucas) recurrence
  // s_{k+1} = tr(M) s_k - det(M) s_{k-1}, M^N = s_N M - det(M) s_{N-1} I.
  CharValue full_value(cplx delta) const {
    const auto [em, ep] = propagation_factors(delta, params_);
    const cplx h = 0.5 * kI;
    const cplx m11 = (delta + h) * em;
    const cplx m22 = (delta - h) * ep;
    const cplx tr = m11 + m22;
    const cplx det = delta * delta * em * ep;
    // The same recurrence on magnitudes bounds every term that cancels, including
    // inside tr(M), so the scale stays meaningful when a zero sits at D = 0.
    const double a11 = (std::abs(delta) + 0.5) * std::abs(em);
    const double a22 = (std::abs(delta) + 0.5) * std::abs(ep);
    const double adet = std::abs(det);
    cplx s_prev{0.0};
    cplx s{1.0};
    double b_prev = 0.0, b = 1.0;
    for (int k = 1; k < params_.n_qubits; ++k) {
      const cplx next = tr * s - det * s_prev;
      s_prev = s;
      s = next;
      const double bn = (a11 + a22) * b + adet * b_prev;
      b_prev = b;
      b = bn;
    }
    const cplx first = s * m11;
    const cplx second = det * s_prev;
    return {first - second, a11 * b + adet * b_prev};
  }

  ChainParams params_;
  int deflation_;
};

/// Coefficients c_0..c_N (ascending powers of Delta) of the Markovian
/// characteristic polynomial D^N (T^N)_11 with e^{ikL} frozen at e^{i Omega L}.
inline std::vector<cplx> markovian_polynomial(const ChainParams& params) {
  validate(params);
  if (params.mode != Mode::markovian) throw ContractViolation("markovian_polynomial requires markovian mode");
  using Poly = std::vector<cplx>;
  const cplx c = carrier_factor(params);
  const cplx cb = std::conj(c);
  const cplx h = 0.5 * kI;

  // M(D) = [[(D + i/2) cb, (i/2) c], [(-i/2) cb, (D - i/2) c]]
  const Poly m11{h * cb, cb}, m12{h * c}, m21{-h * cb}, m22{-h * c, c};

  auto mul = [](const Poly& a, const Poly& b) {
    Poly out(a.size() + b.size() - 1, cplx{0.0});
    for (std::size_t i = 0; i < a.size(); ++i)
      for (std::size_t j = 0; j < b.size(); ++j) out[i + j] += a[i] * b[j];
    return out;
  };
  auto add = [](Poly a, const Poly& b) {
    if (b.size() > a.size()) a.resize(b.size(), cplx{0.0});
    for (std::size_t i = 0; i < b.size(); ++i) a[i] += b[i];
    return a;
  };

  Poly p11 = m11, p12 = m12, p21 = m21, p22 = m22;
  for (int k = 1; k < params.n_qubits; ++k) {
    Poly n11 = add(mul(p11, m11), mul(p12, m21));
    Poly n12 = add(mul(p11, m12), mul(p12, m22));
    Poly n21 = add(mul(p21, m11), mul(p22, m21));
    Poly n22 = add(mul(p21, m12), mul(p22, m22));
    p11 = std::move(n11);
    p12 = std::move(n12);
    p21 = std::move(n21);
    p22 = std::move(n22);
  }
  p11.resize(static_cast<std::size_t>(params.n_qubits) + 1, cplx{0.0});
  return p11;
}

struct ClosedFormResidual {
  cplx res_a;   ///< defect of cos(lambda) = cos(pL) + sin(pL)/(2p)
  cplx res_b;   ///< (p + i/2) sin(lambda N) - e^{ipL} p sin(lambda (N-1))
  cplx lambda;
};

/// Evaluates the closed-form pole system at p. lambda comes from the principal
/// arccos of the first equation; of the two branches +-lambda the one with the
/// smaller second-equation residual is reported.
inline ClosedFormResidual closed_form_residual(cplx p, const ChainParams& params) {
  validate(params);
  if (params.mode != Mode::sr_condition)
    throw ContractViolation("closed-form pole system is stated under the superradiant condition");
  if (p == cplx{0.0}) throw ContractViolation("closed_form_residual: p must be nonzero");
  const double l = params.separation;
  const int n = params.n_qubits;
  const cplx w = std::cos(p * l) + std::sin(p * l) / (2.0 * p);
  const cplx lam = std::acos(w);

  auto res_b = [&](cplx lm) {
    return (p + 0.5 * kI) * std::sin(lm * static_cast<double>(n)) -
           std::exp(kI * p * l) * p * std::sin(lm * static_cast<double>(n - 1));
  };
  const cplx rp = res_b(lam);
  const cplx rm = res_b(-lam);
  const cplx best_lam = (std::abs(rm) < std::abs(rp)) ? -lam : lam;
  return {std::cos(best_lam) - w, std::abs(rm) < std::abs(rp) ? rm : rp, best_lam};
}

}  // namespace ssrchain
