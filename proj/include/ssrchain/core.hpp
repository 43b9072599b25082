#pragma once

// Chain configuration and 2x2 transfer-matrix algebra.
//
// Units: gamma_0 = v_g = hbar = 1. Rates and detunings are multiples of
// gamma_0, lengths are multiples of gamma_0^{-1}.

#include <cmath>
#include <complex>
#include <numbers>
#include <optional>
#include <string>
#include <string_view>
#include <utility>

#include "ssrchain/errors.hpp"

namespace ssrchain {

using cplx = std::complex<double>;

inline constexpr cplx kI{0.0, 1.0};

/// How the inter-qubit propagation phase e^{ikL} is formed.
enum class Mode {
  general,       ///< e^{ikL} = e^{i(Omega + Delta)L}
  sr_condition,  ///< e^{ikL} = (-1)^n e^{i Delta L}; Omega is not consulted
  markovian,     ///< e^{ikL} = e^{i Omega L} (linearized, Delta-independent)
};

inline std::string_view to_string(Mode m) {
  switch (m) {
    case Mode::general: return "general";
    case Mode::sr_condition: return "sr";
    case Mode::markovian: return "markovian";
  }
  return "?";
}

inline std::optional<Mode> parse_mode(std::string_view s) {
  if (s == "general") return Mode::general;
  if (s == "sr" || s == "sr-condition" || s == "sr_condition") return Mode::sr_condition;
  if (s == "markovian") return Mode::markovian;
  return std::nullopt;
}

struct ChainParams {
  int n_qubits = 1;
  double omega = 50.0;       ///< qubit frequency [gamma_0]
  double separation = 0.0;   ///< L [gamma_0^{-1}]
  int sr_index = 1;          ///< n in Omega L = n pi
  Mode mode = Mode::sr_condition;

  static ChainParams sr(int n, double sep, int sr_index = 1) {
    return {n, 50.0, sep, sr_index, Mode::sr_condition};
  }
  static ChainParams general(int n, double omega, double sep) {
    return {n, omega, sep, 1, Mode::general};
  }
  static ChainParams markovian(int n, double omega, double sep) {
    return {n, omega, sep, 1, Mode::markovian};
  }

  ChainParams with_separation(double sep) const {
    ChainParams p = *this;
    p.separation = sep;
    return p;
  }
};

inline void validate(const ChainParams& p) {
  if (p.n_qubits < 1) throw ContractViolation("n_qubits must be >= 1");
  if (!std::isfinite(p.separation) || p.separation < 0.0)
    throw ContractViolation("separation must be finite and >= 0");
  if (!std::isfinite(p.omega) || p.omega <= 0.0) throw ContractViolation("omega must be finite and > 0");
}

/// Rotating-wave validity guard. Only modes that read omega can trigger it.
inline std::optional<std::string> validity_warning(const ChainParams& p) {
  if (p.mode != Mode::sr_condition && p.omega < 10.0)
    return "omega = " + std::to_string(p.omega) +
           " is not >> 1; the rotating-wave treatment assumes gamma_0/Omega << 1";
  return std::nullopt;
}

/// e^{i Omega L} with exact +-1 when Omega L is a multiple of pi to rounding.
inline cplx carrier_factor(const ChainParams& p) {
  if (p.mode == Mode::sr_condition) return (p.sr_index % 2 == 0) ? 1.0 : -1.0;
  const double phase = p.omega * p.separation;
  const double turns = std::round(phase / std::numbers::pi);
  if (std::abs(phase - turns * std::numbers::pi) <= 1e-12 * std::max(1.0, phase))
    return (static_cast<long long>(turns) % 2 == 0) ? 1.0 : -1.0;
  return std::polar(1.0, phase);
}

/// The pair (e^{-ikL}, e^{ikL}) for a complex detuning.
inline std::pair<cplx, cplx> propagation_factors(cplx delta, const ChainParams& p) {
  const cplx c = carrier_factor(p);
  if (p.mode == Mode::markovian) return {std::conj(c), c};
  const cplx z = delta * p.separation;
  return {std::conj(c) * std::exp(-kI * z), c * std::exp(kI * z)};
}

struct Mat2c {
  cplx a11{1.0}, a12{0.0}, a21{0.0}, a22{1.0};

  static constexpr Mat2c identity() { return {}; }

  cplx det() const { return a11 * a22 - a12 * a21; }
  cplx trace() const { return a11 + a22; }

  friend Mat2c operator*(const Mat2c& x, const Mat2c& y) {
    return {x.a11 * y.a11 + x.a12 * y.a21, x.a11 * y.a12 + x.a12 * y.a22,
            x.a21 * y.a11 + x.a22 * y.a21, x.a21 * y.a12 + x.a22 * y.a22};
  }
  friend Mat2c operator*(cplx s, const Mat2c& m) { return {s * m.a11, s * m.a12, s * m.a21, s * m.a22}; }
  friend Mat2c operator+(const Mat2c& x, const Mat2c& y) {
    return {x.a11 + y.a11, x.a12 + y.a12, x.a21 + y.a21, x.a22 + y.a22};
  }
  friend Mat2c operator-(const Mat2c& x, const Mat2c& y) {
    return {x.a11 - y.a11, x.a12 - y.a12, x.a21 - y.a21, x.a22 - y.a22};
  }

  /// Frobenius norm.
  double norm() const {
    return std::sqrt(std::norm(a11) + std::norm(a12) + std::norm(a21) + std::norm(a22));
  }
};

namespace detail {

// `coupling` is gamma_0 in units of itself; anything but 1 exists for tests.
inline Mat2c qubit_matrix(cplx delta, double coupling) {
  if (delta == cplx{0.0}) throw SingularDetuning();
  const cplx s = kI * coupling / (2.0 * delta);
  return {1.0 + s, s, -s, 1.0 - s};
}

}  // namespace detail

/// Single-qubit scattering matrix, [[1+i/2D, i/2D], [-i/2D, 1-i/2D]].
inline Mat2c qubit_matrix(cplx delta) { return detail::qubit_matrix(delta, 1.0); }

/// diag(e^{-i phase}, e^{i phase}).
inline Mat2c propagation_matrix(cplx phase) {
  return {std::exp(-kI * phase), 0.0, 0.0, std::exp(kI * phase)};
}

/// One unit cell: a qubit followed by a propagation segment of length L.
inline Mat2c unit_cell(cplx delta, const ChainParams& p) {
  validate(p);
  const Mat2c q = qubit_matrix(delta);
  const auto [em, ep] = propagation_factors(delta, p);
  return q * Mat2c{em, 0.0, 0.0, ep};
}

/// Returns (U_{k-1}(x), U_{k-2}(x)) for Chebyshev polynomials of the second kind, k >= 1.
inline std::pair<cplx, cplx> chebyshev_u_pair(cplx x, int k) {
  cplx prev{0.0};  // U_{-1}
  cplx cur{1.0};   // U_0
  for (int j = 1; j < k; ++j) {
    const cplx next = 2.0 * x * cur - prev;
    prev = cur;
    cur = next;
  }
  return {cur, prev};
}

/// T^N for a unimodular T via T^N = U_{N-1}(x) T - U_{N-2}(x) I, x = tr(T)/2.
inline Mat2c matrix_power(const Mat2c& t, int n) {
  if (n < 1) throw ContractViolation("matrix_power: exponent must be >= 1");
  const double det_scale = std::max(1.0, std::abs(t.a11 * t.a22) + std::abs(t.a12 * t.a21));
  if (std::abs(t.det() - 1.0) > 1e-9 * det_scale) throw ContractViolation("matrix_power: matrix is not unimodular");
  const auto [u1, u2] = chebyshev_u_pair(0.5 * t.trace(), n);
  return u1 * t - u2 * Mat2c::identity();
}

struct ScatteringAmplitudes {
  cplx t;
  cplx r;
};

/// On-shell transmission and reflection of the whole chain at a real detuning.
inline ScatteringAmplitudes scattering(double delta, const ChainParams& p) {
  if (delta == 0.0 || !std::isfinite(delta)) throw SingularDetuning();
  const Mat2c tn = matrix_power(unit_cell(delta, p), p.n_qubits);
  if (tn.a11 == cplx{0.0}) throw OnResonancePole();
  const cplx t = 1.0 / tn.a11;
  return {t, tn.a21 * t};
}

}  // namespace ssrchain
