#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvqmc/errors.hpp"

namespace mvqmc {

/// The K coupled expectations gamma_k at one time.
using GammaVector = std::vector<double>;

/// Writes the value of one drift basis function at x into out (length d).
using DriftBasisFn = std::function<void(std::span<const double> x, std::span<double> out)>;
/// Writes one diffusion basis function at x into out (d x m, row-major).
using DiffusionBasisFn = std::function<void(std::span<const double> x, std::span<double> out)>;
/// Scalar observable of the state.
using ScalarFn = std::function<double(std::span<const double> x)>;

/// An SDE whose drift and diffusion are linear combinations of basis
/// coefficient functions weighted by expectations of the moment functions:
///   drift(t,x)     = sum_k gamma_k(t) * drift_basis[k](x)
///   diffusion(t,x) = sum_k gamma_k(t) * diffusion_basis[k](x)
///   gamma_k(t)     = E[ phi_basis[k](X_t) ].
/// Immutable after construction; all callables must be pure so the problem
/// can be shared across concurrent workers.
struct MvsdeProblem {
  std::size_t d = 1;  ///< state dimension
  std::size_t m = 1;  ///< Brownian dimension
  std::size_t K = 1;  ///< basis size

  std::vector<DriftBasisFn> drift_basis;
  std::vector<DiffusionBasisFn> diffusion_basis;
  std::vector<ScalarFn> phi_basis;
  ScalarFn phi_terminal;

  std::vector<double> x0;
  double horizon_T = 1.0;
  double bound_U = 2.0;  ///< common coefficient bound, must exceed 1

  std::string name;
};

namespace detail {

inline bool all_finite(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

}  // namespace detail

/// Checks structural invariants and spot-checks the coefficient bound at a
/// few sample points. Throws config_error on violation.
inline void validate_problem(const MvsdeProblem& p) {
  if (p.d < 1 || p.m < 1 || p.K < 1)
    throw config_error("problem: d, m, K must all be >= 1");
  if (!(p.horizon_T > 0.0)) throw config_error("problem: horizon_T must be > 0");
  if (!(p.bound_U > 1.0)) throw config_error("problem: bound_U must be > 1");
  if (p.drift_basis.size() != p.K || p.diffusion_basis.size() != p.K ||
      p.phi_basis.size() != p.K)
    throw config_error("problem: basis function lists must each have K entries");
  if (!p.phi_terminal) throw config_error("problem: phi_terminal is not set");
  if (p.x0.size() != p.d) throw config_error("problem: x0 must have d entries");
  if (!detail::all_finite(p.x0)) throw config_error("problem: x0 must be finite");

  // Assumption spot-check: |alpha_k|, |beta_k| <= U and finite phi_k at a
  // handful of points (full smoothness is not machine-checked).
  std::vector<double> pt(p.d), a(p.d), b(p.d * p.m);
  const double probes[] = {0.0, 1.0, -1.0, 0.5, -2.0};
  for (double c : probes) {
    for (std::size_t i = 0; i < p.d; ++i) pt[i] = p.x0[i] + c;
    for (std::size_t k = 0; k < p.K; ++k) {
      p.drift_basis[k](pt, a);
      p.diffusion_basis[k](pt, b);
      double na = 0.0, nb = 0.0;
      for (double v : a) na += v * v;
      for (double v : b) nb += v * v;
      if (!std::isfinite(na) || std::sqrt(na) > p.bound_U)
        throw config_error("problem: |alpha_" + std::to_string(k + 1) +
                           "| exceeds bound_U at a probe point");
      if (!std::isfinite(nb) || std::sqrt(nb) > p.bound_U)
        throw config_error("problem: |beta_" + std::to_string(k + 1) +
                           "| exceeds bound_U at a probe point");
      if (!std::isfinite(p.phi_basis[k](pt)))
        throw config_error("problem: phi_" + std::to_string(k + 1) +
                           " is non-finite at a probe point");
    }
  }
}

/// drift(x) = sum_k gamma_k * alpha_k(x).
inline std::vector<double> eval_drift(const MvsdeProblem& p, const GammaVector& gamma,
                                      std::span<const double> x) {
  if (gamma.size() != p.K) throw config_error("eval_drift: gamma must have K entries");
  if (x.size() != p.d) throw config_error("eval_drift: x must have d entries");
  if (!detail::all_finite(x) || !detail::all_finite(gamma))
    throw config_error("eval_drift: non-finite input");
  std::vector<double> out(p.d, 0.0), work(p.d);
  for (std::size_t k = 0; k < p.K; ++k) {
    p.drift_basis[k](x, work);
    for (std::size_t i = 0; i < p.d; ++i) out[i] += gamma[k] * work[i];
  }
  return out;
}

/// diffusion(x) = sum_k gamma_k * beta_k(x), d x m row-major.
inline std::vector<double> eval_diffusion(const MvsdeProblem& p, const GammaVector& gamma,
                                          std::span<const double> x) {
  if (gamma.size() != p.K) throw config_error("eval_diffusion: gamma must have K entries");
  if (x.size() != p.d) throw config_error("eval_diffusion: x must have d entries");
  if (!detail::all_finite(x) || !detail::all_finite(gamma))
    throw config_error("eval_diffusion: non-finite input");
  std::vector<double> out(p.d * p.m, 0.0), work(p.d * p.m);
  for (std::size_t k = 0; k < p.K; ++k) {
    p.diffusion_basis[k](x, work);
    for (std::size_t i = 0; i < out.size(); ++i) out[i] += gamma[k] * work[i];
  }
  return out;
}

/// (phi_1(x), ..., phi_K(x)).
inline GammaVector eval_basis(const MvsdeProblem& p, std::span<const double> x) {
  if (x.size() != p.d) throw config_error("eval_basis: x must have d entries");
  if (!detail::all_finite(x)) throw config_error("eval_basis: non-finite input");
  GammaVector out(p.K);
  for (std::size_t k = 0; k < p.K; ++k) out[k] = p.phi_basis[k](x);
  return out;
}

}  // namespace mvqmc
