#pragma once

#include <cmath>
#include <string>
#include <vector>

#include "mvqmc/errors.hpp"
#include "mvqmc/problem.hpp"

namespace mvqmc {

/// Mean of the Shimizu-Yamada solution X_t = x0 e^{-t} + W_t.
inline double shimizu_yamada_exact_mean(double t, double x0) {
  if (!(t >= 0.0)) throw config_error("shimizu_yamada_exact_mean: t must be >= 0");
  return x0 * std::exp(-t);
}

/// Shimizu-Yamada model: scalar SDE with drift -E[X_t] and unit diffusion,
/// expressed in the coupled-expectation form with basis
///   phi_1 = 1, phi_2(x) = phi(x) = x,
///   alpha_1 = 0, alpha_2 = -1, beta_1 = 1, beta_2 = 0,
/// so that drift = -gamma_2(t) and diffusion = gamma_1(t) = 1, consistent
/// with the exact solution X_t = x0 e^{-t} + W_t.
inline MvsdeProblem shimizu_yamada(double x0 = 1.0, double T = 2.0) {
  MvsdeProblem p;
  p.name = "shimizu_yamada";
  p.d = 1;
  p.m = 1;
  p.K = 2;
  p.drift_basis = {
      [](std::span<const double>, std::span<double> out) { out[0] = 0.0; },
      [](std::span<const double>, std::span<double> out) { out[0] = -1.0; },
  };
  p.diffusion_basis = {
      [](std::span<const double>, std::span<double> out) { out[0] = 1.0; },
      [](std::span<const double>, std::span<double> out) { out[0] = 0.0; },
  };
  p.phi_basis = {
      [](std::span<const double>) { return 1.0; },
      [](std::span<const double> x) { return x[0]; },
  };
  p.phi_terminal = [](std::span<const double> x) { return x[0]; };
  p.x0 = {x0};
  p.horizon_T = T;
  p.bound_U = 1.5;
  validate_problem(p);
  return p;
}

/// Built-in model registry. Only "shimizu_yamada" ships; custom problems
/// are constructed programmatically.
inline MvsdeProblem make_problem(const std::string& name, double x0 = 1.0, double T = 2.0) {
  if (name == "shimizu_yamada") return shimizu_yamada(x0, T);
  throw config_error("unknown model \"" + name + "\" (available: shimizu_yamada)");
}

}  // namespace mvqmc
