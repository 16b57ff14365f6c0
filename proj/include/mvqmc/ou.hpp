#pragma once

#include <cmath>
#include <functional>

#include "mvqmc/rng.hpp"
#include "mvqmc/schemes.hpp"

namespace mvqmc {

/// Ornstein-Uhlenbeck benchmark process dY = -rate * Y dt + sigma dW,
/// used for convergence-order measurements against analytic moments.
struct OuProcess {
  double rate = 1.0;
  double sigma = 1.0;
};

inline DriftDiffusionField ou_field(const OuProcess& p) {
  DriftDiffusionField f;
  f.drift = [rate = p.rate](double, std::span<const double> x, std::span<double> out) {
    out[0] = -rate * x[0];
  };
  f.diffusion = [sigma = p.sigma](double, std::span<const double>, std::span<double> out) {
    out[0] = sigma;
  };
  return f;
}

inline double ou_mean(const OuProcess& p, double t, double y0) {
  return y0 * std::exp(-p.rate * t);
}

inline double ou_variance(const OuProcess& p, double t) {
  return p.sigma * p.sigma * (-std::expm1(-2.0 * p.rate * t)) / (2.0 * p.rate);
}

inline double ou_second_moment(const OuProcess& p, double t, double y0) {
  const double mean = ou_mean(p, t, y0);
  return mean * mean + ou_variance(p, t);
}

/// Exactly-distributed OU transition coupled to a scheme's noise draw:
/// y' = e^{-rate h} y + xi, where xi is built from the same (dW, zeta)
/// pair plus one extra independent standard normal so that its joint law
/// with the scheme's noise matches the true OU transition. Used as a
/// variance-reduction reference when measuring weak errors.
inline std::function<double(double, double, double, const NoiseDraw&, double)>
ou_coupled_exact_step(const OuProcess& p) {
  return [p](double, double h, double y, const NoiseDraw& noise, double aux_normal) {
    const double lam = p.rate, sig = p.sigma;
    const double decay = std::exp(-lam * h);
    const double var_xi = sig * sig * (-std::expm1(-2.0 * lam * h)) / (2.0 * lam);
    const double cov_dw = sig * (-std::expm1(-lam * h)) / lam;
    const double cov_i10 = sig * (-std::expm1(-lam * h) - lam * h * decay) / (lam * lam);
    const double a = cov_dw / h;
    const double b = std::sqrt(3.0) * (2.0 * cov_i10 / h - cov_dw) / h;
    const double resid = var_xi - (a * a + b * b) * h;
    const double c = std::sqrt(resid > 0.0 ? resid : 0.0);
    const double dw = noise.dw[0];
    const double zeta = std::sqrt(3.0) * (2.0 * noise.i10[0] / h - dw);
    return decay * y + a * dw + b * zeta + c * aux_normal;
  };
}

}  // namespace mvqmc
