#pragma once

#include <cmath>
#include <cstdint>
#include <functional>
#include <limits>
#include <span>
#include <vector>

#include "mvqmc/errors.hpp"
#include "mvqmc/parallel.hpp"
#include "mvqmc/problem.hpp"
#include "mvqmc/rng.hpp"
#include "mvqmc/schemes.hpp"

namespace mvqmc {

struct WeakOrderPoint {
  double h = 0.0;
  double error = 0.0;      ///< signed E[f(Y_h)] - exact
  double std_error = 0.0;  ///< Monte Carlo standard error of the estimate
  bool used = false;       ///< false when |error| is below the noise floor
};

struct WeakOrderResult {
  double slope = std::numeric_limits<double>::quiet_NaN();
  double intercept = std::numeric_limits<double>::quiet_NaN();
  bool indeterminate = false;  ///< fewer than two points above the noise floor
  std::vector<WeakOrderPoint> points;
};

struct WeakOrderOptions {
  double T = 1.0;
  std::vector<double> x0 = {1.0};
  std::size_t m = 1;
  double noise_floor_sigmas = 3.0;
  unsigned threads = default_thread_count();
  /// Optional exactly-distributed reference transition driven by the same
  /// noise (plus one auxiliary standard normal). When set, the weak error
  /// is estimated from the paired difference f(scheme path) - f(reference
  /// path), which shrinks the Monte Carlo noise floor by orders of
  /// magnitude. Scalar state only.
  std::function<double(double t, double h, double y, const NoiseDraw&, double aux)>
      coupled_exact;
};

/// Arbitrary one-step map; out must not alias x.
using StepFn = std::function<void(double t, double h, std::span<const double> x,
                                  const NoiseDraw& noise, std::span<double> out)>;

namespace detail {

template <class Stepper>
WeakOrderResult estimate_weak_order_impl(const Stepper& make_thread_stepper,
                                         const ScalarFn& f, double exact_expectation,
                                         std::span<const double> h_list,
                                         std::uint64_t n_paths, std::uint64_t seed,
                                         const WeakOrderOptions& opt) {
  if (h_list.size() < 3) throw config_error("estimate_weak_order: need at least 3 step sizes");
  if (n_paths < 2) throw config_error("estimate_weak_order: need at least 2 paths");
  const std::size_t d = opt.x0.size();
  if (opt.coupled_exact && d != 1)
    throw config_error("estimate_weak_order: coupled reference requires scalar state");

  WeakOrderResult res;
  for (std::size_t hi = 0; hi < h_list.size(); ++hi) {
    const double h_nominal = h_list[hi];
    if (!(h_nominal > 0.0)) throw config_error("estimate_weak_order: h must be > 0");
    const auto n_steps = static_cast<std::size_t>(std::llround(opt.T / h_nominal));
    if (n_steps == 0 || std::abs(n_steps * h_nominal - opt.T) > 1e-9 * opt.T)
      throw config_error("estimate_weak_order: T must be an integer multiple of each h");
    const double h = opt.T / static_cast<double>(n_steps);

    const std::size_t n_blocks = (n_paths + kDefaultBlockSize - 1) / kDefaultBlockSize;
    std::vector<double> sum_g(n_blocks, 0.0), sum_g2(n_blocks, 0.0);

    for_each_block(n_paths, kDefaultBlockSize, opt.threads,
                   [&](std::size_t begin, std::size_t end, std::size_t blk) {
      auto stepper = make_thread_stepper();
      std::vector<double> x(d), xn(d), dw(opt.m), i10(opt.m);
      double s = 0.0, s2 = 0.0;
      for (std::size_t path = begin; path < end; ++path) {
        for (std::size_t i = 0; i < d; ++i) x[i] = opt.x0[i];
        double y = opt.x0[0];
        for (std::size_t step = 0; step < n_steps; ++step) {
          RandomStream rs(StreamKey{seed, path, (hi << 32) | step, 0});
          detail::sample_noise_into(rs, h, dw, i10);
          NoiseDraw nd;  // span-backed view would avoid this copy; sizes are tiny
          nd.dw.assign(dw.begin(), dw.end());
          nd.i10.assign(i10.begin(), i10.end());
          stepper(step * h, h, x, nd, xn);
          std::swap(x, xn);
          if (opt.coupled_exact) {
            RandomStream aux(StreamKey{seed, path, (hi << 32) | step, 1});
            y = opt.coupled_exact(step * h, h, y, nd, aux.next_gaussian(1.0));
          }
        }
        if (!all_finite_span(x))
          throw numerical_error("estimate_weak_order: non-finite state",
                                static_cast<std::ptrdiff_t>(n_steps - 1));
        double g = f(x);
        if (opt.coupled_exact) g -= f(std::span<const double>(&y, 1));
        s += g;
        s2 += g * g;
      }
      sum_g[blk] = s;
      sum_g2[blk] = s2;
    });

    double total = 0.0, total2 = 0.0;
    for (std::size_t b = 0; b < n_blocks; ++b) {
      total += sum_g[b];
      total2 += sum_g2[b];
    }
    const double n = static_cast<double>(n_paths);
    const double mean = total / n;
    const double var = (total2 - n * mean * mean) / (n - 1.0);
    const double se = std::sqrt(var > 0.0 ? var / n : 0.0);
    const double error = opt.coupled_exact ? mean : mean - exact_expectation;

    WeakOrderPoint pt;
    pt.h = h_nominal;
    pt.error = error;
    pt.std_error = se;
    pt.used = std::abs(error) >= opt.noise_floor_sigmas * se && std::abs(error) > 0.0;
    res.points.push_back(pt);
  }

  // least squares of log|error| against log h over the usable points
  double sx = 0, sy = 0, sxx = 0, sxy = 0;
  std::size_t n_used = 0;
  for (const auto& pt : res.points) {
    if (!pt.used) continue;
    const double lx = std::log(pt.h), ly = std::log(std::abs(pt.error));
    sx += lx;
    sy += ly;
    sxx += lx * lx;
    sxy += lx * ly;
    ++n_used;
  }
  if (n_used < 2) {
    res.indeterminate = true;
    return res;
  }
  const double nn = static_cast<double>(n_used);
  const double denom = nn * sxx - sx * sx;
  res.slope = (nn * sxy - sx * sy) / denom;
  res.intercept = (sy - res.slope * sx) / nn;
  return res;
}

}  // namespace detail

/// Fits the empirical weak order of a named scheme on the SDE given by
/// field: least-squares slope of log|E[f(Y_T)] - exact| against log h.
/// Points whose measured error is indistinguishable from Monte Carlo noise
/// (below noise_floor_sigmas standard errors) are excluded and reported
/// with used = false.
inline WeakOrderResult estimate_weak_order(SchemeKind scheme, const DriftDiffusionField& field,
                                           const ScalarFn& f, double exact_expectation,
                                           std::span<const double> h_list,
                                           std::uint64_t n_paths, std::uint64_t seed,
                                           const WeakOrderOptions& opt = {}) {
  const std::size_t d = opt.x0.size();
  const auto make_stepper = [&] {
    return [&field, scheme, d, m = opt.m, ws = StepWorkspace{}](
               double t, double h, std::span<const double> x, const NoiseDraw& nd,
               std::span<double> out) mutable {
      ws.resize(d, m);
      detail::step_into(scheme, field, t, h, x, nd.dw, nd.i10, out, ws);
    };
  };
  return detail::estimate_weak_order_impl(make_stepper, f, exact_expectation, h_list,
                                          n_paths, seed, opt);
}

/// Same measurement for a caller-supplied one-step map.
inline WeakOrderResult estimate_weak_order(const StepFn& step, const ScalarFn& f,
                                           double exact_expectation,
                                           std::span<const double> h_list,
                                           std::uint64_t n_paths, std::uint64_t seed,
                                           const WeakOrderOptions& opt = {}) {
  const auto make_stepper = [&] { return step; };
  return detail::estimate_weak_order_impl(make_stepper, f, exact_expectation, h_list,
                                          n_paths, seed, opt);
}

}  // namespace mvqmc
