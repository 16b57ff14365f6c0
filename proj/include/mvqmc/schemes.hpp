#pragma once

#include <cmath>
#include <cstddef>
#include <functional>
#include <span>
#include <string>
#include <vector>

#include "mvqmc/errors.hpp"
#include "mvqmc/rng.hpp"

namespace mvqmc {

enum class SchemeKind { euler, sri1w1 };

/// Which NoiseDraw fields a one-step map consumes, and its weak order.
struct SchemeSpec {
  std::string name;
  double weak_order_p = 1.0;
  bool uses_dw = true;
  bool uses_i10 = false;
};

inline SchemeSpec scheme_spec(SchemeKind k) {
  switch (k) {
    case SchemeKind::euler:
      return {"euler", 1.0, true, false};
    case SchemeKind::sri1w1:
      return {"sri1w1", 2.0, true, true};
  }
  throw config_error("scheme_spec: unknown scheme");
}

inline SchemeKind scheme_by_name(const std::string& name) {
  if (name == "euler") return SchemeKind::euler;
  if (name == "sri1w1") return SchemeKind::sri1w1;
  throw config_error("unknown scheme \"" + name + "\" (available: euler, sri1w1)");
}

/// Time-dependent drift/diffusion pair defining one SDE. drift writes d
/// values; diffusion writes d x m values row-major. Both must be pure.
struct DriftDiffusionField {
  std::function<void(double t, std::span<const double> x, std::span<double> out)> drift;
  std::function<void(double t, std::span<const double> x, std::span<double> out)> diffusion;
};

template <class F>
concept FieldLike = requires(const F& f, double t, std::span<const double> x,
                             std::span<double> out) {
  f.drift(t, x, out);
  f.diffusion(t, x, out);
};

/// Scratch buffers reused across steps. Not shareable between threads.
struct StepWorkspace {
  std::vector<double> a;   // d
  std::vector<double> b;   // d*m
  std::vector<double> h0;  // d (stage state)
  std::vector<double> h1;  // d (stage state)
  std::vector<double> fa;  // 4*d cached drift stage values
  std::vector<double> fb;  // 4*d cached diffusion stage values

  void resize(std::size_t d, std::size_t m) {
    a.resize(d);
    b.resize(d * m);
    h0.resize(d);
    h1.resize(d);
    fa.resize(4 * d);
    fb.resize(4 * d);
  }
};

namespace detail {

/// Euler-Maruyama: x + a(t,x) h + b(t,x) dW.
template <FieldLike F>
void euler_step_into(const F& field, double t, double h, std::span<const double> x,
                     std::span<const double> dw, std::span<double> out,
                     StepWorkspace& ws) {
  const std::size_t d = x.size();
  const std::size_t m = dw.size();
  field.drift(t, x, std::span<double>(ws.a.data(), d));
  field.diffusion(t, x, std::span<double>(ws.b.data(), d * m));
  for (std::size_t i = 0; i < d; ++i) {
    double acc = x[i] + h * ws.a[i];
    const double* row = ws.b.data() + i * m;
    for (std::size_t j = 0; j < m; ++j) acc += row[j] * dw[j];
    out[i] = acc;
  }
}

// SRI1W1 tableau (Rossler 2010, diagonal-noise SRK; strong order 1.5,
// weak order 2). Stage weights for the drift (A0, B0, c0, alpha) and the
// diffusion (A1, B1, c1, beta1..beta4); rows list the strictly lower
// triangle.
inline constexpr double kC0[4] = {0.0, 3.0 / 4.0, 0.0, 0.0};
inline constexpr double kC1[4] = {0.0, 1.0 / 4.0, 1.0, 1.0 / 4.0};
inline constexpr double kA0[4][3] = {{}, {3.0 / 4.0}, {0.0, 0.0}, {0.0, 0.0, 0.0}};
inline constexpr double kA1[4][3] = {{}, {1.0 / 4.0}, {1.0, 0.0}, {0.0, 0.0, 1.0 / 4.0}};
inline constexpr double kB0[4][3] = {{}, {3.0 / 2.0}, {0.0, 0.0}, {0.0, 0.0, 0.0}};
inline constexpr double kB1[4][3] = {{}, {1.0 / 2.0}, {-1.0, 0.0}, {-5.0, 3.0, 1.0 / 2.0}};
inline constexpr double kAlpha[4] = {1.0 / 3.0, 2.0 / 3.0, 0.0, 0.0};
inline constexpr double kBeta1[4] = {-1.0, 4.0 / 3.0, 2.0 / 3.0, 0.0};
inline constexpr double kBeta2[4] = {-1.0, 4.0 / 3.0, -1.0 / 3.0, 0.0};
inline constexpr double kBeta3[4] = {2.0, -4.0 / 3.0, -2.0 / 3.0, 0.0};
inline constexpr double kBeta4[4] = {-2.0, 5.0 / 3.0, -2.0 / 3.0, 1.0};

/// SRI1W1 for scalar driving noise (m = 1, any d). Consumes dW and the
/// iterated integral I10; I11 and I111 are polynomial in dW.
template <FieldLike F>
void sri1w1_step_into(const F& field, double t, double h, std::span<const double> x,
                      std::span<const double> dw, std::span<const double> i10,
                      std::span<double> out, StepWorkspace& ws) {
  const std::size_t d = x.size();
  const double w = dw[0];
  const double I1 = w;
  const double I11 = 0.5 * (w * w - h);
  const double I111 = (w * w * w - 3.0 * h * w) / 6.0;
  const double I10 = i10[0];
  const double sqrt_h = std::sqrt(h);

  for (int s = 0; s < 4; ++s) {
    for (std::size_t i = 0; i < d; ++i) {
      double acc0 = x[i];
      double acc1 = x[i];
      for (int j = 0; j < s; ++j) {
        if (kA0[s][j] != 0.0) acc0 += h * kA0[s][j] * ws.fa[j * d + i];
        if (kB0[s][j] != 0.0) acc0 += (I10 / h) * kB0[s][j] * ws.fb[j * d + i];
        if (kA1[s][j] != 0.0) acc1 += h * kA1[s][j] * ws.fa[j * d + i];
        if (kB1[s][j] != 0.0) acc1 += sqrt_h * kB1[s][j] * ws.fb[j * d + i];
      }
      ws.h0[i] = acc0;
      ws.h1[i] = acc1;
    }
    field.drift(t + kC0[s] * h, ws.h0, std::span<double>(ws.fa.data() + s * d, d));
    field.diffusion(t + kC1[s] * h, ws.h1, std::span<double>(ws.fb.data() + s * d, d));
  }

  for (std::size_t i = 0; i < d; ++i) {
    double acc = x[i];
    for (int s = 0; s < 4; ++s) {
      acc += h * kAlpha[s] * ws.fa[s * d + i];
      const double bw = kBeta1[s] * I1 + kBeta2[s] * I11 / sqrt_h +
                        kBeta3[s] * I10 / h + kBeta4[s] * I111 / h;
      acc += bw * ws.fb[s * d + i];
    }
    out[i] = acc;
  }
}

template <FieldLike F>
void step_into(SchemeKind scheme, const F& field, double t, double h,
               std::span<const double> x, std::span<const double> dw,
               std::span<const double> i10, std::span<double> out, StepWorkspace& ws) {
  if (scheme == SchemeKind::euler)
    euler_step_into(field, t, h, x, dw, out, ws);
  else
    sri1w1_step_into(field, t, h, x, dw, i10, out, ws);
}

}  // namespace detail

namespace detail {

inline bool all_finite_span(std::span<const double> v) {
  for (double x : v)
    if (!std::isfinite(x)) return false;
  return true;
}

inline void check_step_pre(double h, std::span<const double> x) {
  if (!(h > 0.0)) throw config_error("step: step size h must be > 0");
  if (!all_finite_span(x)) throw config_error("step: non-finite state");
}

}  // namespace detail

/// One Euler-Maruyama step. Throws numerical_error if the result is
/// non-finite.
inline std::vector<double> euler_step(const DriftDiffusionField& field, double t, double h,
                                      std::span<const double> x, const NoiseDraw& noise) {
  detail::check_step_pre(h, x);
  if (noise.dw.empty()) throw config_error("euler_step: noise must provide dw");
  std::vector<double> out(x.size());
  StepWorkspace ws;
  ws.resize(x.size(), noise.dw.size());
  detail::euler_step_into(field, t, h, x, noise.dw, out, ws);
  if (!detail::all_finite_span(out)) throw numerical_error("euler_step: non-finite result");
  return out;
}

/// One SRI1W1 step (weak order 2, scalar driving noise). Requires both dw
/// and i10 in the noise draw.
inline std::vector<double> sri1w1_step(const DriftDiffusionField& field, double t, double h,
                                       std::span<const double> x, const NoiseDraw& noise) {
  detail::check_step_pre(h, x);
  if (noise.dw.size() != 1 || noise.i10.size() != 1)
    throw config_error("sri1w1_step: scalar driving noise (m = 1) with dw and i10 required");
  std::vector<double> out(x.size());
  StepWorkspace ws;
  ws.resize(x.size(), 1);
  detail::sri1w1_step_into(field, t, h, x, noise.dw, noise.i10, out, ws);
  if (!detail::all_finite_span(out)) throw numerical_error("sri1w1_step: non-finite result");
  return out;
}

}  // namespace mvqmc
