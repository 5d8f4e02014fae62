#pragma once

#include <algorithm>
#include <cmath>
#include <span>
#include <vector>

#include "kinmech/integrate.hpp"
#include "kinmech/translate.hpp"

namespace kinmech::detail {

enum class StepOutcome { kOk, kNonFinite, kStepTooSmall, kStepLimit };

inline const char* to_string(StepOutcome o) {
  switch (o) {
    case StepOutcome::kOk: return "ok";
    case StepOutcome::kNonFinite: return "non-finite state";
    case StepOutcome::kStepTooSmall: return "step size underflow";
    case StepOutcome::kStepLimit: return "step limit reached";
  }
  return "unknown";
}

/// Dormand-Prince 5(4) with the Hairer continuous extension. sink(k, state)
/// is called once per grid point in order; returning false stops early and
/// reports kOk. Grid and initial state are assumed validated.
template <typename Sink>
StepOutcome integrate_grid(const KineticModel& model, const double* theta, std::span<const double> c0,
                           std::span<const double> times, const IntegratorOptions& opt, Sink&& sink) {
  constexpr double a21 = 1.0 / 5;
  constexpr double a31 = 3.0 / 40, a32 = 9.0 / 40;
  constexpr double a41 = 44.0 / 45, a42 = -56.0 / 15, a43 = 32.0 / 9;
  constexpr double a51 = 19372.0 / 6561, a52 = -25360.0 / 2187, a53 = 64448.0 / 6561, a54 = -212.0 / 729;
  constexpr double a61 = 9017.0 / 3168, a62 = -355.0 / 33, a63 = 46732.0 / 5247, a64 = 49.0 / 176,
                   a65 = -5103.0 / 18656;
  constexpr double a71 = 35.0 / 384, a73 = 500.0 / 1113, a74 = 125.0 / 192, a75 = -2187.0 / 6784, a76 = 11.0 / 84;
  constexpr double e1 = 71.0 / 57600, e3 = -71.0 / 16695, e4 = 71.0 / 1920, e5 = -17253.0 / 339200,
                   e6 = 22.0 / 525, e7 = -1.0 / 40;
  constexpr double d1 = -12715105075.0 / 11282082432.0, d3 = 87487479700.0 / 32700410799.0,
                   d4 = -10690763975.0 / 1880347072.0, d5 = 701980252875.0 / 199316789632.0,
                   d6 = -1453857185.0 / 822651844.0, d7 = 69997945.0 / 29380423.0;

  const int n = model.n_species();
  const double clamp = opt.atol;
  std::vector<double> buf(static_cast<std::size_t>(n) * 14);
  double* y = buf.data();
  double* k1 = y + n;
  double* k2 = k1 + n;
  double* k3 = k2 + n;
  double* k4 = k3 + n;
  double* k5 = k4 + n;
  double* k6 = k5 + n;
  double* k7 = k6 + n;
  double* y1 = k7 + n;
  double* tmp = y1 + n;
  double* r2 = tmp + n;
  double* r3 = r2 + n;
  double* r4 = r3 + n;
  double* r5 = r4 + n;

  auto f = [&](const double* c, double* out) { model.rhs(theta, c, out, clamp); };
  auto err_norm = [&](const double* a, const double* b, const double* e) {
    double s = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::max(std::abs(a[i]), std::abs(b[i]));
      const double v = e[i] / sc;
      s += v * v;
    }
    return std::sqrt(s / n);
  };

  std::copy(c0.begin(), c0.end(), y);
  double t = times.front();
  std::size_t next = 0;
  if (!sink(next++, std::span<const double>(y, n))) return StepOutcome::kOk;
  if (next == times.size()) return StepOutcome::kOk;
  const double t_end = times.back();

  f(y, k1);
  // Initial step from the Hairer-Wanner heuristic.
  double h;
  {
    double d0 = 0.0, d1n = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d0 += (y[i] / sc) * (y[i] / sc);
      d1n += (k1[i] / sc) * (k1[i] / sc);
    }
    d0 = std::sqrt(d0 / n);
    d1n = std::sqrt(d1n / n);
    double h0 = (d0 < 1e-5 || d1n < 1e-5) ? 1e-6 : 0.01 * d0 / d1n;
    h0 = std::min(h0, t_end - t);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h0 * k1[i];
    f(tmp, k2);
    double d2 = 0.0;
    for (int i = 0; i < n; ++i) {
      const double sc = opt.atol + opt.rtol * std::abs(y[i]);
      d2 += ((k2[i] - k1[i]) / sc) * ((k2[i] - k1[i]) / sc);
    }
    d2 = std::sqrt(d2 / n) / h0;
    const double dm = std::max(d1n, d2);
    const double h1 = dm <= 1e-15 ? std::max(1e-6, h0 * 1e-3) : std::pow(0.01 / dm, 0.2);
    h = std::min({100 * h0, h1, t_end - t});
  }

  const long long step_cap = static_cast<long long>(opt.max_steps_per_interval) * (times.size() - 1);
  long long steps = 0;
  bool rejected = false;
  while (next < times.size()) {
    if (++steps > step_cap) return StepOutcome::kStepLimit;
    if (h < 1e-14 * std::max(1.0, std::abs(t))) return StepOutcome::kStepTooSmall;
    if (t + h > t_end) h = t_end - t;

    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * a21 * k1[i];
    f(tmp, k2);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a31 * k1[i] + a32 * k2[i]);
    f(tmp, k3);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a41 * k1[i] + a42 * k2[i] + a43 * k3[i]);
    f(tmp, k4);
    for (int i = 0; i < n; ++i) tmp[i] = y[i] + h * (a51 * k1[i] + a52 * k2[i] + a53 * k3[i] + a54 * k4[i]);
    f(tmp, k5);
    for (int i = 0; i < n; ++i)
      tmp[i] = y[i] + h * (a61 * k1[i] + a62 * k2[i] + a63 * k3[i] + a64 * k4[i] + a65 * k5[i]);
    f(tmp, k6);
    for (int i = 0; i < n; ++i)
      y1[i] = y[i] + h * (a71 * k1[i] + a73 * k3[i] + a74 * k4[i] + a75 * k5[i] + a76 * k6[i]);
    f(y1, k7);
    for (int i = 0; i < n; ++i)
      tmp[i] = h * (e1 * k1[i] + e3 * k3[i] + e4 * k4[i] + e5 * k5[i] + e6 * k6[i] + e7 * k7[i]);
    double err = err_norm(y, y1, tmp);
    if (!std::isfinite(err)) err = 1e10;

    if (err > 1.0) {
      h *= std::max(0.2, 0.9 * std::pow(err, -0.2));
      rejected = true;
      continue;
    }

    const double t_new = (h >= t_end - t) ? t_end : t + h;
    for (int i = 0; i < n; ++i) {
      const double dy = y1[i] - y[i];
      const double bspl = h * k1[i] - dy;
      r2[i] = dy;
      r3[i] = bspl;
      r4[i] = dy - h * k7[i] - bspl;
      r5[i] = h * (d1 * k1[i] + d3 * k3[i] + d4 * k4[i] + d5 * k5[i] + d6 * k6[i] + d7 * k7[i]);
    }
    for (int i = 0; i < n; ++i) {
      if (!std::isfinite(y1[i])) return StepOutcome::kNonFinite;
    }
    while (next < times.size() && times[next] <= t_new) {
      if (times[next] == t_new) {
        if (!sink(next++, std::span<const double>(y1, n))) return StepOutcome::kOk;
        continue;
      }
      const double s = (times[next] - t) / h;
      const double s1 = 1.0 - s;
      for (int i = 0; i < n; ++i) tmp[i] = y[i] + s * (r2[i] + s1 * (r3[i] + s * (r4[i] + s1 * r5[i])));
      if (!sink(next++, std::span<const double>(tmp, n))) return StepOutcome::kOk;
    }
    std::copy(y1, y1 + n, y);
    std::copy(k7, k7 + n, k1);
    t = t_new;

    double fac = err == 0.0 ? 10.0 : 0.9 * std::pow(err, -0.2);
    fac = std::clamp(fac, 0.2, rejected ? 1.0 : 10.0);
    h *= fac;
    rejected = false;
  }
  return StepOutcome::kOk;
}

}  // namespace kinmech::detail
