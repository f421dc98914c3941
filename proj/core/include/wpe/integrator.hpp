#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <stdexcept>
#include <string>
#include <vector>

#include "wpe/model.hpp"
#include "wpe/params.hpp"
#include "wpe/state.hpp"

namespace wpe {

struct IntegratorConfig {
  double rel_tol = 1e-3;
  double abs_tol = 1e-6;
  double t_end = 2000.0;
  double max_step = 0.0;  // 0 -> t_end / 10
  double sample_dt = 0.05;
  // Added to the initial velocity when the run starts exactly on a fixed
  // point; replaces the round-off noise an adaptive solver would otherwise
  // rely on to leave an unstable equilibrium.
  double initial_perturbation = 1e-8;

  double effective_max_step() const { return max_step > 0.0 ? max_step : t_end / 10.0; }

  void validate() const {
    if (!(rel_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: rel_tol must be > 0");
    if (!(abs_tol > 0.0)) throw std::invalid_argument("IntegratorConfig: abs_tol must be > 0");
    if (!(t_end > 0.0)) throw std::invalid_argument("IntegratorConfig: t_end must be > 0");
    if (max_step < 0.0) throw std::invalid_argument("IntegratorConfig: max_step must be >= 0");
    if (!(sample_dt > 0.0)) throw std::invalid_argument("IntegratorConfig: sample_dt must be > 0");
    if (sample_dt > t_end) throw std::invalid_argument("IntegratorConfig: sample_dt must be <= t_end");
    if (!(initial_perturbation >= 0.0))
      throw std::invalid_argument("IntegratorConfig: initial_perturbation must be >= 0");
  }

  bool operator==(const IntegratorConfig&) const = default;
};

/// Integration failure (step-size underflow or a non-finite state), carrying
/// the time at which the run broke down.
class IntegrationError : public std::runtime_error {
 public:
  IntegrationError(const std::string& what, double t)
      : std::runtime_error(what + " at t = " + std::to_string(t)), t_(t) {}
  double time() const { return t_; }

 private:
  double t_;
};

/// Raw sampled output of an integration run, before being wrapped into a
/// model-level Trajectory.
template <std::size_t N>
struct Samples {
  std::vector<double> times;
  std::vector<std::array<double, N>> states;
};

namespace detail {

// Dormand-Prince 5(4) tableau.
inline constexpr double kC2 = 1.0 / 5, kC3 = 3.0 / 10, kC4 = 4.0 / 5, kC5 = 8.0 / 9;
inline constexpr double kA21 = 1.0 / 5;
inline constexpr double kA31 = 3.0 / 40, kA32 = 9.0 / 40;
inline constexpr double kA41 = 44.0 / 45, kA42 = -56.0 / 15, kA43 = 32.0 / 9;
inline constexpr double kA51 = 19372.0 / 6561, kA52 = -25360.0 / 2187,
                        kA53 = 64448.0 / 6561, kA54 = -212.0 / 729;
inline constexpr double kA61 = 9017.0 / 3168, kA62 = -355.0 / 33, kA63 = 46732.0 / 5247,
                        kA64 = 49.0 / 176, kA65 = -5103.0 / 18656;
inline constexpr double kB1 = 35.0 / 384, kB3 = 500.0 / 1113, kB4 = 125.0 / 192,
                        kB5 = -2187.0 / 6784, kB6 = 11.0 / 84;
// 5th-order minus embedded 4th-order weights (error estimate).
inline constexpr double kE1 = 71.0 / 57600, kE3 = -71.0 / 16695, kE4 = 71.0 / 1920,
                        kE5 = -17253.0 / 339200, kE6 = 22.0 / 525, kE7 = -1.0 / 40;
// 4th-order dense-output coefficients.
inline constexpr double kD1 = -12715105075.0 / 11282082432.0;
inline constexpr double kD3 = 87487479700.0 / 32700410799.0;
inline constexpr double kD4 = -10690763975.0 / 1880347072.0;
inline constexpr double kD5 = 701980252875.0 / 199316789632.0;
inline constexpr double kD6 = -1453857185.0 / 822651844.0;
inline constexpr double kD7 = 69997945.0 / 29380423.0;

template <std::size_t N>
bool all_finite(const std::array<double, N>& y) {
  for (double c : y)
    if (!std::isfinite(c)) return false;
  return true;
}

// One Dormand-Prince step from (t, y) with derivative k1 = f(t, y).
// Fills y_new, the error estimate scaled by h, and stages k3..k7
// (k7 = f(t+h, y_new), reusable as the next step's k1).
template <std::size_t N, class Rhs>
void dopri5_stage(Rhs& rhs, double t, double h, const std::array<double, N>& y,
                  const std::array<double, N>& k1, std::array<double, N>& y_new,
                  std::array<double, N>& err_vec, std::array<double, N>& k3,
                  std::array<double, N>& k4, std::array<double, N>& k5,
                  std::array<double, N>& k6, std::array<double, N>& k7) {
  std::array<double, N> tmp;
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * kA21 * k1[i];
  const std::array<double, N> k2 = rhs(t + kC2 * h, tmp);
  for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * (kA31 * k1[i] + kA32 * k2[i]);
  k3 = rhs(t + kC3 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (kA41 * k1[i] + kA42 * k2[i] + kA43 * k3[i]);
  k4 = rhs(t + kC4 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] + h * (kA51 * k1[i] + kA52 * k2[i] + kA53 * k3[i] + kA54 * k4[i]);
  k5 = rhs(t + kC5 * h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    tmp[i] = y[i] +
             h * (kA61 * k1[i] + kA62 * k2[i] + kA63 * k3[i] + kA64 * k4[i] + kA65 * k5[i]);
  k6 = rhs(t + h, tmp);
  for (std::size_t i = 0; i < N; ++i)
    y_new[i] =
        y[i] + h * (kB1 * k1[i] + kB3 * k3[i] + kB4 * k4[i] + kB5 * k5[i] + kB6 * k6[i]);
  k7 = rhs(t + h, y_new);
  for (std::size_t i = 0; i < N; ++i)
    err_vec[i] = h * (kE1 * k1[i] + kE3 * k3[i] + kE4 * k4[i] + kE5 * k5[i] + kE6 * k6[i] +
                      kE7 * k7[i]);
}

// Starting step size (Hairer's hinit-style heuristic, order 5).
template <std::size_t N, class Rhs>
double initial_step(Rhs& rhs, const std::array<double, N>& y0,
                    const std::array<double, N>& f0, double rel_tol, double abs_tol,
                    double h_max) {
  double d0 = 0.0, d1 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y0[i]);
    d0 += (y0[i] / sc) * (y0[i] / sc);
    d1 += (f0[i] / sc) * (f0[i] / sc);
  }
  d0 = std::sqrt(d0 / N);
  d1 = std::sqrt(d1 / N);
  double h0 = (d0 < 1e-5 || d1 < 1e-5) ? 1e-6 : 0.01 * d0 / d1;
  h0 = std::min(h0, h_max);

  std::array<double, N> y1;
  for (std::size_t i = 0; i < N; ++i) y1[i] = y0[i] + h0 * f0[i];
  const std::array<double, N> f1 = rhs(h0, y1);
  double d2 = 0.0;
  for (std::size_t i = 0; i < N; ++i) {
    const double sc = abs_tol + rel_tol * std::abs(y0[i]);
    d2 += ((f1[i] - f0[i]) / sc) * ((f1[i] - f0[i]) / sc);
  }
  d2 = std::sqrt(d2 / N) / h0;

  double h1;
  if (std::max(d1, d2) <= 1e-15)
    h1 = std::max(1e-6, h0 * 1e-3);
  else
    h1 = std::pow(0.01 / std::max(d1, d2), 0.2);
  return std::min({100.0 * h0, h1, h_max});
}

// Sample times 0, sample_dt, 2*sample_dt, ..., with the final sample pinned
// to t_end.
inline std::vector<double> sample_grid(double t_end, double sample_dt) {
  std::vector<double> times;
  const auto m = static_cast<std::size_t>(std::floor(t_end / sample_dt * (1.0 + 1e-12)));
  times.reserve(m + 2);
  for (std::size_t i = 0; i <= m; ++i) {
    const double t = std::min(static_cast<double>(i) * sample_dt, t_end);
    if (!times.empty() && !(t > times.back())) break;
    times.push_back(t);
  }
  if (t_end - times.back() > 1e-9 * sample_dt)
    times.push_back(t_end);
  else
    times.back() = t_end;
  return times;
}

}  // namespace detail

/// Adaptive Dormand-Prince 5(4) integration of y' = rhs(t, y) over
/// [0, cfg.t_end], sampled on the uniform sample_dt grid through the method's
/// 4th-order dense output.  Deterministic for fixed inputs.
///
/// Throws IntegrationError on step-size underflow or a non-finite state.
template <std::size_t N, class Rhs>
Samples<N> integrate(Rhs&& rhs, const std::array<double, N>& y0, const IntegratorConfig& cfg) {
  cfg.validate();
  if (!detail::all_finite(y0)) throw IntegrationError("non-finite initial state", 0.0);

  const double h_max = cfg.effective_max_step();
  const std::vector<double> sample_times = detail::sample_grid(cfg.t_end, cfg.sample_dt);

  Samples<N> out;
  out.times.reserve(sample_times.size());
  out.states.reserve(sample_times.size());

  std::array<double, N> y = y0;
  std::array<double, N> k1 = rhs(0.0, y);
  double t = 0.0;
  double h = detail::initial_step(rhs, y, k1, cfg.rel_tol, cfg.abs_tol, h_max);

  std::size_t next_sample = 0;
  if (!sample_times.empty() && sample_times[0] == 0.0) {
    out.times.push_back(0.0);
    out.states.push_back(y);
    next_sample = 1;
  }

  // PI step-size controller constants (classical dopri5 values); fac bounds
  // keep the accepted-step ratio h_new/h inside [1/kFacMax, 1/kFacMin].
  constexpr double kSafe = 0.9, kBeta = 0.04, kExpo1 = 0.2 - kBeta * 0.75;
  constexpr double kFacMin = 0.1, kFacMax = 5.0;
  double facold = 1e-4;
  bool rejected = false;

  std::array<double, N> y_new, err_vec, k3, k4, k5, k6, k7;
  std::size_t n_steps = 0;
  constexpr std::size_t kMaxSteps = 200'000'000;

  while (t < cfg.t_end) {
    if (++n_steps > kMaxSteps) throw IntegrationError("step count exceeded", t);
    const double h_floor =
        std::max(std::abs(t) * 4.0 * std::numeric_limits<double>::epsilon(), 1e-14);
    if (h <= h_floor) throw IntegrationError("step size underflow", t);
    const bool last = t + h >= cfg.t_end;
    if (last) h = cfg.t_end - t;

    detail::dopri5_stage(rhs, t, h, y, k1, y_new, err_vec, k3, k4, k5, k6, k7);

    double err = 0.0;
    for (std::size_t i = 0; i < N; ++i) {
      const double sc =
          cfg.abs_tol + cfg.rel_tol * std::max(std::abs(y[i]), std::abs(y_new[i]));
      const double e = err_vec[i] / sc;
      err += e * e;
    }
    err = std::sqrt(err / N);

    if (!std::isfinite(err)) {
      // Derivatives blew up inside the step; retry much smaller.
      h *= 0.1;
      rejected = true;
      continue;
    }

    const double fac11 = std::pow(err, kExpo1);
    if (err <= 1.0) {
      if (!detail::all_finite(y_new)) throw IntegrationError("non-finite state", t + h);

      // Dense output over [t, t+h].
      std::array<double, N> rc3, rc4, rc5;
      for (std::size_t i = 0; i < N; ++i) {
        const double ydiff = y_new[i] - y[i];
        const double bspl = h * k1[i] - ydiff;
        rc3[i] = bspl;
        rc4[i] = ydiff - h * k7[i] - bspl;
        rc5[i] = h * (detail::kD1 * k1[i] + detail::kD3 * k3[i] + detail::kD4 * k4[i] +
                      detail::kD5 * k5[i] + detail::kD6 * k6[i] + detail::kD7 * k7[i]);
      }
      const double t_new = last ? cfg.t_end : t + h;
      while (next_sample < sample_times.size() && sample_times[next_sample] <= t_new) {
        const double theta = std::min(1.0, std::max(0.0, (sample_times[next_sample] - t) / h));
        std::array<double, N> u;
        for (std::size_t i = 0; i < N; ++i) {
          const double ydiff = y_new[i] - y[i];
          u[i] = y[i] + theta * (ydiff + (1.0 - theta) *
                                             (rc3[i] + theta * (rc4[i] + (1.0 - theta) * rc5[i])));
        }
        out.times.push_back(sample_times[next_sample]);
        out.states.push_back(u);
        ++next_sample;
      }

      t = t_new;
      y = y_new;
      k1 = k7;  // first-same-as-last
      double fac = fac11 / std::pow(facold, kBeta);
      fac = std::max(kFacMin, std::min(kFacMax, fac / kSafe));
      double h_new = h / fac;
      if (rejected) h_new = std::min(h_new, h);
      facold = std::max(err, 1e-4);
      rejected = false;
      h = std::min(h_new, h_max);
    } else {
      h = h / std::min(kFacMax, fac11 / kSafe);
      rejected = true;
    }
  }

  // Guard against a pathological sample grid (should be fully drained above).
  while (next_sample < sample_times.size()) {
    out.times.push_back(sample_times[next_sample++]);
    out.states.push_back(y);
  }
  return out;
}

/// Classical fixed-step RK4; the reference integrator for convergence tests.
template <std::size_t N, class Rhs>
Samples<N> integrate_fixed_rk4(Rhs&& rhs, const std::array<double, N>& y0, double dt,
                               double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_fixed_rk4: dt must be > 0");
  if (!(t_end > 0.0)) throw std::invalid_argument("integrate_fixed_rk4: t_end must be > 0");
  if (!detail::all_finite(y0)) throw IntegrationError("non-finite initial state", 0.0);

  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  Samples<N> out;
  out.times.reserve(n + 1);
  out.states.reserve(n + 1);
  out.times.push_back(0.0);
  out.states.push_back(y0);

  std::array<double, N> y = y0, k1, k2, k3, k4, tmp;
  double t = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    const double h = std::min(dt, t_end - t);
    k1 = rhs(t, y);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k1[i];
    k2 = rhs(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + 0.5 * h * k2[i];
    k3 = rhs(t + 0.5 * h, tmp);
    for (std::size_t i = 0; i < N; ++i) tmp[i] = y[i] + h * k3[i];
    k4 = rhs(t + h, tmp);
    for (std::size_t i = 0; i < N; ++i)
      y[i] += h / 6.0 * (k1[i] + 2.0 * k2[i] + 2.0 * k3[i] + k4[i]);
    t = (step + 1 == n) ? t_end : t + h;
    if (!detail::all_finite(y)) throw IntegrationError("non-finite state", t);
    out.times.push_back(t);
    out.states.push_back(y);
  }
  return out;
}

/// Fixed-step run of the Dormand-Prince 5th-order formula (no step control);
/// exists so tests can measure the underlying method's convergence order.
template <std::size_t N, class Rhs>
Samples<N> integrate_fixed_dopri5(Rhs&& rhs, const std::array<double, N>& y0, double dt,
                                  double t_end) {
  if (!(dt > 0.0)) throw std::invalid_argument("integrate_fixed_dopri5: dt must be > 0");
  if (!detail::all_finite(y0)) throw IntegrationError("non-finite initial state", 0.0);

  const auto n = static_cast<std::size_t>(std::ceil(t_end / dt - 1e-9));
  Samples<N> out;
  out.times.push_back(0.0);
  out.states.push_back(y0);
  std::array<double, N> y = y0, k1 = rhs(0.0, y);
  std::array<double, N> y_new, err_vec, k3, k4, k5, k6, k7;
  double t = 0.0;
  for (std::size_t step = 0; step < n; ++step) {
    const double h = std::min(dt, t_end - t);
    detail::dopri5_stage(rhs, t, h, y, k1, y_new, err_vec, k3, k4, k5, k6, k7);
    y = y_new;
    k1 = k7;
    t = (step + 1 == n) ? t_end : t + h;
    if (!detail::all_finite(y)) throw IntegrationError("non-finite state", t);
    out.times.push_back(t);
    out.states.push_back(y);
  }
  return out;
}

/// Adaptive integration keeping only the terminal state (used by the
/// Lyapunov estimator, which renormalizes between short segments).
template <std::size_t N, class Rhs>
std::array<double, N> integrate_terminal(Rhs&& rhs, const std::array<double, N>& y0,
                                         const IntegratorConfig& cfg) {
  Samples<N> s = integrate(rhs, y0, cfg);
  return s.states.back();
}

/// Full-system run from s0 with the fixed-point perturbation rule applied.
Trajectory4 simulate_full(const Params& p, const State4& s0, const IntegratorConfig& cfg);

/// Low-memory run from s0 with the fixed-point perturbation rule applied.
Trajectory2 simulate_lowmem(const Params& p, const State2& s0, const IntegratorConfig& cfg);

}  // namespace wpe
