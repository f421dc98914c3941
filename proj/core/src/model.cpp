#include "wpe/model.hpp"

#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>

namespace wpe {

double potential_sine(double x, double B) {
  const double bx = B * x;
  // Positions built as k*pi/B accumulate a few rounding errors on the way to
  // B*x, so an exact comparison against k*pi would miss them.  Snap anything
  // within a handful of ulps of k*pi to the analytic zero; the dead zone is
  // ~1e-15 relative, far below the integration tolerances.
  const double q = std::nearbyint(bx / std::numbers::pi);
  const double diff = bx - q * std::numbers::pi;
  const double tol =
      16.0 * std::numeric_limits<double>::epsilon() * std::max(1.0, std::abs(bx));
  if (std::abs(diff) <= tol) return 0.0;
  return std::sin(bx);
}

std::array<double, 4> rhs_full(const std::array<double, 4>& s, const Params& p) {
  const double v = s[1], Y = s[2], Z = s[3];
  const double force = p.A * potential_sine(s[0], p.B);
  return {v, p.sigma * (Y - v + force), -v * Z + p.r * v - Y, v * Y - Z};
}

State4 rhs_full(const State4& s, const Params& p) {
  return State4::from_array(rhs_full(s.as_array(), p));
}

std::array<double, 2> rhs_lowmem(const std::array<double, 2>& s, const Params& p) {
  const double v = s[1];
  const double force = p.A * potential_sine(s[0], p.B);
  return {v, p.sigma * ((p.r / std::numbers::e) * std::sin(v) + force - v)};
}

State2 rhs_lowmem(const State2& s, const Params& p) {
  return State2::from_array(rhs_lowmem(s.as_array(), p));
}

const char* to_string(Parity parity) {
  return parity == Parity::peak ? "peak" : "trough";
}

std::vector<Equilibrium> equilibria(const Params& p, int k_min, int k_max) {
  if (k_min > k_max) throw std::invalid_argument("equilibria: k_min must be <= k_max");
  const double half_wavelength = std::numbers::pi / p.B;
  std::vector<Equilibrium> out;
  out.reserve(static_cast<std::size_t>(k_max - k_min) + 1);
  for (int k = k_min; k <= k_max; ++k) {
    const Parity parity = (k % 2 == 0) ? Parity::peak : Parity::trough;
    out.push_back({k, static_cast<double>(k) * half_wavelength, parity});
  }
  return out;
}

State4 free_walking_state(const Params& p, int sign, double x0) {
  if (sign != 1 && sign != -1)
    throw std::invalid_argument("free_walking_state: sign must be +1 or -1");
  if (!(p.r > 1.0))
    throw std::domain_error("free_walking_state: no free-walking solution (requires r > 1)");
  const double speed = static_cast<double>(sign) * std::sqrt(p.r - 1.0);
  return State4(x0, speed, speed, p.r - 1.0);
}

}  // namespace wpe
