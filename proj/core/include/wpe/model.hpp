#pragma once

#include <array>
#include <vector>

#include "wpe/params.hpp"
#include "wpe/state.hpp"

namespace wpe {

/// sin(B*x) for the applied potential force, with the analytic zero honored:
/// when B*x lands within a few ulps of an integer multiple of pi (as happens
/// for positions assembled as k*pi/B), the exact 0 is returned so that the
/// equilibria of the model are exact fixed points of the right-hand side.
double potential_sine(double x, double B);

/// Right-hand side of the full system:
///   x'  = v
///   v'  = sigma * (Y - v + A sin(Bx))
///   Y'  = -v Z + r v - Y
///   Z'  = v Y - Z
/// where Y = wave_force and Z = wave_memory.
std::array<double, 4> rhs_full(const std::array<double, 4>& s, const Params& p);
State4 rhs_full(const State4& s, const Params& p);

/// Right-hand side of the low-memory reduction:
///   x' = v
///   v' = sigma * ((r/e) sin(v) + A sin(Bx) - v)
std::array<double, 2> rhs_lowmem(const std::array<double, 2>& s, const Params& p);
State2 rhs_lowmem(const State2& s, const Params& p);

enum class Parity { peak, trough };

const char* to_string(Parity parity);

/// One stationary equilibrium x = k*pi/B of the applied potential.
/// Even k sits on a potential peak, odd k in a trough.
struct Equilibrium {
  int k;
  double x;
  Parity parity;
};

/// All equilibria with k in [k_min, k_max].
std::vector<Equilibrium> equilibria(const Params& p, int k_min, int k_max);

/// Steady free-walking state (A = 0 equilibrium of the velocity subsystem),
/// placed at position x0 with walking direction given by sign (+1 or -1).
/// Requires r > 1; below that no real walking speed exists.
State4 free_walking_state(const Params& p, int sign, double x0);

}  // namespace wpe
