#pragma once

#include <array>
#include <cmath>
#include <cstddef>
#include <stdexcept>
#include <utility>
#include <vector>

#include "wpe/params.hpp"

namespace wpe {

/// State of the full system: particle position and velocity plus the two
/// wave-memory variables that close the ODE system.
struct State4 {
  double x = 0.0;            // particle position
  double v = 0.0;            // particle velocity
  double wave_force = 0.0;   // wave-memory force on the particle
  double wave_memory = 0.0;  // in-phase wave-memory component

  State4() = default;
  State4(double x_, double v_, double wave_force_, double wave_memory_)
      : x(x_), v(v_), wave_force(wave_force_), wave_memory(wave_memory_) {
    if (!(std::isfinite(x) && std::isfinite(v) && std::isfinite(wave_force) &&
          std::isfinite(wave_memory)))
      throw std::invalid_argument("State4: non-finite component");
  }

  std::array<double, 4> as_array() const { return {x, v, wave_force, wave_memory}; }
  static State4 from_array(const std::array<double, 4>& a) {
    return State4(a[0], a[1], a[2], a[3]);
  }

  bool operator==(const State4&) const = default;
};

/// State of the low-memory reduction: position and velocity only.
struct State2 {
  double x = 0.0;
  double v = 0.0;

  State2() = default;
  State2(double x_, double v_) : x(x_), v(v_) {
    if (!(std::isfinite(x) && std::isfinite(v)))
      throw std::invalid_argument("State2: non-finite component");
  }

  std::array<double, 2> as_array() const { return {x, v}; }
  static State2 from_array(const std::array<double, 2>& a) { return State2(a[0], a[1]); }

  bool operator==(const State2&) const = default;
};

/// Time-stamped state sequence from one integration run.
template <class S>
struct Trajectory {
  std::vector<double> times;
  std::vector<S> states;
  Params params;

  Trajectory(std::vector<double> times_, std::vector<S> states_, const Params& params_)
      : times(std::move(times_)), states(std::move(states_)), params(params_) {
    if (times.empty() || times.size() != states.size())
      throw std::invalid_argument("Trajectory: times and states must be non-empty and equal length");
    if (!(times.front() >= 0.0))
      throw std::invalid_argument("Trajectory: first time must be >= 0");
    for (std::size_t i = 1; i < times.size(); ++i)
      if (!(times[i] > times[i - 1]))
        throw std::invalid_argument("Trajectory: times must be strictly increasing");
  }

  std::size_t size() const { return times.size(); }
};

using Trajectory4 = Trajectory<State4>;
using Trajectory2 = Trajectory<State2>;

}  // namespace wpe
