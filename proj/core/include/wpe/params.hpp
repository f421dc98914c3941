#pragma once

#include <cmath>
#include <stdexcept>

namespace wpe {

/// Dimensionless constants of the wave-particle model.
///
/// sigma scales the particle's inverse mass, r the strength of the
/// self-generated wave force, A the strength of the applied sinusoidal
/// potential and B the ratio of the particle-generated wavelength to the
/// wavelength of the applied potential.
struct Params {
  double sigma;
  double r;
  double A;
  double B;

  Params(double sigma_, double r_, double A_, double B_)
      : sigma(sigma_), r(r_), A(A_), B(B_) {
    if (!(sigma > 0.0) || !std::isfinite(sigma))
      throw std::invalid_argument("Params: sigma must be > 0");
    if (!(r >= 0.0) || !std::isfinite(r))
      throw std::invalid_argument("Params: r must be >= 0");
    if (!(A >= 0.0) || !std::isfinite(A))
      throw std::invalid_argument("Params: A must be >= 0");
    if (!(B > 0.0) || !std::isfinite(B))
      throw std::invalid_argument("Params: B must be > 0");
  }

  bool operator==(const Params&) const = default;
};

}  // namespace wpe
