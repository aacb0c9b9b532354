#pragma once

#include <functional>
#include <vector>

#include "poro/types.hpp"

namespace poro {

enum class InversionMethod { Talbot, Weeks };

/// Numerical inverse Laplace transform contour. Talbot nodes depend on the
/// evaluation time (one node family per t); Weeks nodes sit on the vertical
/// line Re(lambda) = sigma + (Laguerre scale b), independent of t.
struct ContourSpec {
  InversionMethod method = InversionMethod::Talbot;
  int nodes = 32;      // Talbot: points on the contour; Weeks: expansion length
  double sigma = 2.0;  // Weeks shift (must exceed the abscissa of analyticity)
  double b = 1.0;      // Weeks Laguerre time scale
};

/// The lambda nodes where the transform must be sampled to invert at time t.
/// Talbot at t = 0 needs no samples (the trace value is the transform's
/// initial value, zero for our homogeneous initial conditions).
std::vector<Complex> contour_nodes(const ContourSpec& spec, double t);

/// Inverts at time t from samples taken exactly at contour_nodes(spec, t).
/// Throws ContourMismatch when the sample count disagrees.
double invert_from_samples(const ContourSpec& spec, double t,
                           const std::vector<Complex>& values);

/// Convenience: invert F at each time by sampling it on the contour.
std::vector<double> invert(const ContourSpec& spec,
                           const std::function<Complex(Complex)>& F,
                           const std::vector<double>& times);

} // namespace poro
