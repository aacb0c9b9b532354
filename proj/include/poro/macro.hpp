#pragma once

#include <array>
#include <vector>

#include "poro/coefficients.hpp"
#include "poro/laplace.hpp"
#include "poro/types.hpp"

namespace poro {

/// Macroscopic domain: interval (0,L) or rectangle (0,Lx)x(0,Ly) with
/// homogeneous Dirichlet displacement on the whole boundary.
struct MacroDomain {
  int dim = 1;
  std::array<double, 2> extent{1.0, 1.0};
  std::array<int, 2> elements{256, 1};
};

/// Separable forcing f(lambda, x) = g(x) e_component * profile(lambda) with
/// g a product of sine modes (vanishes on the boundary).
struct MacroForcing {
  enum class TimeProfile { Impulse, Step, Ramp };
  int component = 0;
  std::array<int, 2> mode{1, 1};
  TimeProfile profile = TimeProfile::Impulse;

  Complex transform(Complex lambda) const {
    switch (profile) {
      case TimeProfile::Impulse: return Complex(1.0);
      case TimeProfile::Step: return 1.0 / lambda;
      case TimeProfile::Ramp: return 1.0 / (lambda * lambda);
    }
    return Complex(1.0);
  }
  double shape(const MacroDomain& d, const std::array<double, 2>& x) const;
};

/// Reduced two-field homogenized problem in (u, p0): the relative-flow field
/// is eliminated through the dynamic permeability closure
/// <u_r> = K(lambda) (f - lambda^2 rho_f u - grad p0).
struct MacroProblem {
  MacroDomain domain;
  EffectiveCoefficients coeffs; // empty K_samples means K = 0 (sealed pores)
  MacroForcing forcing;
  std::vector<Complex> lambdas;
  double region_min = 1.0; // require Re(lambda) > region_min
};

struct MacroField {
  Complex lambda;
  CMat K;       // permeability used at this lambda
  CVec u;       // nodal displacement, dim components per node
  CVec p;       // nodal pressure
  double residual = 0.0;
};

struct MacroSolution {
  MacroDomain domain;
  double rho_f = 0.0;
  MacroForcing forcing;
  std::vector<MacroField> fields;

  const MacroField& at(Complex lambda) const;

  CVec eval_u(const MacroField& f, const std::array<double, 2>& x) const;
  Complex eval_p(const MacroField& f, const std::array<double, 2>& x) const;
  CVec eval_grad_p(const MacroField& f, const std::array<double, 2>& x) const;
  /// <u_r>(x) = K F(x), F = f_hat - lambda^2 rho_f u - grad p0.
  CVec eval_mean_ur(const MacroField& f, const std::array<double, 2>& x) const;
  /// u0 = u + <u_r> (the two-scale limit of the fine-scale displacement).
  CVec eval_u0(const MacroField& f, const std::array<double, 2>& x) const;
};

/// K(lambda) lookup against the sample table: exact hits are used directly;
/// real-lambda requests between real samples interpolate H = lambda^2 rho_f K
/// linearly in log lambda. Anything else throws MissingK.
CMat permeability_at(const EffectiveCoefficients& coeffs, Complex lambda);

/// Assembles the complex-symmetric (u, p0) block system at one lambda.
struct MacroSystem {
  SpCMat A;
  CVec b;
  long n_u = 0, n_p = 0;
  std::vector<long> u_keep; // free u DOFs -> full nodal dof index
};
MacroSystem assemble_macro(const MacroProblem& problem, Complex lambda);

MacroSolution solve_macro(const MacroProblem& problem, int threads = 1);

/// Probe traces through numerical inverse Laplace: one macro solve per
/// contour node, then inversion per probe/component. Talbot nodes that leave
/// the configured coercivity region raise OutOfRegion.
struct ProbeTraces {
  std::vector<double> times;
  // [probe][component][time]; component dim holds p0.
  std::vector<std::vector<std::vector<double>>> values;
};
ProbeTraces macro_time_traces(MacroProblem problem, const ContourSpec& contour,
                              const std::vector<std::array<double, 2>>& probes,
                              const std::vector<double>& times, int threads = 1);

/// Projects 2D-cell coefficients onto the 1D macro model (q_1111, beta_11,
/// K_11 samples).
EffectiveCoefficients reduce_to_1d(const EffectiveCoefficients& eff);

} // namespace poro
