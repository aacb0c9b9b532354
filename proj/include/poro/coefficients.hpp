#pragma once

#include <vector>

#include "poro/cell_solvers.hpp"
#include "poro/geometry.hpp"

namespace poro {

struct PermeabilitySample {
  Complex lambda;
  CMat K; // dim x dim, complex symmetric
};

/// Homogenized constants. Voigt convention: (11,22,33,23,13,12) in 3D,
/// (11,22,12) in 2D, engineering shear factors handled inside the Voigt
/// strain vectors only.
struct EffectiveCoefficients {
  int dim = 2;
  Mat q_voigt;   // effective elasticity, full Voigt symmetry
  Mat beta_ij;   // dim x dim symmetric pressure-coupling matrix
  double beta = 0.0;
  double Pi = 0.0;    // fluid volume fraction
  double gamma = 0.0; // c0^2 rho_f
  double delta = 0.0; // (Pi/gamma + beta)^-1
  double rho_s = 0.0, rho_f = 0.0;
  std::vector<PermeabilitySample> K_samples;

  double mean_density() const { return (1.0 - Pi) * rho_s + Pi * rho_f; }
};

/// q_ijkl := q(chi_ij - p_ij, chi_kl - p_kl) with the affine fields p_ij
/// carried per element as exact constant strains.
Mat compute_q(const VoxelMesh& mesh, const ElasticModel& model,
              const std::vector<Vec>& chi_ij);

/// beta_ij = -int_{Y_s} div chi_ij, beta = int_{Y_s} div chi, with the
/// cross-check beta = q(chi,chi). Tiny negative beta from roundoff is clipped
/// to zero; anything below -1e-12 aborts.
std::pair<Mat, double> compute_betas(const VoxelMesh& mesh, const ElasticModel& model,
                                     const Vec& chi, const std::vector<Vec>& chi_ij);

double compute_delta(double Pi, double gamma, double beta);

/// Collects K(lambda) from dynamic cell solutions (sorted by input order).
std::vector<PermeabilitySample> compute_permeability(
    const std::vector<DynamicCellSolution>& solutions);

/// Richardson extrapolation of lambda^2 rho_f K(lambda) over the decade
/// below the largest sampled |lambda|; returns the limit matrix and fills
/// `error_estimate` with the first-vs-second order extrapolant spread.
Mat high_lambda_limit(const std::vector<PermeabilitySample>& samples, double rho_f,
                      double* error_estimate = nullptr);

/// Full pipeline on one cell: static correctors, coefficients, K on a lambda
/// grid (parallel over lambda when threads > 1).
EffectiveCoefficients compute_effective_coefficients(const PhaseCell& cell,
                                                     const std::vector<Complex>& lambdas,
                                                     int threads = 1);

/// Default dynamic sampling grid: 24 log-spaced real points in [1e-2, 1e4].
std::vector<Complex> default_lambda_grid();

} // namespace poro
