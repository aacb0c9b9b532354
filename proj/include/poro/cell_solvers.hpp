#pragma once

#include <optional>
#include <vector>

#include "poro/forms.hpp"
#include "poro/mesh.hpp"
#include "poro/types.hpp"

namespace poro {

/// Mean-zero periodic correctors on the solid phase: chi responds to a unit
/// pressure load, chi_ij to unit macroscopic strains (one field per Voigt
/// slot; symmetric pairs are solved once).
struct StaticCellSolutions {
  int dim = 2;
  Vec chi;                 // full vector-DOF layout, solid side populated
  std::vector<Vec> chi_ij; // voigt_size(dim) fields
  double beta_candidate = 0.0; // q(chi,chi)
};

/// Solves the pressure cell problem q(chi,w) = int_{Y_s} div w.
Vec solve_chi(const VoxelMesh& mesh, const ElasticModel& model, double tol = 1e-10);

/// Solves the strain cell problems q(chi_ij,w) = int_{Y_s} (A xi_ij):e(w),
/// one factorization shared across the right-hand sides.
std::vector<Vec> solve_chi_ij(const VoxelMesh& mesh, const ElasticModel& model,
                              double tol = 1e-10);

/// Both static families with one factorization.
StaticCellSolutions solve_static_cell(const VoxelMesh& mesh, const ElasticModel& model,
                                      double tol = 1e-10);

struct ThetaOptions {
  bool stabilize = false;    // pressure-jump stabilization (Q1-P0 checkerboard)
  double stab_coeff = 1.0;
  double tol = 1e-10;
  GradientForm viscous_form = GradientForm::Full; // sensitivity-study variant
};

/// lambda-parametrized fluid cell solution: dim velocity fields theta_p with
/// pressure multipliers enforcing elementwise div theta_p = 0; solid trace is
/// zero (space W), the slip form acts on the interface trace.
struct DynamicCellSolution {
  Complex lambda{1.0, 0.0};
  bool noslip = false;
  std::vector<CVec> theta;    // dim fields, full vector-DOF layout
  std::vector<CVec> pressure; // multipliers, one per field
  CMat K;                     // K_pq = int_{Y_f} theta_q . e_p
  CMat K_energy;              // same entries through the energy route
  double max_div = 0.0;       // max elementwise divergence violation
};

DynamicCellSolution solve_theta(const VoxelMesh& mesh, Complex lambda, double mu,
                                double rho_f, double alpha, ThetaOptions opts = {});

/// alpha -> infinity reference: interface DOFs constrained to zero. Pressure
/// is pinned per enclosed fluid component and stabilized by default (the
/// enclosed Q1-P0 pair carries checkerboard modes).
DynamicCellSolution solve_theta_noslip(const VoxelMesh& mesh, Complex lambda, double mu,
                                       double rho_f,
                                       ThetaOptions opts = {.stabilize = true});

/// Inertial-limit projection: rho_f-weighted mass solve under the divergence
/// constraint; the large-lambda limit of lambda^2 rho_f K(lambda).
Mat mass_projection_limit(const VoxelMesh& mesh, double rho_f);

/// Fluid connected components on the mesh (periodic when the mesh is).
int mesh_fluid_components(const VoxelMesh& mesh, std::vector<int>& label);

} // namespace poro
