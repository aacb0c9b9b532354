#pragma once

#include <Eigen/Sparse>
#include <functional>
#include <iosfwd>
#include <string>

#include "poro/mesh.hpp"
#include "poro/types.hpp"

namespace poro {

using SpMat = Eigen::SparseMatrix<double>;
using SpCMat = Eigen::SparseMatrix<Complex>;
using Triplet = Eigen::Triplet<double>;

enum class DofSpace { BrokenVector, FluidPressure };

/// A real assembled operator. All lambda-dependent combinations are formed at
/// solve time, so assembly happens once per mesh regardless of the lambda grid.
struct AssembledForm {
  SpMat op;
  std::string name;
  DofSpace rows = DofSpace::BrokenVector;
  DofSpace cols = DofSpace::BrokenVector;
  double coefficient = 1.0; // scaling constant folded into op

  /// Debug dump in coordinate (row, col, value) text format.
  void dump_coordinate(std::ostream& os) const;
};

/// Elastic coefficient field: uniform a_ijkl, optionally overridden per voxel
/// (used for multi-solid test configurations such as laminates).
struct ElasticModel {
  ElasticTensor uniform;
  std::vector<Mat> per_voxel; // empty = uniform everywhere

  const Mat& at(long voxel) const {
    return per_voxel.empty() ? uniform.voigt : per_voxel[voxel];
  }
  int dim() const { return uniform.dim; }
};

enum class GradientForm { Full, Symmetrized };

/// Solid elastic form q(v,w) = int_{Y_s} a_ijkl dv^k/dy_l dw^i/dy_j.
/// With `verify_kernel` (small meshes only) the periodic-solid kernel is
/// checked to consist of translations alone; anything extra throws
/// SingularBeyondTranslations.
AssembledForm assemble_elastic(const VoxelMesh& mesh, const ElasticModel& model,
                               bool verify_kernel = false);

/// Fluid viscous form. Full: 2*mu int_{Y_f} du^i/dy_j dw^i/dy_j (the weak
/// cell-problem form). Symmetrized: 2*mu int_{Y_f} e(u):e(w).
AssembledForm assemble_fluid_viscous(const VoxelMesh& mesh, double mu,
                                     GradientForm form = GradientForm::Full);

AssembledForm assemble_fluid_mass(const VoxelMesh& mesh, double weight);
AssembledForm assemble_solid_mass(const VoxelMesh& mesh, double weight);
AssembledForm assemble_mass(const VoxelMesh& mesh, Phase phase, double weight);

/// weight * int_phase (div u)(div w); the eta and gamma compression terms.
AssembledForm assemble_div_div(const VoxelMesh& mesh, Phase phase, double weight);

/// Interface slip form alpha * int_Gamma [[u]].[[w]] with the jump
/// [[w]] = w_fluid - w_solid. One-point facet quadrature (flat facets).
AssembledForm assemble_interface(const VoxelMesh& mesh, double alpha);

/// Rectangular divergence operator B: (B u)_e = int_e div u for every voxel
/// of the given phase (row order = traversal order of that phase).
AssembledForm assemble_divergence(const VoxelMesh& mesh, Phase phase);

/// Pressure-jump stabilization on fluid P0 slots:
/// coeff * sum_faces h_face * |face| * [p][q] over fluid-fluid faces.
AssembledForm pressure_jump_stabilization(const VoxelMesh& mesh, double coeff);

/// dim row functionals w -> int_phase w_c dy (quotient-space constraints).
SpMat mean_zero_rows(const VoxelMesh& mesh, Phase phase);

/// Load vector int_phase phi_n e_comp.
Vec phase_load(const VoxelMesh& mesh, Phase phase, int comp);

/// Load vector int_Omega g(x) phi_n e_comp over both phases (each element
/// integrates against its own side's DOFs).
Vec scalar_field_load(const VoxelMesh& mesh,
                      const std::function<double(const std::array<double, 3>&)>& g, int comp);

/// Load vector w -> int_phase div w.
Vec divergence_load(const VoxelMesh& mesh, Phase phase);

/// Load vector w -> int_{Y_s} (A xi) : e(w) for a constant Voigt strain xi;
/// the right-hand side of the strain cell problems.
Vec elastic_affine_load(const VoxelMesh& mesh, const ElasticModel& model, const Vec& voigt_strain);

/// q(uA + affineA, uB + affineB) where affine parts are constant Voigt
/// strains handled exactly per element (never as periodic DOF vectors).
double elastic_energy_with_affine(const VoxelMesh& mesh, const ElasticModel& model,
                                  const Vec& uA, const Vec& voigtA, const Vec& uB,
                                  const Vec& voigtB);

/// int_phase div(u + affine) dy with an exact constant-strain affine part.
double divergence_integral_with_affine(const VoxelMesh& mesh, Phase phase, const Vec& u,
                                       const Vec& voigt_affine);

// --- subspace restriction helpers ---

SpMat restrict_matrix(const SpMat& A, const Subspace& rows, const Subspace& cols);
Vec restrict_vector(const Vec& v, const Subspace& s);
Vec prolong_vector(const Vec& sub, const Subspace& s, long full_size);
CVec prolong_vector(const CVec& sub, const Subspace& s, long full_size);

/// Element-interpolation of an affine field y -> G.y evaluated with local
/// (unwrapped) node coordinates; used to test divergence consistency on
/// fields that are not periodic.
Vec element_affine_dofs(const VoxelMesh& mesh, int i, int j, int k, const Mat& G);

/// Applies the per-element divergence to an affine field via local lifts.
Vec divergence_of_affine(const VoxelMesh& mesh, Phase phase, const Mat& G);

} // namespace poro
