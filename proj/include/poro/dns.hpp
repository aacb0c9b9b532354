#pragma once

#include "poro/geometry.hpp"
#include "poro/macro.hpp"
#include "poro/mesh.hpp"

namespace poro {

/// Fine-scale composite configuration: Omega = (0, extent)^2 paved by
/// `cells` copies of the base cell per axis (epsilon = extent/cells), each
/// discretized with `density` voxels per axis (a multiple of the base
/// resolution).
struct DnsConfig {
  PhaseCell base;
  int cells = 2;
  int density = 0; // 0: use the base resolution
  Complex lambda{2.0, 0.0};
  MacroForcing forcing;
  double extent = 1.0;
  bool conforming = false; // continuous-displacement reference variant
};

struct DnsResult {
  VoxelMesh mesh;
  Complex lambda;
  double epsilon = 0.0;
  CVec u; // full broken-space DOF layout (Dirichlet nodes zero)
  double residual = 0.0;
  // sesquilinear energy components of the solution (real, nonnegative)
  double elastic_energy = 0.0;     // int_s a E(u):conj(E(u))
  double compression_energy = 0.0; // gamma int_f |div u|^2
  double viscous_energy = 0.0;     // eps^2 b(u, conj u)
  double interface_energy = 0.0;   // eps alpha |[[u]]|^2 on Gamma_eps
  double coercivity_witness = 0.0; // Re((1/lambda) a^eps(u,u))
  double galerkin_gap = 0.0;       // |a^eps(u,u) - <f,u>| / |<f,u>|
  CVec solid_average, fluid_average;
};

/// Solves the fine-scale problem at fixed (epsilon, lambda) on the broken
/// space with the eps-scaled viscous and slip terms.
DnsResult solve_eps_problem(const DnsConfig& config);

/// Same solve on a caller-supplied box mesh (degenerate single-phase test
/// configurations skip the two-phase validation).
DnsResult solve_eps_on_mesh(VoxelMesh mesh, const MaterialParams& materials, double epsilon,
                            Complex lambda, const MacroForcing& forcing, double extent);

struct GapEntry {
  double epsilon = 0.0;
  double gap = 0.0;           // L2 distance of cell averages to u + <u_r>
  double dns_norm = 0.0;      // L2 norm of the averaged fine-scale field
  double macro_norm = 0.0;    // L2 norm of u + <u_r> at cell centers
};

/// Per-epsilon-cell average of the fine-scale solution against the
/// homogenized field u0 = u + <u_r> at cell centers.
GapEntry homogenization_gap(const DnsResult& dns, const MacroSolution& macro,
                            const MacroField& field);

} // namespace poro
