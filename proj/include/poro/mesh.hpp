#pragma once

#include <array>
#include <cstdint>
#include <vector>

#include "poro/geometry.hpp"
#include "poro/types.hpp"

namespace poro {

/// Structured voxel mesh with multilinear (Q1) vector elements per voxel and
/// one constant pressure slot per fluid voxel.
///
/// Nodes incident to both phases carry two vector DOF blocks (solid trace and
/// fluid trace) so that fields may jump across the interface; an element uses
/// the blocks of its own phase. With `periodic` set, opposite faces share
/// nodes (index arithmetic mod n), otherwise the mesh is a Dirichlet box.
struct VoxelMesh {
  int dim = 2;
  std::array<int, 3> nv{1, 1, 1};   // voxels per axis
  std::array<double, 3> h{1, 1, 1}; // voxel extent per axis
  std::array<double, 3> origin{0, 0, 0};
  bool periodic = true;
  bool broken_interface = true; // doubled DOFs on the interface
  std::vector<Phase> phase;     // per voxel, x-fastest

  std::array<long, 3> nn{1, 1, 1}; // nodes per axis
  long n_nodes = 0;

  // side 0 = solid trace, side 1 = fluid trace
  std::array<std::vector<std::int64_t>, 2> side_block; // node -> block or -1
  std::array<long, 2> n_blocks{0, 0};

  std::vector<std::int64_t> fluid_voxel_id; // voxel -> pressure slot or -1
  long n_fluid_voxels = 0;

  long voxel_count() const {
    long n = 1;
    for (int d = 0; d < dim; ++d) n *= nv[d];
    return n;
  }
  long voxel_index(int i, int j, int k = 0) const {
    return i + static_cast<long>(nv[0]) * (j + static_cast<long>(nv[1]) * k);
  }
  long node_index(long i, long j, long k = 0) const {
    return i + nn[0] * (j + nn[1] * k);
  }
  double element_measure() const {
    double v = 1.0;
    for (int d = 0; d < dim; ++d) v *= h[d];
    return v;
  }

  /// Total vector DOFs: solid blocks first, then fluid blocks.
  long vector_dofs() const { return (n_blocks[0] + n_blocks[1]) * dim; }
  long fluid_dof_offset() const { return n_blocks[0] * dim; }

  /// Full vector DOF index of (node, side, component); -1 if that side is
  /// absent at the node.
  long vdof(long node, int side, int comp) const {
    std::int64_t b = side_block[side][node];
    if (b < 0) return -1;
    return (side == 0 ? 0 : fluid_dof_offset()) + b * dim + comp;
  }

  /// Lattice coordinates of the 2^dim nodes of a voxel, x-fastest local order.
  void element_nodes(int i, int j, int k, std::array<long, 8>& out) const;

  /// Physical coordinate of a node.
  std::array<double, 3> node_coord(long i, long j, long k = 0) const {
    return {origin[0] + i * h[0], origin[1] + j * h[1], origin[2] + k * h[2]};
  }

  bool node_on_boundary(long i, long j, long k = 0) const {
    if (periodic) return false;
    for (int d = 0; d < dim; ++d) {
      long c = d == 0 ? i : (d == 1 ? j : k);
      if (c == 0 || c == nn[d] - 1) return true;
    }
    return false;
  }
};

/// Periodic unit-cell mesh of a PhaseCell (element size 1/res, origin -1/2).
VoxelMesh build_periodic_mesh(const PhaseCell& cell);

/// Periodic mesh from a raw phase array, skipping cell validation (degenerate
/// configurations in diagnostics and tests).
VoxelMesh build_periodic_mesh_raw(int dim, int resolution, std::vector<Phase> phase);

/// Non-periodic box mesh over [0,extent]^dim with an explicit phase array;
/// used by the fine-scale solver. `conforming` drops the interface doubling.
VoxelMesh build_box_mesh(int dim, std::array<int, 3> nv, double extent,
                         std::vector<Phase> phase, bool conforming = false);

/// Index set selecting a subset of the full vector DOFs (e.g. one side of the
/// broken space, or the DOFs surviving Dirichlet elimination).
struct Subspace {
  std::vector<long> keep;        // sub index -> full index
  std::vector<long> full_to_sub; // full index -> sub index or -1

  long size() const { return static_cast<long>(keep.size()); }
  static Subspace from_mask(const std::vector<char>& keep_mask);
};

/// Subspace of one side's DOFs (0 = solid trace, 1 = fluid trace), optionally
/// excluding Dirichlet boundary nodes (non-periodic meshes).
Subspace side_subspace(const VoxelMesh& mesh, int side, bool drop_boundary = false);

/// Subspace of all DOFs (both sides), optionally excluding boundary nodes.
Subspace broken_subspace(const VoxelMesh& mesh, bool drop_boundary = false);

/// Fluid-side subspace with interface-node DOFs removed (no-slip space).
Subspace fluid_noslip_subspace(const VoxelMesh& mesh);

} // namespace poro
