#include "poro/mesh.hpp"

#include "poro/errors.hpp"

namespace poro {

void VoxelMesh::element_nodes(int i, int j, int k, std::array<long, 8>& out) const {
  int ln = 1 << dim;
  for (int l = 0; l < ln; ++l) {
    long ni = i + (l & 1);
    long nj = j + ((l >> 1) & 1);
    long nk = k + ((l >> 2) & 1);
    if (periodic) {
      ni %= nn[0];
      nj %= nn[1];
      if (dim == 3) nk %= nn[2];
    }
    out[l] = node_index(ni, nj, dim == 3 ? nk : 0);
  }
}

namespace {

void assign_blocks(VoxelMesh& m) {
  m.n_nodes = 1;
  for (int d = 0; d < m.dim; ++d) {
    m.nn[d] = m.periodic ? m.nv[d] : m.nv[d] + 1;
    m.n_nodes *= m.nn[d];
  }
  for (int d = m.dim; d < 3; ++d) m.nn[d] = 1;

  std::array<std::vector<char>, 2> touched;
  touched[0].assign(m.n_nodes, 0);
  touched[1].assign(m.n_nodes, 0);
  std::array<long, 8> nodes{};
  for (int k = 0; k < (m.dim == 3 ? m.nv[2] : 1); ++k)
    for (int j = 0; j < m.nv[1]; ++j)
      for (int i = 0; i < m.nv[0]; ++i) {
        int side = m.phase[m.voxel_index(i, j, k)] == Phase::Solid ? 0 : 1;
        m.element_nodes(i, j, k, nodes);
        for (int l = 0; l < (1 << m.dim); ++l) touched[side][nodes[l]] = 1;
      }

  m.side_block[0].assign(m.n_nodes, -1);
  m.side_block[1].assign(m.n_nodes, -1);
  if (m.broken_interface) {
    for (int side = 0; side < 2; ++side) {
      long count = 0;
      for (long n = 0; n < m.n_nodes; ++n)
        if (touched[side][n]) m.side_block[side][n] = count++;
      m.n_blocks[side] = count;
    }
  } else {
    // Conforming variant: a single shared block per touched node.
    long count = 0;
    for (long n = 0; n < m.n_nodes; ++n)
      if (touched[0][n] || touched[1][n]) m.side_block[0][n] = count++;
    m.side_block[1] = m.side_block[0];
    m.n_blocks[0] = count;
    m.n_blocks[1] = 0;
  }

  m.fluid_voxel_id.assign(m.voxel_count(), -1);
  long fcount = 0;
  for (long v = 0; v < m.voxel_count(); ++v)
    if (m.phase[v] == Phase::Fluid) m.fluid_voxel_id[v] = fcount++;
  m.n_fluid_voxels = fcount;
}

} // namespace

VoxelMesh build_periodic_mesh_raw(int dim, int resolution, std::vector<Phase> phase) {
  VoxelMesh m;
  m.dim = dim;
  m.nv = {resolution, resolution, dim == 3 ? resolution : 1};
  double h = 1.0 / resolution;
  m.h = {h, h, h};
  m.origin = {-0.5, -0.5, dim == 3 ? -0.5 : 0.0};
  m.periodic = true;
  m.broken_interface = true;
  m.phase = std::move(phase);
  long count = 1;
  for (int d = 0; d < dim; ++d) count *= resolution;
  if (static_cast<long>(m.phase.size()) != count)
    throw GeometryError("phase array size does not match resolution^dim");
  assign_blocks(m);
  return m;
}

VoxelMesh build_periodic_mesh(const PhaseCell& cell) {
  return build_periodic_mesh_raw(cell.dim, cell.resolution, cell.phase);
}

VoxelMesh build_box_mesh(int dim, std::array<int, 3> nv, double extent,
                         std::vector<Phase> phase, bool conforming) {
  VoxelMesh m;
  m.dim = dim;
  m.nv = nv;
  long count = 1;
  for (int d = 0; d < dim; ++d) {
    if (nv[d] < 1) throw GeometryError("box mesh needs at least one voxel per axis");
    m.h[d] = extent / nv[d];
    count *= nv[d];
  }
  m.origin = {0, 0, 0};
  m.periodic = false;
  m.broken_interface = !conforming;
  if (static_cast<long>(phase.size()) != count)
    throw GeometryError("phase array size does not match box dimensions");
  m.phase = std::move(phase);
  assign_blocks(m);
  return m;
}

Subspace Subspace::from_mask(const std::vector<char>& keep_mask) {
  Subspace s;
  s.full_to_sub.assign(keep_mask.size(), -1);
  for (size_t i = 0; i < keep_mask.size(); ++i)
    if (keep_mask[i]) {
      s.full_to_sub[i] = static_cast<long>(s.keep.size());
      s.keep.push_back(static_cast<long>(i));
    }
  return s;
}

namespace {

std::vector<char> side_mask(const VoxelMesh& mesh, int side, bool drop_boundary) {
  std::vector<char> mask(mesh.vector_dofs(), 0);
  for (long k = 0; k < (mesh.dim == 3 ? mesh.nn[2] : 1); ++k)
    for (long j = 0; j < mesh.nn[1]; ++j)
      for (long i = 0; i < mesh.nn[0]; ++i) {
        long n = mesh.node_index(i, j, k);
        if (drop_boundary && mesh.node_on_boundary(i, j, k)) continue;
        for (int c = 0; c < mesh.dim; ++c) {
          long d = mesh.vdof(n, side, c);
          if (d >= 0) mask[d] = 1;
        }
      }
  return mask;
}

} // namespace

Subspace side_subspace(const VoxelMesh& mesh, int side, bool drop_boundary) {
  return Subspace::from_mask(side_mask(mesh, side, drop_boundary));
}

Subspace broken_subspace(const VoxelMesh& mesh, bool drop_boundary) {
  auto m0 = side_mask(mesh, 0, drop_boundary);
  if (mesh.broken_interface) {
    auto m1 = side_mask(mesh, 1, drop_boundary);
    for (size_t i = 0; i < m0.size(); ++i) m0[i] = m0[i] || m1[i];
  }
  return Subspace::from_mask(m0);
}

Subspace fluid_noslip_subspace(const VoxelMesh& mesh) {
  auto mask = side_mask(mesh, 1, false);
  // Remove fluid DOFs at nodes that also carry a solid trace (nodes on Gamma).
  for (long n = 0; n < mesh.n_nodes; ++n) {
    if (mesh.side_block[0][n] < 0 || mesh.side_block[1][n] < 0) continue;
    for (int c = 0; c < mesh.dim; ++c) {
      long d = mesh.vdof(n, 1, c);
      if (d >= 0) mask[d] = 0;
    }
  }
  return Subspace::from_mask(mask);
}

} // namespace poro
