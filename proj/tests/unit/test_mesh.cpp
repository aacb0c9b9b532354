#include <doctest.h>

#include "poro/mesh.hpp"
#include "poro/verify.hpp"

using namespace poro;

TEST_CASE("2x2 cell with one fluid voxel: hand-enumerated DOF counts") {
  std::vector<Phase> phase{Phase::Fluid, Phase::Solid, Phase::Solid, Phase::Solid};
  PhaseCell cell = build_phase_cell(2, 2, std::move(phase), default_materials(2));
  VoxelMesh mesh = build_periodic_mesh(cell);

  // 4 periodic nodes; the fluid voxel's corners wrap around to touch all of
  // them, and so do the solid voxels: every node carries both traces.
  CHECK(mesh.n_nodes == 4);
  CHECK(mesh.n_blocks[0] == 4);
  CHECK(mesh.n_blocks[1] == 4);
  CHECK(mesh.vector_dofs() == 16);
  for (long n = 0; n < 4; ++n) {
    CHECK(mesh.vdof(n, 0, 0) >= 0);
    CHECK(mesh.vdof(n, 1, 0) >= 0);
    CHECK(mesh.vdof(n, 0, 0) != mesh.vdof(n, 1, 0));
  }
}

TEST_CASE("one-voxel-thick fluid stripe: fluid DOFs are the stripe rows") {
  const int res = 8;
  std::vector<Phase> phase(res * res, Phase::Solid);
  for (int i = 0; i < res; ++i) phase[i + res * 3] = Phase::Fluid;
  PhaseCell cell = build_phase_cell(2, res, std::move(phase), default_materials(2));
  VoxelMesh mesh = build_periodic_mesh(cell);

  // fluid nodes: rows j = 3 and j = 4 only
  for (long j = 0; j < res; ++j)
    for (long i = 0; i < res; ++i) {
      bool fluid_row = (j == 3 || j == 4);
      CHECK((mesh.side_block[1][mesh.node_index(i, j)] >= 0) == fluid_row);
      CHECK(mesh.side_block[0][mesh.node_index(i, j)] >= 0); // solid everywhere
    }
  // periodic identification: top row of nodes is the bottom row
  CHECK(mesh.nn[0] == res);
  CHECK(mesh.nn[1] == res);
  CHECK(mesh.n_nodes == res * res);
}

TEST_CASE("interface nodes carry exactly two distinct vector DOF sets") {
  MaterialParams m = default_materials(2);
  PhaseCell cell = random_geometry(2, 8, 17, m);
  VoxelMesh mesh = build_periodic_mesh(cell);
  long doubled = 0;
  for (long n = 0; n < mesh.n_nodes; ++n)
    if (mesh.side_block[0][n] >= 0 && mesh.side_block[1][n] >= 0) ++doubled;
  CHECK(doubled > 0);
  CHECK(mesh.vector_dofs() == (mesh.n_blocks[0] + mesh.n_blocks[1]) * 2);
}

TEST_CASE("box mesh marks boundary nodes and keeps interior free") {
  std::vector<Phase> phase(16, Phase::Solid);
  VoxelMesh mesh = build_box_mesh(2, {4, 4, 1}, 1.0, std::move(phase));
  CHECK(mesh.n_nodes == 25);
  Subspace free = broken_subspace(mesh, /*drop_boundary=*/true);
  CHECK(free.size() == 3 * 3 * 2); // interior 3x3 nodes, 2 components
}

TEST_CASE("conforming mesh shares one block per node") {
  std::vector<Phase> phase(16, Phase::Solid);
  for (int i = 0; i < 4; ++i) phase[i] = Phase::Fluid;
  VoxelMesh broken = build_box_mesh(2, {4, 4, 1}, 1.0, phase, /*conforming=*/false);
  VoxelMesh conf = build_box_mesh(2, {4, 4, 1}, 1.0, phase, /*conforming=*/true);
  CHECK(conf.vector_dofs() < broken.vector_dofs());
  for (long n = 0; n < conf.n_nodes; ++n)
    CHECK(conf.side_block[0][n] == conf.side_block[1][n]);
}
