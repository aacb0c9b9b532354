#pragma once

#include <array>
#include <cstdint>
#include <functional>
#include <vector>

#include "poro/types.hpp"

namespace poro {

enum class Phase : std::uint8_t { Solid = 0, Fluid = 1 };

/// Periodic unit cell Y = (-1/2, 1/2)^dim sampled on a uniform voxel grid.
/// A voxel belongs to the phase of its center, centers at (i+1/2)/res - 1/2.
struct PhaseCell {
  int dim = 2;
  int resolution = 0; // voxels per axis
  std::vector<Phase> phase; // x-fastest ordering
  MaterialParams materials;

  long voxel_count() const {
    long n = 1;
    for (int d = 0; d < dim; ++d) n *= resolution;
    return n;
  }
  long index(int i, int j, int k = 0) const {
    return dim == 2 ? i + static_cast<long>(resolution) * j
                    : i + static_cast<long>(resolution) * (j + static_cast<long>(resolution) * k);
  }
  Phase at(int i, int j, int k = 0) const { return phase[index(i, j, k)]; }
  double voxel_measure() const {
    double h = 1.0 / resolution, v = 1.0;
    for (int d = 0; d < dim; ++d) v *= h;
    return v;
  }
};

/// One stair-step interface facet: a voxel face separating a fluid voxel from
/// a solid voxel (periodic wraparound included). The unit normal points from
/// the fluid side into the solid side.
struct InterfaceFacet {
  long fluid_voxel = -1;
  long solid_voxel = -1;
  int axis = 0;            // normal direction axis
  double sign = 1.0;       // normal = sign * e_axis
  std::array<int, 3> base{}; // lattice coordinates of the lower corner of the face
  double area = 0.0;
};

struct InterfaceMesh {
  int dim = 2;
  int resolution = 0;
  std::vector<InterfaceFacet> facets;
  double total_area() const;
};

using VoxelIndicator = std::function<bool(const std::array<double, 3>&)>; // true = fluid

/// Builds and validates a PhaseCell from a fluid indicator sampled at voxel
/// centers. Throws EmptyPhase, DisconnectedSolid or BadMaterial.
PhaseCell build_phase_cell(int dim, int resolution, const VoxelIndicator& fluid_at,
                           const MaterialParams& materials);

/// Same validation path for an explicit phase array (x-fastest).
PhaseCell build_phase_cell(int dim, int resolution, std::vector<Phase> phase,
                           const MaterialParams& materials);

/// (solid fraction, Pi = |Y_f|). Exact voxel counting; the two sum to 1.
std::pair<double, double> volume_fractions(const PhaseCell& cell);

/// All solid/fluid voxel-face adjacencies on the torus, normals fluid->solid.
InterfaceMesh extract_interface(const PhaseCell& cell);

/// Face-connectivity of the solid voxel set on the torus (union-find).
bool solid_is_periodically_connected(const PhaseCell& cell);

/// Labels fluid voxels by periodically-connected component; returns the
/// number of components (0 if no fluid). Non-fluid voxels get label -1.
int fluid_components(const PhaseCell& cell, std::vector<int>& label);

} // namespace poro
