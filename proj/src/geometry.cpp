#include "poro/geometry.hpp"

#include <Eigen/Eigenvalues>
#include <numeric>

#include "poro/errors.hpp"

namespace poro {

void validate_materials(const MaterialParams& m) {
  const int dim = m.a.dim;
  if (dim != 2 && dim != 3) throw BadMaterial("elastic tensor dimension must be 2 or 3");
  const int n = voigt_size(dim);
  if (m.a.voigt.rows() != n || m.a.voigt.cols() != n)
    throw BadMaterial("a_voigt has wrong shape for dimension");
  double asym = (m.a.voigt - m.a.voigt.transpose()).cwiseAbs().maxCoeff();
  double scale = m.a.voigt.cwiseAbs().maxCoeff();
  if (scale <= 0.0 || asym > 1e-12 * scale)
    throw BadMaterial("a_ijkl must satisfy the major symmetry (symmetric Voigt matrix)");
  Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (m.a.voigt + m.a.voigt.transpose()));
  if (es.eigenvalues().minCoeff() <= 0.0)
    throw BadMaterial("a_ijkl must be positive definite on symmetric strains");
  if (!(m.mu > 0.0)) throw BadMaterial("mu must be positive");
  if (!(m.eta / m.mu > -2.0 / 3.0)) throw BadMaterial("eta/mu must exceed -2/3");
  if (!(m.alpha > 0.0)) throw BadMaterial("alpha (slip constant) must be positive");
  if (!(m.rho_s > 0.0)) throw BadMaterial("rho_s must be positive");
  if (!(m.rho_f > 0.0)) throw BadMaterial("rho_f must be positive");
  if (!(m.c0 > 0.0)) throw BadMaterial("c0 must be positive (gamma = c0^2 rho_f > 0)");
}

namespace {

struct UnionFind {
  std::vector<long> parent;
  explicit UnionFind(long n) : parent(n) { std::iota(parent.begin(), parent.end(), 0L); }
  long find(long x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  }
  void join(long a, long b) { parent[find(a)] = find(b); }
};

template <class F>
void for_each_voxel(const PhaseCell& c, F&& f) {
  const int n = c.resolution;
  if (c.dim == 2) {
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i) f(i, j, 0);
  } else {
    for (int k = 0; k < n; ++k)
      for (int j = 0; j < n; ++j)
        for (int i = 0; i < n; ++i) f(i, j, k);
  }
}

int wrap(int i, int n) { return (i % n + n) % n; }

bool phase_connected(const PhaseCell& c, Phase which) {
  const int n = c.resolution;
  UnionFind uf(c.voxel_count());
  long seed = -1;
  for_each_voxel(c, [&](int i, int j, int k) {
    long v = c.index(i, j, k);
    if (c.phase[v] != which) return;
    if (seed < 0) seed = v;
    const int nb2[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
    for (int d = 0; d < c.dim; ++d) {
      long w = c.index(wrap(nb2[d][0], n), wrap(nb2[d][1], n), wrap(nb2[d][2], n));
      if (c.phase[w] == which) uf.join(v, w);
    }
  });
  if (seed < 0) return false;
  long root = uf.find(seed);
  bool ok = true;
  for_each_voxel(c, [&](int i, int j, int k) {
    long v = c.index(i, j, k);
    if (c.phase[v] == which && uf.find(v) != root) ok = false;
  });
  return ok;
}

} // namespace

bool solid_is_periodically_connected(const PhaseCell& cell) {
  return phase_connected(cell, Phase::Solid);
}

int fluid_components(const PhaseCell& cell, std::vector<int>& label) {
  const int n = cell.resolution;
  UnionFind uf(cell.voxel_count());
  for_each_voxel(cell, [&](int i, int j, int k) {
    long v = cell.index(i, j, k);
    if (cell.phase[v] != Phase::Fluid) return;
    const int nb[3][3] = {{i + 1, j, k}, {i, j + 1, k}, {i, j, k + 1}};
    for (int d = 0; d < cell.dim; ++d) {
      long w = cell.index(wrap(nb[d][0], n), wrap(nb[d][1], n), wrap(nb[d][2], n));
      if (cell.phase[w] == Phase::Fluid) uf.join(v, w);
    }
  });
  label.assign(cell.voxel_count(), -1);
  std::vector<long> roots;
  int count = 0;
  for (long v = 0; v < cell.voxel_count(); ++v) {
    if (cell.phase[v] != Phase::Fluid) continue;
    long r = uf.find(v);
    int id = -1;
    for (size_t t = 0; t < roots.size(); ++t)
      if (roots[t] == r) id = static_cast<int>(t);
    if (id < 0) {
      id = count++;
      roots.push_back(r);
    }
    label[v] = id;
  }
  return count;
}

PhaseCell build_phase_cell(int dim, int resolution, std::vector<Phase> phase,
                           const MaterialParams& materials) {
  if (dim != 2 && dim != 3) throw GeometryError("dim must be 2 or 3");
  if (resolution < 2) throw GeometryError("resolution must be at least 2 per axis");
  validate_materials(materials);
  PhaseCell cell;
  cell.dim = dim;
  cell.resolution = resolution;
  cell.materials = materials;
  cell.phase = std::move(phase);
  if (static_cast<long>(cell.phase.size()) != cell.voxel_count())
    throw GeometryError("phase array size does not match resolution^dim");

  long n_fluid = 0;
  for (Phase p : cell.phase) n_fluid += (p == Phase::Fluid);
  if (n_fluid == 0) throw EmptyPhase("fluid phase has zero voxels");
  if (n_fluid == cell.voxel_count()) throw EmptyPhase("solid phase has zero voxels");
  if (!solid_is_periodically_connected(cell))
    throw DisconnectedSolid("solid voxel set is not face-connected on the torus");
  return cell;
}

PhaseCell build_phase_cell(int dim, int resolution, const VoxelIndicator& fluid_at,
                           const MaterialParams& materials) {
  if (dim != 2 && dim != 3) throw GeometryError("dim must be 2 or 3");
  if (resolution < 2) throw GeometryError("resolution must be at least 2 per axis");
  long count = 1;
  for (int d = 0; d < dim; ++d) count *= resolution;
  std::vector<Phase> phase(count, Phase::Solid);
  const double h = 1.0 / resolution;
  long idx = 0;
  if (dim == 2) {
    for (int j = 0; j < resolution; ++j)
      for (int i = 0; i < resolution; ++i) {
        std::array<double, 3> c{(i + 0.5) * h - 0.5, (j + 0.5) * h - 0.5, 0.0};
        phase[idx++] = fluid_at(c) ? Phase::Fluid : Phase::Solid;
      }
  } else {
    for (int k = 0; k < resolution; ++k)
      for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i) {
          std::array<double, 3> c{(i + 0.5) * h - 0.5, (j + 0.5) * h - 0.5, (k + 0.5) * h - 0.5};
          phase[idx++] = fluid_at(c) ? Phase::Fluid : Phase::Solid;
        }
  }
  return build_phase_cell(dim, resolution, std::move(phase), materials);
}

std::pair<double, double> volume_fractions(const PhaseCell& cell) {
  long n_fluid = 0;
  for (Phase p : cell.phase) n_fluid += (p == Phase::Fluid);
  long total = cell.voxel_count();
  double pi = static_cast<double>(n_fluid) / static_cast<double>(total);
  return {static_cast<double>(total - n_fluid) / static_cast<double>(total), pi};
}

double InterfaceMesh::total_area() const {
  double a = 0.0;
  for (const auto& f : facets) a += f.area;
  return a;
}

InterfaceMesh extract_interface(const PhaseCell& cell) {
  InterfaceMesh im;
  im.dim = cell.dim;
  im.resolution = cell.resolution;
  const int n = cell.resolution;
  const double h = 1.0 / n;
  const double face_area = cell.dim == 2 ? h : h * h;
  // Each voxel face is visited once from its lower-side voxel along each axis.
  for_each_voxel(cell, [&](int i, int j, int k) {
    const int here[3] = {i, j, k};
    long v = cell.index(i, j, k);
    for (int axis = 0; axis < cell.dim; ++axis) {
      int nb[3] = {i, j, k};
      nb[axis] = wrap(here[axis] + 1, n);
      long w = cell.index(nb[0], nb[1], nb[2]);
      if (cell.phase[v] == cell.phase[w]) continue;
      InterfaceFacet f;
      f.axis = axis;
      f.area = face_area;
      // Face sits at the upper boundary of voxel v along `axis`.
      f.base = {i, j, k};
      f.base[axis] = wrap(here[axis] + 1, n);
      if (cell.phase[v] == Phase::Fluid) {
        f.fluid_voxel = v;
        f.solid_voxel = w;
        f.sign = +1.0; // fluid below, solid above: n = +e_axis
      } else {
        f.solid_voxel = v;
        f.fluid_voxel = w;
        f.sign = -1.0;
      }
      im.facets.push_back(f);
    }
  });
  return im;
}

} // namespace poro
