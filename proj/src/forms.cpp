#include "poro/forms.hpp"

#include <Eigen/SVD>
#include <cmath>
#include <ostream>

#include "poro/errors.hpp"

namespace poro {

void AssembledForm::dump_coordinate(std::ostream& os) const {
  for (int k = 0; k < op.outerSize(); ++k)
    for (SpMat::InnerIterator it(op, k); it; ++it)
      os << it.row() << " " << it.col() << " " << it.value() << "\n";
}

namespace {

/// Reference Q1 element data on [0,1]^dim scaled to the physical voxel.
/// 2^dim Gauss points: exact for all multilinear-form integrands used here.
struct ElementKernel {
  int dim = 2;
  int nloc = 4;
  int ndof = 8;
  int nq = 4;
  std::vector<Vec> N;      // shape values per quad point
  std::vector<Mat> G;      // physical gradients per quad point (nloc x dim)
  std::vector<Mat> B;      // strain-displacement (voigt x ndof)
  std::vector<Vec> divrow; // divergence row (ndof)
  Vec wq;
  Mat mass;   // vector mass, unit density
  Mat lap;    // full-gradient form, unit factor
  Mat divdiv; // (div u)(div w)
  Vec idiv;   // int div w
  double iphi = 0.0; // int phi_l (equal for all l)
};

ElementKernel make_kernel(const VoxelMesh& m) {
  ElementKernel k;
  k.dim = m.dim;
  k.nloc = 1 << m.dim;
  k.ndof = k.nloc * m.dim;
  k.nq = 1 << m.dim;
  const int nv = voigt_size(m.dim);
  double meas = m.element_measure();

  const double ga = 0.5 - 0.5 / std::sqrt(3.0);
  const double gb = 0.5 + 0.5 / std::sqrt(3.0);
  k.wq = Vec::Constant(k.nq, meas / k.nq);
  k.N.resize(k.nq);
  k.G.resize(k.nq);
  k.B.resize(k.nq);
  k.divrow.resize(k.nq);
  for (int q = 0; q < k.nq; ++q) {
    double xi[3] = {0.5, 0.5, 0.5};
    for (int d = 0; d < m.dim; ++d) xi[d] = ((q >> d) & 1) ? gb : ga;
    k.N[q] = Vec::Zero(k.nloc);
    k.G[q] = Mat::Zero(k.nloc, m.dim);
    for (int l = 0; l < k.nloc; ++l) {
      double val = 1.0;
      for (int d = 0; d < m.dim; ++d) val *= ((l >> d) & 1) ? xi[d] : 1.0 - xi[d];
      k.N[q](l) = val;
      for (int d = 0; d < m.dim; ++d) {
        double g = ((l >> d) & 1) ? 1.0 : -1.0;
        for (int e = 0; e < m.dim; ++e)
          if (e != d) g *= ((l >> e) & 1) ? xi[e] : 1.0 - xi[e];
        k.G[q](l, d) = g / m.h[d];
      }
    }
    k.B[q] = Mat::Zero(nv, k.ndof);
    k.divrow[q] = Vec::Zero(k.ndof);
    for (int l = 0; l < k.nloc; ++l) {
      for (int d = 0; d < m.dim; ++d) {
        k.B[q](d, l * m.dim + d) = k.G[q](l, d);
        k.divrow[q](l * m.dim + d) = k.G[q](l, d);
      }
      if (m.dim == 2) {
        k.B[q](2, l * 2 + 0) += k.G[q](l, 1);
        k.B[q](2, l * 2 + 1) += k.G[q](l, 0);
      } else {
        k.B[q](3, l * 3 + 1) += k.G[q](l, 2);
        k.B[q](3, l * 3 + 2) += k.G[q](l, 1);
        k.B[q](4, l * 3 + 0) += k.G[q](l, 2);
        k.B[q](4, l * 3 + 2) += k.G[q](l, 0);
        k.B[q](5, l * 3 + 0) += k.G[q](l, 1);
        k.B[q](5, l * 3 + 1) += k.G[q](l, 0);
      }
    }
  }

  k.mass = Mat::Zero(k.ndof, k.ndof);
  k.lap = Mat::Zero(k.ndof, k.ndof);
  k.divdiv = Mat::Zero(k.ndof, k.ndof);
  k.idiv = Vec::Zero(k.ndof);
  for (int q = 0; q < k.nq; ++q) {
    Mat nn = k.N[q] * k.N[q].transpose();
    Mat gg = k.G[q] * k.G[q].transpose();
    for (int a = 0; a < k.nloc; ++a)
      for (int b = 0; b < k.nloc; ++b)
        for (int c = 0; c < m.dim; ++c) {
          k.mass(a * m.dim + c, b * m.dim + c) += k.wq(q) * nn(a, b);
          k.lap(a * m.dim + c, b * m.dim + c) += k.wq(q) * gg(a, b);
        }
    k.divdiv += k.wq(q) * (k.divrow[q] * k.divrow[q].transpose());
    k.idiv += k.wq(q) * k.divrow[q];
  }
  k.iphi = meas / k.nloc;
  return k;
}

template <class F>
void for_each_element(const VoxelMesh& m, F&& f) {
  for (int k = 0; k < (m.dim == 3 ? m.nv[2] : 1); ++k)
    for (int j = 0; j < m.nv[1]; ++j)
      for (int i = 0; i < m.nv[0]; ++i) f(i, j, k, m.voxel_index(i, j, k));
}

void gather_dofs(const VoxelMesh& m, int i, int j, int k, int side,
                 std::array<long, 24>& dofs) {
  std::array<long, 8> nodes{};
  m.element_nodes(i, j, k, nodes);
  int nloc = 1 << m.dim;
  for (int l = 0; l < nloc; ++l)
    for (int c = 0; c < m.dim; ++c) dofs[l * m.dim + c] = m.vdof(nodes[l], side, c);
}

void scatter_local(std::vector<Triplet>& trips, const Mat& loc,
                   const std::array<long, 24>& dofs, int n) {
  for (int a = 0; a < n; ++a)
    for (int b = 0; b < n; ++b)
      if (loc(a, b) != 0.0) trips.emplace_back(dofs[a], dofs[b], loc(a, b));
}

AssembledForm volume_form(const VoxelMesh& mesh, Phase phase, const Mat& local,
                          std::string name, double coeff) {
  const ElementKernel k = make_kernel(mesh);
  std::vector<Triplet> trips;
  std::array<long, 24> dofs{};
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    gather_dofs(mesh, i, j, kk, phase == Phase::Solid ? 0 : 1, dofs);
    scatter_local(trips, local, dofs, k.ndof);
  });
  AssembledForm f;
  f.op.resize(mesh.vector_dofs(), mesh.vector_dofs());
  f.op.setFromTriplets(trips.begin(), trips.end());
  f.name = std::move(name);
  f.coefficient = coeff;
  return f;
}

struct MeshFacet {
  long solid_voxel = -1, fluid_voxel = -1;
  std::array<long, 4> nodes{}; // face corner nodes
  int n_nodes = 2;
  double area = 0.0;
  int axis = 0;
  double h_normal = 0.0;
};

std::vector<MeshFacet> mesh_facets(const VoxelMesh& m, bool phase_boundary_only) {
  std::vector<MeshFacet> out;
  for_each_element(m, [&](int i, int j, int k, long v) {
    const int here[3] = {i, j, k};
    for (int axis = 0; axis < m.dim; ++axis) {
      int nb[3] = {i, j, k};
      nb[axis] = here[axis] + 1;
      if (m.periodic)
        nb[axis] %= m.nv[axis];
      else if (nb[axis] >= m.nv[axis])
        continue;
      long w = m.voxel_index(nb[0], nb[1], nb[2]);
      if (phase_boundary_only) {
        if (m.phase[v] == m.phase[w]) continue;
      } else {
        if (!(m.phase[v] == Phase::Fluid && m.phase[w] == Phase::Fluid)) continue;
      }
      MeshFacet f;
      f.axis = axis;
      f.h_normal = m.h[axis];
      f.area = m.element_measure() / m.h[axis];
      if (m.phase[v] == Phase::Fluid) {
        f.fluid_voxel = v;
        f.solid_voxel = w;
      } else {
        f.solid_voxel = v;
        f.fluid_voxel = w;
      }
      // Corner nodes of the shared face (upper face of voxel v along axis).
      long fi = i + (axis == 0 ? 1 : 0);
      long fj = j + (axis == 1 ? 1 : 0);
      long fk = k + (axis == 2 ? 1 : 0);
      int t = 0;
      const int tdim[2] = {axis == 0 ? 1 : 0, axis == 2 ? 1 : 2};
      int nt = m.dim - 1;
      f.n_nodes = 1 << nt;
      for (int c = 0; c < f.n_nodes; ++c) {
        long p[3] = {fi, fj, fk};
        for (int d = 0; d < nt; ++d)
          if ((c >> d) & 1) p[tdim[d]] += 1;
        if (m.periodic)
          for (int d = 0; d < m.dim; ++d) p[d] %= m.nn[d];
        f.nodes[t++] = m.node_index(p[0], p[1], m.dim == 3 ? p[2] : 0);
      }
      out.push_back(f);
    }
  });
  return out;
}

} // namespace

AssembledForm assemble_elastic(const VoxelMesh& mesh, const ElasticModel& model,
                               bool verify_kernel) {
  if (model.dim() != mesh.dim) throw Incompatible("elastic model dimension mismatch");
  const ElementKernel k = make_kernel(mesh);
  const bool uniform = model.per_voxel.empty();
  Mat kloc_uniform = Mat::Zero(k.ndof, k.ndof);
  if (uniform)
    for (int q = 0; q < k.nq; ++q)
      kloc_uniform += k.wq(q) * (k.B[q].transpose() * model.uniform.voigt * k.B[q]);

  std::vector<Triplet> trips;
  std::array<long, 24> dofs{};
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != Phase::Solid) return;
    gather_dofs(mesh, i, j, kk, 0, dofs);
    if (uniform) {
      scatter_local(trips, kloc_uniform, dofs, k.ndof);
    } else {
      Mat loc = Mat::Zero(k.ndof, k.ndof);
      const Mat& A = model.at(v);
      for (int q = 0; q < k.nq; ++q) loc += k.wq(q) * (k.B[q].transpose() * A * k.B[q]);
      scatter_local(trips, loc, dofs, k.ndof);
    }
  });
  AssembledForm f;
  f.op.resize(mesh.vector_dofs(), mesh.vector_dofs());
  f.op.setFromTriplets(trips.begin(), trips.end());
  f.name = "elastic";

  if (verify_kernel) {
    Subspace solid = side_subspace(mesh, 0);
    if (solid.size() > 4000)
      throw Incompatible("kernel verification is a dense check; use a small resolution");
    Mat dense = Mat(restrict_matrix(f.op, solid, solid));
    Eigen::JacobiSVD<Mat> svd(dense);
    const auto& sv = svd.singularValues();
    double tol = 1e-10 * sv(0);
    int nz = 0;
    for (int s = 0; s < sv.size(); ++s) nz += (sv(s) < tol);
    if (nz != mesh.dim)
      throw SingularBeyondTranslations(
          "elastic operator kernel has dimension " + std::to_string(nz) + ", expected " +
          std::to_string(mesh.dim) + " (periodic solid may be disconnected)");
  }
  return f;
}

AssembledForm assemble_fluid_viscous(const VoxelMesh& mesh, double mu, GradientForm form) {
  const ElementKernel k = make_kernel(mesh);
  Mat loc;
  if (form == GradientForm::Full) {
    loc = 2.0 * mu * k.lap;
  } else {
    // 2*mu e(u):e(w) via the Voigt route with A = diag(2mu,..,mu,..).
    const int nv = voigt_size(mesh.dim);
    Mat A = Mat::Zero(nv, nv);
    for (int d = 0; d < mesh.dim; ++d) A(d, d) = 2.0 * mu;
    for (int s = mesh.dim; s < nv; ++s) A(s, s) = mu;
    loc = Mat::Zero(k.ndof, k.ndof);
    for (int q = 0; q < k.nq; ++q) loc += k.wq(q) * (k.B[q].transpose() * A * k.B[q]);
  }
  AssembledForm f = volume_form(mesh, Phase::Fluid, loc, "fluid_viscous", 2.0 * mu);
  return f;
}

AssembledForm assemble_mass(const VoxelMesh& mesh, Phase phase, double weight) {
  const ElementKernel k = make_kernel(mesh);
  Mat loc = weight * k.mass;
  return volume_form(mesh, phase, loc, phase == Phase::Fluid ? "fluid_mass" : "solid_mass",
                     weight);
}

AssembledForm assemble_fluid_mass(const VoxelMesh& mesh, double weight) {
  return assemble_mass(mesh, Phase::Fluid, weight);
}
AssembledForm assemble_solid_mass(const VoxelMesh& mesh, double weight) {
  return assemble_mass(mesh, Phase::Solid, weight);
}

AssembledForm assemble_div_div(const VoxelMesh& mesh, Phase phase, double weight) {
  const ElementKernel k = make_kernel(mesh);
  Mat loc = weight * k.divdiv;
  return volume_form(mesh, phase, loc, "div_div", weight);
}

AssembledForm assemble_interface(const VoxelMesh& mesh, double alpha) {
  AssembledForm f;
  f.op.resize(mesh.vector_dofs(), mesh.vector_dofs());
  f.name = "interface_slip";
  f.coefficient = alpha;
  if (!mesh.broken_interface) return f; // conforming: jump is identically zero

  std::vector<Triplet> trips;
  for (const MeshFacet& fc : mesh_facets(mesh, true)) {
    const double phic = 1.0 / fc.n_nodes; // facet-center shape value
    const double s = alpha * fc.area * phic * phic;
    for (int a = 0; a < fc.n_nodes; ++a)
      for (int b = 0; b < fc.n_nodes; ++b)
        for (int c = 0; c < mesh.dim; ++c) {
          long fa = mesh.vdof(fc.nodes[a], 1, c), sa = mesh.vdof(fc.nodes[a], 0, c);
          long fb = mesh.vdof(fc.nodes[b], 1, c), sb = mesh.vdof(fc.nodes[b], 0, c);
          trips.emplace_back(fa, fb, s);
          trips.emplace_back(sa, sb, s);
          trips.emplace_back(fa, sb, -s);
          trips.emplace_back(sa, fb, -s);
        }
  }
  f.op.setFromTriplets(trips.begin(), trips.end());
  return f;
}

AssembledForm assemble_divergence(const VoxelMesh& mesh, Phase phase) {
  const ElementKernel k = make_kernel(mesh);
  std::vector<Triplet> trips;
  std::array<long, 24> dofs{};
  long row = 0;
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    gather_dofs(mesh, i, j, kk, phase == Phase::Solid ? 0 : 1, dofs);
    for (int a = 0; a < k.ndof; ++a)
      if (k.idiv(a) != 0.0) trips.emplace_back(row, dofs[a], k.idiv(a));
    ++row;
  });
  AssembledForm f;
  f.op.resize(row, mesh.vector_dofs());
  f.op.setFromTriplets(trips.begin(), trips.end());
  f.name = "divergence";
  f.rows = DofSpace::FluidPressure;
  return f;
}

AssembledForm pressure_jump_stabilization(const VoxelMesh& mesh, double coeff) {
  std::vector<Triplet> trips;
  for (const MeshFacet& fc : mesh_facets(mesh, false)) {
    long a = mesh.fluid_voxel_id[fc.fluid_voxel];
    long b = mesh.fluid_voxel_id[fc.solid_voxel]; // both fluid for these facets
    double s = coeff * fc.h_normal * fc.area;
    trips.emplace_back(a, a, s);
    trips.emplace_back(b, b, s);
    trips.emplace_back(a, b, -s);
    trips.emplace_back(b, a, -s);
  }
  AssembledForm f;
  f.op.resize(mesh.n_fluid_voxels, mesh.n_fluid_voxels);
  f.op.setFromTriplets(trips.begin(), trips.end());
  f.name = "pressure_jump_stabilization";
  f.rows = f.cols = DofSpace::FluidPressure;
  f.coefficient = coeff;
  return f;
}

SpMat mean_zero_rows(const VoxelMesh& mesh, Phase phase) {
  const ElementKernel k = make_kernel(mesh);
  std::vector<Triplet> trips;
  std::array<long, 24> dofs{};
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    gather_dofs(mesh, i, j, kk, phase == Phase::Solid ? 0 : 1, dofs);
    for (int l = 0; l < k.nloc; ++l)
      for (int c = 0; c < mesh.dim; ++c) trips.emplace_back(c, dofs[l * mesh.dim + c], k.iphi);
  });
  SpMat C(mesh.dim, mesh.vector_dofs());
  C.setFromTriplets(trips.begin(), trips.end());
  return C;
}

Vec phase_load(const VoxelMesh& mesh, Phase phase, int comp) {
  const ElementKernel k = make_kernel(mesh);
  Vec f = Vec::Zero(mesh.vector_dofs());
  std::array<long, 24> dofs{};
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    gather_dofs(mesh, i, j, kk, phase == Phase::Solid ? 0 : 1, dofs);
    for (int l = 0; l < k.nloc; ++l) f(dofs[l * mesh.dim + comp]) += k.iphi;
  });
  return f;
}

Vec scalar_field_load(const VoxelMesh& mesh,
                      const std::function<double(const std::array<double, 3>&)>& g, int comp) {
  const ElementKernel k = make_kernel(mesh);
  Vec f = Vec::Zero(mesh.vector_dofs());
  std::array<long, 24> dofs{};
  const double ga = 0.5 - 0.5 / std::sqrt(3.0), gb = 0.5 + 0.5 / std::sqrt(3.0);
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    int side = mesh.phase[v] == Phase::Solid ? 0 : 1;
    gather_dofs(mesh, i, j, kk, side, dofs);
    for (int q = 0; q < k.nq; ++q) {
      std::array<double, 3> x{mesh.origin[0] + (i + (((q >> 0) & 1) ? gb : ga)) * mesh.h[0],
                              mesh.origin[1] + (j + (((q >> 1) & 1) ? gb : ga)) * mesh.h[1],
                              mesh.origin[2] + (kk + (((q >> 2) & 1) ? gb : ga)) * mesh.h[2]};
      double gv = g(x) * k.wq(q);
      for (int l = 0; l < k.nloc; ++l) f(dofs[l * mesh.dim + comp]) += gv * k.N[q](l);
    }
  });
  return f;
}

Vec divergence_load(const VoxelMesh& mesh, Phase phase) {
  const ElementKernel k = make_kernel(mesh);
  Vec f = Vec::Zero(mesh.vector_dofs());
  std::array<long, 24> dofs{};
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    gather_dofs(mesh, i, j, kk, phase == Phase::Solid ? 0 : 1, dofs);
    for (int a = 0; a < k.ndof; ++a) f(dofs[a]) += k.idiv(a);
  });
  return f;
}

Vec elastic_affine_load(const VoxelMesh& mesh, const ElasticModel& model,
                        const Vec& voigt_strain) {
  const ElementKernel k = make_kernel(mesh);
  Vec f = Vec::Zero(mesh.vector_dofs());
  std::array<long, 24> dofs{};
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != Phase::Solid) return;
    gather_dofs(mesh, i, j, kk, 0, dofs);
    const Mat& A = model.at(v);
    Vec sigma = A * voigt_strain;
    for (int q = 0; q < k.nq; ++q) {
      Vec contrib = k.wq(q) * (k.B[q].transpose() * sigma);
      for (int a = 0; a < k.ndof; ++a) f(dofs[a]) += contrib(a);
    }
  });
  return f;
}

double elastic_energy_with_affine(const VoxelMesh& mesh, const ElasticModel& model,
                                  const Vec& uA, const Vec& voigtA, const Vec& uB,
                                  const Vec& voigtB) {
  const ElementKernel k = make_kernel(mesh);
  std::array<long, 24> dofs{};
  double total = 0.0;
  Vec la(k.ndof), lb(k.ndof);
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != Phase::Solid) return;
    gather_dofs(mesh, i, j, kk, 0, dofs);
    for (int a = 0; a < k.ndof; ++a) {
      la(a) = uA(dofs[a]);
      lb(a) = uB(dofs[a]);
    }
    const Mat& A = model.at(v);
    for (int q = 0; q < k.nq; ++q) {
      Vec ea = k.B[q] * la + voigtA;
      Vec eb = k.B[q] * lb + voigtB;
      total += k.wq(q) * ea.dot(A * eb);
    }
  });
  return total;
}

double divergence_integral_with_affine(const VoxelMesh& mesh, Phase phase, const Vec& u,
                                       const Vec& voigt_affine) {
  const ElementKernel k = make_kernel(mesh);
  std::array<long, 24> dofs{};
  double tr_affine = 0.0;
  for (int d = 0; d < mesh.dim; ++d) tr_affine += voigt_affine(d);
  double total = 0.0;
  Vec loc(k.ndof);
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    gather_dofs(mesh, i, j, kk, phase == Phase::Solid ? 0 : 1, dofs);
    for (int a = 0; a < k.ndof; ++a) loc(a) = u(dofs[a]);
    total += k.idiv.dot(loc) + tr_affine * mesh.element_measure();
  });
  return total;
}

SpMat restrict_matrix(const SpMat& A, const Subspace& rows, const Subspace& cols) {
  std::vector<Triplet> trips;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it) {
      long r = rows.full_to_sub[it.row()];
      long c = cols.full_to_sub[it.col()];
      if (r >= 0 && c >= 0) trips.emplace_back(r, c, it.value());
    }
  SpMat out(rows.size(), cols.size());
  out.setFromTriplets(trips.begin(), trips.end());
  return out;
}

Vec restrict_vector(const Vec& v, const Subspace& s) {
  Vec out(s.size());
  for (long i = 0; i < s.size(); ++i) out(i) = v(s.keep[i]);
  return out;
}

Vec prolong_vector(const Vec& sub, const Subspace& s, long full_size) {
  Vec out = Vec::Zero(full_size);
  for (long i = 0; i < s.size(); ++i) out(s.keep[i]) = sub(i);
  return out;
}

CVec prolong_vector(const CVec& sub, const Subspace& s, long full_size) {
  CVec out = CVec::Zero(full_size);
  for (long i = 0; i < s.size(); ++i) out(s.keep[i]) = sub(i);
  return out;
}

Vec element_affine_dofs(const VoxelMesh& mesh, int i, int j, int k, const Mat& G) {
  int nloc = 1 << mesh.dim;
  Vec dofs(nloc * mesh.dim);
  for (int l = 0; l < nloc; ++l) {
    double x[3] = {mesh.origin[0] + (i + (l & 1)) * mesh.h[0],
                   mesh.origin[1] + (j + ((l >> 1) & 1)) * mesh.h[1],
                   mesh.origin[2] + (k + ((l >> 2) & 1)) * mesh.h[2]};
    for (int c = 0; c < mesh.dim; ++c) {
      double val = 0.0;
      for (int d = 0; d < mesh.dim; ++d) val += G(c, d) * x[d];
      dofs(l * mesh.dim + c) = val;
    }
  }
  return dofs;
}

Vec divergence_of_affine(const VoxelMesh& mesh, Phase phase, const Mat& G) {
  const ElementKernel k = make_kernel(mesh);
  std::vector<double> rows;
  for_each_element(mesh, [&](int i, int j, int kk, long v) {
    if (mesh.phase[v] != phase) return;
    Vec loc = element_affine_dofs(mesh, i, j, kk, G);
    rows.push_back(k.idiv.dot(loc));
  });
  Vec out(static_cast<long>(rows.size()));
  for (size_t r = 0; r < rows.size(); ++r) out(static_cast<long>(r)) = rows[r];
  return out;
}

} // namespace poro
