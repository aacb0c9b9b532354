#include "poro/cell_solvers.hpp"

#include <numeric>

#include "poro/errors.hpp"
#include "poro/linsolve.hpp"

namespace poro {

namespace {

/// Saddle operator [K C^T; C 0] with the dim mean-zero constraint rows; the
/// multiplier pins the translation kernel of the periodic solid operator.
SpMat static_saddle(const SpMat& K, const SpMat& C) {
  long n = K.rows(), m = C.rows();
  std::vector<Triplet> trips;
  trips.reserve(K.nonZeros() + 2 * C.nonZeros());
  for (int k = 0; k < K.outerSize(); ++k)
    for (SpMat::InnerIterator it(K, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < C.outerSize(); ++k)
    for (SpMat::InnerIterator it(C, k); it; ++it) {
      trips.emplace_back(n + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), n + it.row(), it.value());
    }
  SpMat S(n + m, n + m);
  S.setFromTriplets(trips.begin(), trips.end());
  return S;
}

void check_compatibility(const VoxelMesh& mesh, const Subspace& solid, const Vec& rhs,
                         double scale) {
  // The right-hand side must vanish on constant fields (one per component).
  for (int c = 0; c < mesh.dim; ++c) {
    double s = 0.0;
    for (long i = 0; i < solid.size(); ++i)
      if (solid.keep[i] % mesh.dim == c) s += rhs(i);
    if (std::abs(s) > 1e-12 * std::max(1.0, scale))
      throw Incompatible("cell-problem load does not vanish on constants (component " +
                         std::to_string(c) + ", sum " + std::to_string(s) + ")");
  }
}

struct StaticSystem {
  Subspace solid;
  SpMat K_sub;
  SparseFactor<double> factor;

  StaticSystem(const VoxelMesh& mesh, const ElasticModel& model)
      : solid(side_subspace(mesh, 0)),
        K_sub(restrict_matrix(assemble_elastic(mesh, model).op, solid, solid)),
        factor(static_saddle(K_sub, restrict_matrix(mean_zero_rows(mesh, Phase::Solid),
                                                    identity_rows(mesh.dim), solid))) {}

  static Subspace identity_rows(int m) {
    std::vector<char> mask(m, 1);
    return Subspace::from_mask(mask);
  }

  Vec solve(const VoxelMesh& mesh, const Vec& full_rhs, double tol) const {
    Vec rhs = restrict_vector(full_rhs, solid);
    check_compatibility(mesh, solid, rhs, rhs.cwiseAbs().sum());
    Vec b = Vec::Zero(solid.size() + mesh.dim);
    b.head(solid.size()) = rhs;
    Vec x = factor.solve(b, tol);
    return prolong_vector(Vec(x.head(solid.size())), solid, mesh.vector_dofs());
  }
};

} // namespace

Vec solve_chi(const VoxelMesh& mesh, const ElasticModel& model, double tol) {
  StaticSystem sys(mesh, model);
  return sys.solve(mesh, divergence_load(mesh, Phase::Solid), tol);
}

std::vector<Vec> solve_chi_ij(const VoxelMesh& mesh, const ElasticModel& model, double tol) {
  StaticSystem sys(mesh, model);
  const int nv = voigt_size(mesh.dim);
  std::vector<Vec> out;
  out.reserve(nv);
  for (int v = 0; v < nv; ++v) {
    Vec xi = Vec::Zero(nv);
    xi(v) = 1.0; // engineering strain of the affine field p_i^j
    out.push_back(sys.solve(mesh, elastic_affine_load(mesh, model, xi), tol));
  }
  return out;
}

StaticCellSolutions solve_static_cell(const VoxelMesh& mesh, const ElasticModel& model,
                                      double tol) {
  StaticSystem sys(mesh, model);
  StaticCellSolutions s;
  s.dim = mesh.dim;
  s.chi = sys.solve(mesh, divergence_load(mesh, Phase::Solid), tol);
  const int nv = voigt_size(mesh.dim);
  Vec zero = Vec::Zero(nv);
  for (int v = 0; v < nv; ++v) {
    Vec xi = Vec::Zero(nv);
    xi(v) = 1.0;
    s.chi_ij.push_back(sys.solve(mesh, elastic_affine_load(mesh, model, xi), tol));
  }
  s.beta_candidate = elastic_energy_with_affine(mesh, model, s.chi, zero, s.chi, zero);
  return s;
}

int mesh_fluid_components(const VoxelMesh& mesh, std::vector<int>& label) {
  std::vector<long> parent(mesh.voxel_count());
  std::iota(parent.begin(), parent.end(), 0L);
  auto find = [&](long x) {
    while (parent[x] != x) x = parent[x] = parent[parent[x]];
    return x;
  };
  auto join = [&](long a, long b) { parent[find(a)] = find(b); };
  for (int k = 0; k < (mesh.dim == 3 ? mesh.nv[2] : 1); ++k)
    for (int j = 0; j < mesh.nv[1]; ++j)
      for (int i = 0; i < mesh.nv[0]; ++i) {
        long v = mesh.voxel_index(i, j, k);
        if (mesh.phase[v] != Phase::Fluid) continue;
        const int here[3] = {i, j, k};
        for (int axis = 0; axis < mesh.dim; ++axis) {
          int nb[3] = {i, j, k};
          nb[axis] = here[axis] + 1;
          if (mesh.periodic)
            nb[axis] %= mesh.nv[axis];
          else if (nb[axis] >= mesh.nv[axis])
            continue;
          long w = mesh.voxel_index(nb[0], nb[1], nb[2]);
          if (mesh.phase[w] == Phase::Fluid) join(v, w);
        }
      }
  label.assign(mesh.voxel_count(), -1);
  std::vector<long> roots;
  int count = 0;
  for (long v = 0; v < mesh.voxel_count(); ++v) {
    if (mesh.phase[v] != Phase::Fluid) continue;
    long r = find(v);
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

namespace {

struct ThetaSystem {
  Subspace fluid;
  Subspace p_keep; // pressure slots carried as unknowns
  SpMat M, G, Gamma, B, S;
  std::vector<int> comp_of_slot; // pressure slot -> fluid component
  long nu = 0, np = 0, np_all = 0;
  int nc = 0;
  bool noslip = false;

  // For the no-slip space the multiplier is defined up to a constant per
  // enclosed fluid component: one slot per component is gauge-fixed to zero
  // (its continuity row is the redundant one), and the reported multiplier
  // is shifted to zero mean per component after the solve.
  ThetaSystem(const VoxelMesh& mesh, bool noslip_, double mu, double alpha,
              const ThetaOptions& opts)
      : noslip(noslip_) {
    fluid = noslip ? fluid_noslip_subspace(mesh) : side_subspace(mesh, 1);
    if (fluid.size() == 0) throw Incompatible("fluid DOF space is empty");
    M = restrict_matrix(assemble_fluid_mass(mesh, 1.0).op, fluid, fluid);
    G = restrict_matrix(assemble_fluid_viscous(mesh, mu, opts.viscous_form).op, fluid, fluid);
    if (!noslip) Gamma = restrict_matrix(assemble_interface(mesh, alpha).op, fluid, fluid);
    nu = fluid.size();
    np_all = mesh.n_fluid_voxels;

    std::vector<int> label;
    nc = mesh_fluid_components(mesh, label);
    comp_of_slot.assign(np_all, -1);
    for (long v = 0; v < mesh.voxel_count(); ++v)
      if (label[v] >= 0) comp_of_slot[mesh.fluid_voxel_id[v]] = label[v];

    std::vector<char> keep(np_all, 1);
    if (noslip) {
      std::vector<char> seen(nc, 0);
      for (long s = 0; s < np_all; ++s)
        if (!seen[comp_of_slot[s]]) {
          seen[comp_of_slot[s]] = 1;
          keep[s] = 0; // gauge slot
        }
    }
    p_keep = Subspace::from_mask(keep);
    np = p_keep.size();

    Subspace all_rows = Subspace::from_mask(std::vector<char>(np_all, 1));
    SpMat B_full = restrict_matrix(assemble_divergence(mesh, Phase::Fluid).op, all_rows, fluid);
    B = restrict_matrix_rows(B_full, p_keep);
    if (opts.stabilize) {
      SpMat S_full = pressure_jump_stabilization(mesh, opts.stab_coeff * 0.5 / mu).op;
      S = restrict_matrix(S_full, p_keep, p_keep);
    }
  }

  static SpMat restrict_matrix_rows(const SpMat& A, const Subspace& rows) {
    std::vector<Triplet> trips;
    for (int k = 0; k < A.outerSize(); ++k)
      for (SpMat::InnerIterator it(A, k); it; ++it) {
        long r = rows.full_to_sub[it.row()];
        if (r >= 0) trips.emplace_back(r, it.col(), it.value());
      }
    SpMat out(rows.size(), A.cols());
    out.setFromTriplets(trips.begin(), trips.end());
    return out;
  }

  SpCMat build(Complex lambda, double rho_f, bool stabilized) const {
    long n = nu + np;
    std::vector<Eigen::Triplet<Complex>> trips;
    Complex cm = lambda * lambda * rho_f;
    Complex cv = lambda; // viscous operator already carries 2*mu
    auto add = [&](const SpMat& A, Complex c, long r0, long c0) {
      for (int k = 0; k < A.outerSize(); ++k)
        for (SpMat::InnerIterator it(A, k); it; ++it)
          trips.emplace_back(r0 + it.row(), c0 + it.col(), c * it.value());
    };
    add(M, cm, 0, 0);
    add(G, cv, 0, 0);
    if (Gamma.nonZeros() > 0) add(Gamma, lambda, 0, 0);
    add(B, Complex(1.0), nu, 0);
    for (int k = 0; k < B.outerSize(); ++k)
      for (SpMat::InnerIterator it(B, k); it; ++it)
        trips.emplace_back(it.col(), nu + it.row(), Complex(it.value()));
    if (stabilized && S.nonZeros() > 0) add(S, Complex(-1.0), nu, nu);
    SpCMat A(n, n);
    A.setFromTriplets(trips.begin(), trips.end());
    return A;
  }

  /// Expands the reduced multiplier and removes the per-component mean.
  CVec expand_pressure(const CVec& p_red) const {
    CVec p = CVec::Zero(np_all);
    for (long i = 0; i < np; ++i) p(p_keep.keep[i]) = p_red(i);
    if (noslip && nc > 0) {
      std::vector<Complex> mean(nc, Complex(0.0));
      std::vector<long> count(nc, 0);
      for (long s = 0; s < np_all; ++s) {
        mean[comp_of_slot[s]] += p(s);
        ++count[comp_of_slot[s]];
      }
      for (long s = 0; s < np_all; ++s)
        p(s) -= mean[comp_of_slot[s]] / static_cast<double>(count[comp_of_slot[s]]);
    }
    return p;
  }
};

DynamicCellSolution solve_theta_impl(const VoxelMesh& mesh, Complex lambda, double mu,
                                     double rho_f, double alpha, bool noslip,
                                     ThetaOptions opts) {
  if (!(lambda.real() > 0.0))
    throw NonCoercive("Re(lambda) must be positive for the dynamic cell problem");
  if (mesh.n_fluid_voxels == 0) throw Incompatible("fluid phase is empty");

  ThetaSystem sys(mesh, noslip, mu, alpha, opts);
  SpCMat A = sys.build(lambda, rho_f, opts.stabilize);
  SparseFactor<Complex> factor(std::move(A));

  DynamicCellSolution sol;
  sol.lambda = lambda;
  sol.noslip = noslip;
  sol.K = CMat::Zero(mesh.dim, mesh.dim);
  sol.K_energy = CMat::Zero(mesh.dim, mesh.dim);

  std::vector<CVec> loads(mesh.dim), u_sub(mesh.dim);
  for (int p = 0; p < mesh.dim; ++p) {
    Vec load = restrict_vector(phase_load(mesh, Phase::Fluid, p), sys.fluid);
    CVec b = CVec::Zero(sys.nu + sys.np);
    b.head(sys.nu) = load.cast<Complex>();
    CVec x = factor.solve(b, opts.tol);
    u_sub[p] = x.head(sys.nu);
    loads[p] = load.cast<Complex>();
    sol.theta.push_back(prolong_vector(CVec(x.head(sys.nu)), sys.fluid, mesh.vector_dofs()));
    sol.pressure.push_back(sys.expand_pressure(x.segment(sys.nu, sys.np)));
    double dv = (sys.B * x.head(sys.nu)).cwiseAbs().maxCoeff();
    sol.max_div = std::max(sol.max_div, dv);
  }

  // K_pq via the load functional and via the energy pairing (bilinear, no
  // conjugation): both equal int_{Y_f} theta_q . e_p.
  Complex cm = lambda * lambda * rho_f;
  for (int p = 0; p < mesh.dim; ++p)
    for (int q = 0; q < mesh.dim; ++q) {
      sol.K(p, q) = loads[p].transpose() * u_sub[q];
      CVec Au = cm * (sys.M * u_sub[q]) + lambda * (sys.G * u_sub[q]);
      if (sys.Gamma.nonZeros() > 0) Au += lambda * (sys.Gamma * u_sub[q]);
      sol.K_energy(p, q) = u_sub[p].transpose() * Au;
    }
  return sol;
}

} // namespace

DynamicCellSolution solve_theta(const VoxelMesh& mesh, Complex lambda, double mu,
                                double rho_f, double alpha, ThetaOptions opts) {
  return solve_theta_impl(mesh, lambda, mu, rho_f, alpha, false, opts);
}

DynamicCellSolution solve_theta_noslip(const VoxelMesh& mesh, Complex lambda, double mu,
                                       double rho_f, ThetaOptions opts) {
  return solve_theta_impl(mesh, lambda, mu, rho_f, 0.0, true, opts);
}

Mat mass_projection_limit(const VoxelMesh& mesh, double rho_f) {
  Subspace fluid = side_subspace(mesh, 1);
  SpMat M = restrict_matrix(assemble_fluid_mass(mesh, rho_f).op, fluid, fluid);
  Subspace prows = Subspace::from_mask(std::vector<char>(mesh.n_fluid_voxels, 1));
  SpMat B = restrict_matrix(assemble_divergence(mesh, Phase::Fluid).op, prows, fluid);
  long nu = fluid.size(), np = mesh.n_fluid_voxels;
  std::vector<Triplet> trips;
  for (int k = 0; k < M.outerSize(); ++k)
    for (SpMat::InnerIterator it(M, k); it; ++it)
      trips.emplace_back(it.row(), it.col(), it.value());
  for (int k = 0; k < B.outerSize(); ++k)
    for (SpMat::InnerIterator it(B, k); it; ++it) {
      trips.emplace_back(nu + it.row(), it.col(), it.value());
      trips.emplace_back(it.col(), nu + it.row(), it.value());
    }
  SpMat A(nu + np, nu + np);
  A.setFromTriplets(trips.begin(), trips.end());
  SparseFactor<double> factor(std::move(A));

  Mat limit = Mat::Zero(mesh.dim, mesh.dim);
  std::vector<Vec> loads(mesh.dim), sols(mesh.dim);
  for (int p = 0; p < mesh.dim; ++p) {
    loads[p] = restrict_vector(phase_load(mesh, Phase::Fluid, p), fluid);
    Vec b = Vec::Zero(nu + np);
    b.head(nu) = loads[p];
    sols[p] = factor.solve(b).head(nu);
  }
  for (int p = 0; p < mesh.dim; ++p)
    for (int q = 0; q < mesh.dim; ++q) limit(p, q) = rho_f * loads[p].dot(sols[q]);
  return limit;
}

} // namespace poro
