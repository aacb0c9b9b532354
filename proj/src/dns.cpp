#include "poro/dns.hpp"

#include <cmath>

#include "poro/errors.hpp"
#include "poro/forms.hpp"
#include "poro/linsolve.hpp"

namespace poro {

namespace {

VoxelMesh tile_base_cell(const DnsConfig& cfg) {
  const PhaseCell& base = cfg.base;
  if (base.dim != 2) throw GeometryError("the fine-scale solver supports 2D composites");
  int density = cfg.density > 0 ? cfg.density : base.resolution;
  if (density % base.resolution != 0)
    throw GeometryError("density per cell must be a multiple of the base resolution");
  if (cfg.cells < 1) throw GeometryError("need at least one cell across Omega");
  int up = density / base.resolution;
  int n = cfg.cells * density; // voxels per axis
  std::vector<Phase> phase(static_cast<long>(n) * n);
  for (int j = 0; j < n; ++j)
    for (int i = 0; i < n; ++i) {
      int bi = (i / up) % base.resolution;
      int bj = (j / up) % base.resolution;
      phase[i + static_cast<long>(n) * j] = base.at(bi, bj);
    }
  // Lemma for the boundary Korn argument needs solid on the outer boundary.
  bool solid_on_boundary = false;
  for (int i = 0; i < n && !solid_on_boundary; ++i)
    if (phase[i] == Phase::Solid || phase[i + static_cast<long>(n) * (n - 1)] == Phase::Solid ||
        phase[static_cast<long>(n) * i] == Phase::Solid ||
        phase[n - 1 + static_cast<long>(n) * i] == Phase::Solid)
      solid_on_boundary = true;
  if (!solid_on_boundary)
    throw GeometryError("solid phase does not touch the outer boundary of Omega");
  return build_box_mesh(2, {n, n, 1}, cfg.extent, std::move(phase), cfg.conforming);
}

} // namespace

DnsResult solve_eps_on_mesh(VoxelMesh mesh, const MaterialParams& materials, double epsilon,
                            Complex lambda, const MacroForcing& forcing, double extent) {
  if (!(lambda.real() > 0.0)) throw NonCoercive("Re(lambda) must be positive");
  const double eps2 = epsilon * epsilon;

  ElasticModel model{materials.a, {}};
  SpMat Ks = assemble_elastic(mesh, model).op;
  SpMat Ms = assemble_solid_mass(mesh, 1.0).op;
  SpMat Mf = assemble_fluid_mass(mesh, 1.0).op;
  SpMat Cf = assemble_div_div(mesh, Phase::Fluid, materials.gamma()).op;
  SpMat Bv = assemble_fluid_viscous(mesh, materials.mu, GradientForm::Symmetrized).op;
  SpMat Bd = assemble_div_div(mesh, Phase::Fluid, materials.eta).op;
  SpMat Gi = assemble_interface(mesh, materials.alpha).op;

  Subspace free = broken_subspace(mesh, /*drop_boundary=*/true);
  auto R = [&](const SpMat& A) { return restrict_matrix(A, free, free); };
  SpMat rKs = R(Ks), rMs = R(Ms), rMf = R(Mf), rCf = R(Cf), rBv = R(Bv), rBd = R(Bd),
        rGi = R(Gi);

  MacroDomain dom{2, {extent, extent}, {1, 1}};
  Complex fhat = forcing.transform(lambda);
  Vec load_shape = scalar_field_load(
      mesh, [&](const std::array<double, 3>& x) { return forcing.shape(dom, {x[0], x[1]}); },
      forcing.component);
  CVec b = restrict_vector(load_shape, free).cast<Complex>() * fhat;

  // a^eps = lambda^2 (rho mass) + c^eps + lambda eps^2 b^eps + lambda eps (slip)
  Complex l2 = lambda * lambda;
  SpCMat A = (l2 * materials.rho_s) * rMs.cast<Complex>() +
             (l2 * materials.rho_f) * rMf.cast<Complex>() + rKs.cast<Complex>() +
             rCf.cast<Complex>() + (lambda * eps2) * (rBv + rBd).cast<Complex>() +
             (lambda * epsilon) * rGi.cast<Complex>();

  CVec x = sparse_solve<Complex>(A, b, 1e-9);

  DnsResult res;
  res.lambda = lambda;
  res.epsilon = epsilon;
  res.residual = b.norm() > 0 ? (b - A * x).norm() / b.norm() : 0.0;
  res.u = prolong_vector(x, free, mesh.vector_dofs());

  auto quad = [&](const SpMat& M) { return x.dot(M.cast<Complex>() * x).real(); };
  res.elastic_energy = quad(rKs);
  res.compression_energy = quad(rCf);
  res.viscous_energy = eps2 * quad(rBv + rBd);
  res.interface_energy = epsilon * quad(rGi);

  double mass_term = materials.rho_s * quad(rMs) + materials.rho_f * quad(rMf);
  Complex a_sesq = l2 * mass_term + res.elastic_energy + res.compression_energy +
                   lambda * (res.viscous_energy + res.interface_energy);
  res.coercivity_witness = (a_sesq / lambda).real();
  Complex fu = x.dot(b); // conj(x)^T b = load functional at the solution
  res.galerkin_gap = std::abs(a_sesq - fu) / std::max(1e-30, std::abs(fu));

  // phase averages of the solution
  res.solid_average = CVec::Zero(mesh.dim);
  res.fluid_average = CVec::Zero(mesh.dim);
  double vol_s = 0.0, vol_f = 0.0;
  for (int c = 0; c < mesh.dim; ++c) {
    Vec ls = phase_load(mesh, Phase::Solid, c);
    Vec lf = phase_load(mesh, Phase::Fluid, c);
    res.solid_average(c) = ls.cast<Complex>().dot(res.u);
    res.fluid_average(c) = lf.cast<Complex>().dot(res.u);
    if (c == 0) {
      vol_s = ls.sum();
      vol_f = lf.sum();
    }
  }
  if (vol_s > 0) res.solid_average /= vol_s;
  if (vol_f > 0) res.fluid_average /= vol_f;

  res.mesh = std::move(mesh);
  return res;
}

DnsResult solve_eps_problem(const DnsConfig& config) {
  VoxelMesh mesh = tile_base_cell(config);
  double epsilon = config.extent / config.cells;
  return solve_eps_on_mesh(std::move(mesh), config.base.materials, epsilon, config.lambda,
                           config.forcing, config.extent);
}

GapEntry homogenization_gap(const DnsResult& dns, const MacroSolution& macro,
                            const MacroField& field) {
  const VoxelMesh& mesh = dns.mesh;
  if (macro.domain.dim != mesh.dim) throw MeshMismatch("macro/DNS dimension mismatch");
  double extent = mesh.nv[0] * mesh.h[0];
  if (std::abs(macro.domain.extent[0] - extent) > 1e-12 ||
      std::abs(macro.domain.extent[1] - mesh.nv[1] * mesh.h[1]) > 1e-12)
    throw MeshMismatch("macro and DNS domains differ");
  if (std::abs(field.lambda - dns.lambda) > 1e-12 * (1.0 + std::abs(dns.lambda)))
    throw MeshMismatch("macro field solved at a different lambda");

  int cells = static_cast<int>(std::round(extent / dns.epsilon));
  int per_cell = mesh.nv[0] / cells;
  if (per_cell * cells != mesh.nv[0]) throw MeshMismatch("epsilon does not divide the grid");

  // Integrate u over each epsilon-cell: per element, each basis function
  // integrates to measure/2^dim.
  Eigen::MatrixXcd avg = Eigen::MatrixXcd::Zero(static_cast<long>(cells) * cells, mesh.dim);
  const double phi_int = mesh.element_measure() / (1 << mesh.dim);
  std::array<long, 8> nodes{};
  for (int j = 0; j < mesh.nv[1]; ++j)
    for (int i = 0; i < mesh.nv[0]; ++i) {
      long v = mesh.voxel_index(i, j, 0);
      int side = mesh.phase[v] == Phase::Solid ? 0 : 1;
      mesh.element_nodes(i, j, 0, nodes);
      long cell = (i / per_cell) + static_cast<long>(cells) * (j / per_cell);
      for (int l = 0; l < (1 << mesh.dim); ++l)
        for (int c = 0; c < mesh.dim; ++c)
          avg(cell, c) += phi_int * dns.u(mesh.vdof(nodes[l], side, c));
    }
  double cell_vol = dns.epsilon * dns.epsilon;
  avg /= cell_vol;

  GapEntry entry;
  entry.epsilon = dns.epsilon;
  double gap2 = 0.0, dns2 = 0.0, mac2 = 0.0;
  for (int cj = 0; cj < cells; ++cj)
    for (int ci = 0; ci < cells; ++ci) {
      std::array<double, 2> center{(ci + 0.5) * dns.epsilon, (cj + 0.5) * dns.epsilon};
      CVec u0 = macro.eval_u0(field, center);
      long cell = ci + static_cast<long>(cells) * cj;
      CVec a = avg.row(cell).transpose();
      gap2 += cell_vol * (a - u0).squaredNorm();
      dns2 += cell_vol * a.squaredNorm();
      mac2 += cell_vol * u0.squaredNorm();
    }
  entry.gap = std::sqrt(gap2);
  entry.dns_norm = std::sqrt(dns2);
  entry.macro_norm = std::sqrt(mac2);
  return entry;
}

} // namespace poro
