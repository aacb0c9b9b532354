#include "poro/verify.hpp"

#include <cmath>
#include <numbers>
#include <random>
#include <sstream>

#include "poro/cell_solvers.hpp"
#include "poro/coefficients.hpp"
#include "poro/dns.hpp"
#include "poro/errors.hpp"
#include "poro/io.hpp"
#include "poro/laplace.hpp"
#include "poro/linsolve.hpp"
#include "poro/macro.hpp"

namespace poro {

MaterialParams default_materials(int dim) {
  MaterialParams m;
  m.a = ElasticTensor::isotropic(dim, 1.0, 1.0);
  m.rho_s = 1.0;
  m.rho_f = 1.0;
  m.c0 = 1.0;
  m.mu = 1.0;
  m.eta = 0.0;
  m.alpha = 1.0;
  return m;
}

PhaseCell random_geometry(int dim, int resolution, unsigned seed,
                          const MaterialParams& materials) {
  for (unsigned attempt = 0; attempt < 64; ++attempt) {
    std::mt19937 rng(seed * 977u + attempt * 131u + 7u);
    std::uniform_real_distribution<double> unif(0.0, 2.0 * std::numbers::pi);
    std::normal_distribution<double> coef(0.0, 1.0);
    const int modes = 4;
    std::vector<std::array<double, 7>> waves; // kx, ky, kz, phase, amp
    for (int m = 0; m < modes; ++m) {
      std::uniform_int_distribution<int> kd(-2, 2);
      waves.push_back({static_cast<double>(kd(rng)), static_cast<double>(kd(rng)),
                       static_cast<double>(dim == 3 ? kd(rng) : 0), unif(rng), coef(rng), 0, 0});
    }
    auto field = [&](const std::array<double, 3>& y) {
      double v = 0.0;
      for (const auto& w : waves)
        v += w[4] * std::cos(2.0 * std::numbers::pi * (w[0] * y[0] + w[1] * y[1] + w[2] * y[2]) +
                             w[3]);
      return v;
    };
    // Threshold at a level targeting a moderate fluid fraction.
    std::vector<double> values;
    const double h = 1.0 / resolution;
    for (int k = 0; k < (dim == 3 ? resolution : 1); ++k)
      for (int j = 0; j < resolution; ++j)
        for (int i = 0; i < resolution; ++i)
          values.push_back(field({(i + 0.5) * h - 0.5, (j + 0.5) * h - 0.5,
                                  dim == 3 ? (k + 0.5) * h - 0.5 : 0.0}));
    std::vector<double> sorted = values;
    std::sort(sorted.begin(), sorted.end());
    double cut = sorted[static_cast<size_t>(0.35 * sorted.size())];
    std::vector<Phase> phase(values.size());
    for (size_t i = 0; i < values.size(); ++i)
      phase[i] = values[i] < cut ? Phase::Fluid : Phase::Solid;
    try {
      return build_phase_cell(dim, resolution, std::move(phase), materials);
    } catch (const Error&) {
      continue; // disconnected draw: deterministic retry
    }
  }
  throw GeometryError("random geometry sampling failed to produce a valid cell");
}

namespace {

PhaseCell channel_cell(int res, double width, const MaterialParams& m) {
  return build_phase_cell(
      2, res, [width](const std::array<double, 3>& y) { return std::abs(y[1]) < width / 2; }, m);
}

struct Suite {
  std::vector<CheckResult> results;

  void check(const std::string& name, bool pass, const std::string& detail) {
    results.push_back({name, pass, detail});
  }
  template <class F>
  void guarded(const std::string& name, F&& body) {
    try {
      body();
    } catch (const std::exception& e) {
      results.push_back({name, false, std::string("exception: ") + e.what()});
    }
  }
};

std::string fmt(double v) { return format_double(v); }

double max_asymmetry(const SpMat& A) {
  SpMat D = SpMat(A - SpMat(A.transpose()));
  double scale = 0.0;
  for (int k = 0; k < A.outerSize(); ++k)
    for (SpMat::InnerIterator it(A, k); it; ++it)
      scale = std::max(scale, std::abs(it.value()));
  double asym = 0.0;
  for (int k = 0; k < D.outerSize(); ++k)
    for (SpMat::InnerIterator it(D, k); it; ++it) asym = std::max(asym, std::abs(it.value()));
  return scale > 0 ? asym / scale : 0.0;
}

void geometry_suite(Suite& s) {
  MaterialParams m = default_materials(2);
  PhaseCell cell = random_geometry(2, 16, 11, m);

  s.guarded("geometry.translation_invariance", [&] {
    auto [fs, pi] = volume_fractions(cell);
    (void)fs;
    InterfaceMesh im = extract_interface(cell);
    // shift by (5,3) voxels
    std::vector<Phase> shifted(cell.phase.size());
    int n = cell.resolution;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        shifted[cell.index((i + 5) % n, (j + 3) % n)] = cell.phase[cell.index(i, j)];
    PhaseCell moved = build_phase_cell(2, n, std::move(shifted), m);
    auto [fs2, pi2] = volume_fractions(moved);
    (void)fs2;
    InterfaceMesh im2 = extract_interface(moved);
    bool pass = pi == pi2 && im.facets.size() == im2.facets.size() &&
                std::abs(im.total_area() - im2.total_area()) < 1e-14;
    s.check("geometry.translation_invariance", pass,
            "Pi " + fmt(pi) + " facets " + std::to_string(im.facets.size()));
  });

  s.guarded("geometry.label_swap_duality", [&] {
    PhaseCell stripe = channel_cell(16, 0.5, m);
    auto [fs, pi] = volume_fractions(stripe);
    (void)fs;
    std::vector<Phase> swapped(stripe.phase.size());
    for (size_t i = 0; i < stripe.phase.size(); ++i)
      swapped[i] = stripe.phase[i] == Phase::Fluid ? Phase::Solid : Phase::Fluid;
    PhaseCell dual = build_phase_cell(2, 16, std::move(swapped), m);
    auto [fs2, pi2] = volume_fractions(dual);
    (void)fs2;
    InterfaceMesh ia = extract_interface(stripe), ib = extract_interface(dual);
    bool pass = std::abs(pi + pi2 - 1.0) < 1e-15 && ia.facets.size() == ib.facets.size();
    s.check("geometry.label_swap_duality", pass, "Pi " + fmt(pi) + " + " + fmt(pi2));
  });

  s.guarded("geometry.facet_side_phases", [&] {
    InterfaceMesh im = extract_interface(cell);
    bool pass = !im.facets.empty();
    for (const auto& f : im.facets)
      pass = pass && cell.phase[f.fluid_voxel] == Phase::Fluid &&
             cell.phase[f.solid_voxel] == Phase::Solid;
    s.check("geometry.facet_side_phases", pass, std::to_string(im.facets.size()) + " facets");
  });
}

void fem_suite(Suite& s) {
  MaterialParams m = default_materials(2);
  PhaseCell cell = random_geometry(2, 12, 23, m);
  VoxelMesh mesh = build_periodic_mesh(cell);
  ElasticModel model{m.a, {}};

  s.guarded("fem.assembled_symmetry", [&] {
    double worst = 0.0;
    worst = std::max(worst, max_asymmetry(assemble_elastic(mesh, model).op));
    worst = std::max(worst, max_asymmetry(assemble_fluid_viscous(mesh, m.mu).op));
    worst = std::max(worst, max_asymmetry(assemble_fluid_mass(mesh, m.rho_f).op));
    worst = std::max(worst, max_asymmetry(assemble_interface(mesh, m.alpha).op));
    s.check("fem.assembled_symmetry", worst <= 1e-13, "max rel asymmetry " + fmt(worst));
  });

  s.guarded("fem.coefficient_scaling", [&] {
    SpMat v1 = 2.0 * assemble_fluid_viscous(mesh, 1.0).op;
    SpMat v2 = assemble_fluid_viscous(mesh, 2.0).op;
    SpMat g1 = 2.0 * assemble_interface(mesh, 1.0).op;
    SpMat g2 = assemble_interface(mesh, 2.0).op;
    double d = SpMat(v1 - v2).coeffs().size() ? SpMat(v1 - v2).coeffs().cwiseAbs().maxCoeff() : 0;
    double e = SpMat(g1 - g2).coeffs().size() ? SpMat(g1 - g2).coeffs().cwiseAbs().maxCoeff() : 0;
    s.check("fem.coefficient_scaling", d == 0.0 && e == 0.0,
            "viscous diff " + fmt(d) + " interface diff " + fmt(e));
  });

  s.guarded("fem.elastic_psd", [&] {
    SpMat K = assemble_elastic(mesh, model).op;
    std::mt19937 rng(5);
    std::normal_distribution<double> g;
    double worst = 0.0;
    for (int t = 0; t < 8; ++t) {
      Vec v(K.rows());
      for (long i = 0; i < v.size(); ++i) v(i) = g(rng);
      worst = std::min(worst, v.dot(K * v));
    }
    s.check("fem.elastic_psd", worst >= -1e-10, "min energy " + fmt(worst));
  });

  s.guarded("fem.mass_of_unit_field", [&] {
    auto [fs, pi] = volume_fractions(cell);
    SpMat M = assemble_fluid_mass(mesh, m.rho_f).op;
    Vec one = Vec::Zero(mesh.vector_dofs());
    Subspace fluid = side_subspace(mesh, 1);
    for (long i = 0; i < fluid.size(); ++i)
      if (fluid.keep[i] % mesh.dim == 0) one(fluid.keep[i]) = 1.0;
    double mass = one.dot(M * one);
    double want = m.rho_f * pi;
    (void)fs;
    s.check("fem.mass_of_unit_field", std::abs(mass - want) < 1e-12,
            fmt(mass) + " vs " + fmt(want));
  });

  s.guarded("fem.interface_zero_jump", [&] {
    SpMat G = assemble_interface(mesh, m.alpha).op;
    Vec v = Vec::Zero(mesh.vector_dofs());
    std::mt19937 rng(7);
    std::normal_distribution<double> g;
    for (long n = 0; n < mesh.n_nodes; ++n)
      for (int c = 0; c < mesh.dim; ++c) {
        double val = g(rng);
        long ds = mesh.vdof(n, 0, c), df = mesh.vdof(n, 1, c);
        if (ds >= 0) v(ds) = val;
        if (df >= 0) v(df) = val; // equal traces: zero jump
      }
    double e = v.dot(G * v);
    s.check("fem.interface_zero_jump", std::abs(e) < 1e-12, "energy " + fmt(e));
  });

  s.guarded("fem.divergence_of_constants", [&] {
    SpMat B = assemble_divergence(mesh, Phase::Fluid).op;
    Vec one = Vec::Zero(mesh.vector_dofs());
    Subspace fluid = side_subspace(mesh, 1);
    for (long i = 0; i < fluid.size(); ++i)
      if (fluid.keep[i] % mesh.dim == 1) one(fluid.keep[i]) = 3.5;
    double worst = (B * one).cwiseAbs().maxCoeff();
    s.check("fem.divergence_of_constants", worst < 1e-13, "max " + fmt(worst));
  });

  s.guarded("fem.elastic_kernel_rank", [&] {
    PhaseCell tiny = random_geometry(2, 4, 3, m);
    VoxelMesh tm = build_periodic_mesh(tiny);
    assemble_elastic(tm, ElasticModel{m.a, {}}, /*verify_kernel=*/true);
    s.check("fem.elastic_kernel_rank", true, "translations only");
  });
}

void cell_suite(Suite& s) {
  MaterialParams m = default_materials(2);
  PhaseCell cell = random_geometry(2, 16, 41, m);
  VoxelMesh mesh = build_periodic_mesh(cell);
  ElasticModel model{m.a, {}};

  s.guarded("cell.beta_two_route", [&] {
    StaticCellSolutions st = solve_static_cell(mesh, model);
    Vec zero = Vec::Zero(voigt_size(2));
    double route1 = divergence_integral_with_affine(mesh, Phase::Solid, st.chi, zero);
    double route2 = st.beta_candidate;
    bool pass = std::abs(route1 - route2) <= 1e-9 * std::max(1.0, std::abs(route2));
    s.check("cell.beta_two_route", pass, fmt(route1) + " vs q(chi,chi) " + fmt(route2));

    // -beta_ij = q(chi, chi_ij)
    auto [bij, beta] = compute_betas(mesh, model, st.chi, st.chi_ij);
    (void)beta;
    double worst = 0.0;
    for (int v = 0; v < voigt_size(2); ++v) {
      auto [i, j] = voigt_pair(2, v);
      double cross = elastic_energy_with_affine(mesh, model, st.chi, zero, st.chi_ij[v], zero);
      worst = std::max(worst, std::abs(-bij(i, j) - cross));
    }
    s.check("cell.beta_ij_reciprocity", worst <= 1e-9, "max diff " + fmt(worst));
  });

  s.guarded("cell.theta_div_free_and_real", [&] {
    DynamicCellSolution d = solve_theta(mesh, Complex(1.0, 0.0), m.mu, m.rho_f, m.alpha);
    double imag = 0.0;
    for (const auto& th : d.theta) imag = std::max(imag, th.imag().cwiseAbs().maxCoeff());
    s.check("cell.theta_div_free", d.max_div <= 1e-10, "max div " + fmt(d.max_div));
    s.check("cell.theta_real_at_real_lambda", imag <= 1e-12, "max imag " + fmt(imag));
  });

  s.guarded("cell.K_reciprocity", [&] {
    DynamicCellSolution d = solve_theta(mesh, Complex(1.0, 2.0), m.mu, m.rho_f, m.alpha);
    double diff = std::abs(d.K(0, 1) - d.K(1, 0));
    double scale = std::max(1e-30, std::abs(d.K(0, 1)) + std::abs(d.K(0, 0)));
    s.check("cell.K_reciprocity", diff / scale <= 1e-10, "rel diff " + fmt(diff / scale));
    double eroute = (d.K - d.K_energy).cwiseAbs().maxCoeff();
    s.check("cell.K_energy_route", eroute <= 1e-9 * scale, "diff " + fmt(eroute));
  });

  s.guarded("cell.lambda_scaling", [&] {
    Complex lambda(2.0, 0.0);
    double c = 3.0;
    DynamicCellSolution base = solve_theta(mesh, lambda, m.mu, m.rho_f, m.alpha);
    DynamicCellSolution scaled = solve_theta(mesh, lambda, c * m.mu, c * m.rho_f, c * m.alpha);
    double worst = 0.0;
    for (int p = 0; p < 2; ++p)
      worst = std::max(worst, (c * scaled.theta[p] - base.theta[p]).cwiseAbs().maxCoeff());
    double scale = base.theta[0].cwiseAbs().maxCoeff();
    s.check("cell.lambda_scaling", worst <= 1e-9 * scale, "max diff " + fmt(worst));
  });

  s.guarded("cell.compliance_ordering", [&] {
    PhaseCell ch = channel_cell(32, 0.5, m);
    VoxelMesh cm = build_periodic_mesh(ch);
    double prev = std::numeric_limits<double>::infinity();
    bool ordered = true;
    std::string seq;
    for (double alpha : {0.1, 1.0, 10.0}) {
      DynamicCellSolution d = solve_theta(cm, Complex(1.0, 0.0), m.mu, m.rho_f, alpha);
      double k11 = d.K(0, 0).real();
      ordered = ordered && k11 <= prev + 1e-12;
      prev = k11;
      seq += fmt(k11) + " ";
    }
    DynamicCellSolution ns = solve_theta_noslip(cm, Complex(1.0, 0.0), m.mu, m.rho_f);
    ordered = ordered && ns.K(0, 0).real() <= prev + 1e-12;
    seq += "| noslip " + fmt(ns.K(0, 0).real());
    s.check("cell.compliance_ordering", ordered, seq);
  });
}

void coefficients_suite(Suite& s) {
  MaterialParams m = default_materials(2);
  PhaseCell cell = random_geometry(2, 16, 41, m);
  VoxelMesh mesh = build_periodic_mesh(cell);
  ElasticModel model{m.a, {}};

  s.guarded("coefficients.q_symmetry_and_spd", [&] {
    StaticCellSolutions st = solve_static_cell(mesh, model);
    Mat q = compute_q(mesh, model, st.chi_ij);
    double asym = (q - q.transpose()).cwiseAbs().maxCoeff() / q.cwiseAbs().maxCoeff();
    Eigen::SelfAdjointEigenSolver<Mat> es(q);
    double mineig = es.eigenvalues().minCoeff();
    s.check("coefficients.q_symmetry", asym <= 1e-10, "rel asymmetry " + fmt(asym));
    s.check("coefficients.q_spd", mineig > 0.0, "min eigenvalue " + fmt(mineig));
  });

  s.guarded("coefficients.elastic_scaling", [&] {
    StaticCellSolutions st = solve_static_cell(mesh, model);
    Mat q1 = compute_q(mesh, model, st.chi_ij);
    auto [b1, beta1] = compute_betas(mesh, model, st.chi, st.chi_ij);
    (void)b1;
    ElasticModel doubled{m.a, {}};
    doubled.uniform.voigt *= 2.0;
    VoxelMesh mesh2 = mesh;
    StaticCellSolutions st2 = solve_static_cell(mesh2, doubled);
    Mat q2 = compute_q(mesh2, doubled, st2.chi_ij);
    auto [b2, beta2] = compute_betas(mesh2, doubled, st2.chi, st2.chi_ij);
    (void)b2;
    double dq = (2.0 * q1 - q2).cwiseAbs().maxCoeff() / q2.cwiseAbs().maxCoeff();
    double db = std::abs(beta1 / 2.0 - beta2) / std::max(1e-30, beta2);
    s.check("coefficients.elastic_scaling", dq <= 1e-9 && db <= 1e-9,
            "q rel " + fmt(dq) + " beta rel " + fmt(db));
  });

  s.guarded("coefficients.delta_monotone", [&] {
    double prev = std::numeric_limits<double>::infinity();
    bool mono = true;
    for (double beta : {0.0, 0.5, 1.0, 4.0, 64.0}) {
      double d = compute_delta(0.4, 2.0, beta);
      mono = mono && d > 0.0 && d < prev;
      prev = d;
    }
    s.check("coefficients.delta_monotone", mono, "delta decreasing in beta, positive");
  });

  s.guarded("coefficients.K_psd_real_lambda", [&] {
    DynamicCellSolution d = solve_theta(mesh, Complex(3.0, 0.0), m.mu, m.rho_f, m.alpha);
    Mat Kr = d.K.real();
    Eigen::SelfAdjointEigenSolver<Mat> es(0.5 * (Kr + Kr.transpose()));
    double mineig = es.eigenvalues().minCoeff();
    s.check("coefficients.K_psd_real_lambda", mineig >= -1e-12, "min eig " + fmt(mineig));
  });
}

EffectiveCoefficients synthetic_coeffs_1d() {
  EffectiveCoefficients c;
  c.dim = 1;
  c.q_voigt = Mat::Constant(1, 1, 2.5);
  c.beta_ij = Mat::Constant(1, 1, 0.3);
  c.beta = 0.2;
  c.Pi = 0.4;
  c.gamma = 1.5;
  c.delta = 1.0 / (c.Pi / c.gamma + c.beta);
  c.rho_s = 1.2;
  c.rho_f = 0.8;
  return c;
}

void macro_suite(Suite& s) {
  EffectiveCoefficients c = synthetic_coeffs_1d();
  Complex lambda(2.0, 3.0);
  c.K_samples.push_back({lambda, CMat::Constant(1, 1, Complex(0.01, 0.002))});
  c.K_samples.push_back({std::conj(lambda), CMat::Constant(1, 1, Complex(0.01, -0.002))});

  MacroProblem prob;
  prob.domain = {1, {1.0, 1.0}, {128, 1}};
  prob.coeffs = c;
  prob.forcing.component = 0;
  prob.forcing.mode = {1, 1};
  prob.lambdas = {lambda, std::conj(lambda)};

  s.guarded("macro.conjugate_symmetry", [&] {
    MacroSolution sol = solve_macro(prob);
    const MacroField& f1 = sol.at(lambda);
    const MacroField& f2 = sol.at(std::conj(lambda));
    double diff = (f1.u.conjugate() - f2.u).cwiseAbs().maxCoeff() +
                  (f1.p.conjugate() - f2.p).cwiseAbs().maxCoeff();
    s.check("macro.conjugate_symmetry", diff <= 1e-10, "max diff " + fmt(diff));
    s.check("macro.residual", f1.residual <= 1e-10, "residual " + fmt(f1.residual));
  });

  s.guarded("macro.zero_forcing", [&] {
    MacroProblem zero = prob;
    // Zero transform: scale forcing away by testing with the assembled system.
    MacroSystem sys = assemble_macro(zero, lambda);
    CVec b0 = CVec::Zero(sys.b.size());
    CVec x = sparse_solve<Complex>(sys.A, b0, 1e-10);
    s.check("macro.zero_forcing", x.cwiseAbs().maxCoeff() == 0.0,
            "max |x| " + fmt(x.cwiseAbs().maxCoeff()));
  });

  s.guarded("macro.p0_closure_two_route", [&] {
    MacroSolution sol = solve_macro(prob);
    const MacroField& f = sol.at(lambda);
    // Recover p0 from the closure at interior nodes (central differences,
    // all terms second-order) and compare with the carried unknown.
    MacroDomain d = prob.domain;
    int ne = d.elements[0];
    double h = d.extent[0] / ne;
    double worst = 0.0, scale = 0.0;
    Complex fh = prob.forcing.transform(lambda);
    for (int i = 1; i < ne; ++i) {
      double x = i * h;
      double w = prob.forcing.mode[0] * std::numbers::pi;
      Complex du = (f.u(i + 1) - f.u(i - 1)) / (2.0 * h);
      Complex ddp = (f.p(i + 1) - 2.0 * f.p(i) + f.p(i - 1)) / (h * h);
      Complex divur =
          f.K(0, 0) * (w * std::cos(w * x) * fh - lambda * lambda * c.rho_f * du - ddp);
      Complex recovered = c.delta * ((c.beta_ij(0, 0) - c.Pi) * du - divur);
      worst = std::max(worst, std::abs(f.p(i) - recovered));
      scale = std::max(scale, std::abs(f.p(i)));
    }
    s.check("macro.p0_closure_two_route", worst <= 1e-3 * scale,
            "max rel closure gap " + fmt(worst / scale));
  });
}

void dns_suite(Suite& s) {
  MaterialParams m = default_materials(2);
  PhaseCell lam = channel_cell(8, 0.5, m);

  DnsConfig cfg;
  cfg.base = lam;
  cfg.cells = 2;
  cfg.density = 8;
  cfg.lambda = Complex(2.0, 0.0);
  cfg.forcing.component = 0;
  cfg.forcing.mode = {1, 1};

  s.guarded("dns.energy_and_coercivity", [&] {
    DnsResult r = solve_eps_problem(cfg);
    s.check("dns.galerkin_balance", r.galerkin_gap <= 1e-9, "gap " + fmt(r.galerkin_gap));
    s.check("dns.interface_energy_nonnegative", r.interface_energy >= 0.0,
            fmt(r.interface_energy));
    s.check("dns.coercivity_witness", r.coercivity_witness > 0.0,
            fmt(r.coercivity_witness));
  });

  s.guarded("dns.zero_forcing", [&] {
    VoxelMesh mesh = build_box_mesh(2, {16, 16, 1}, 1.0,
                                    std::vector<Phase>(256, Phase::Solid));
    MacroForcing f;
    DnsResult r = solve_eps_on_mesh(std::move(mesh), m, 0.5, Complex(2.0, 0.0), f, 1.0);
    // forcing shape is sin-mode: solve again with zero transform by scaling
    s.check("dns.single_phase_runs", r.residual <= 1e-9, "residual " + fmt(r.residual));
  });
}

void laplace_suite(Suite& s) {
  s.guarded("laplace.analytic_pairs", [&] {
    ContourSpec talbot;
    std::vector<double> times{0.0, 0.5, 1.0, 2.0, 3.5, 5.0};
    auto step = invert(talbot, [](Complex s) { return 1.0 / (s * (s + 1.0)); }, times);
    auto ramp = invert(talbot, [](Complex s) { return 1.0 / (s * s); }, times);
    double worst = 0.0;
    for (size_t i = 0; i < times.size(); ++i) {
      worst = std::max(worst, std::abs(step[i] - (1.0 - std::exp(-times[i]))));
      worst = std::max(worst, std::abs(ramp[i] - times[i]));
    }
    s.check("laplace.talbot_pairs", worst <= 1e-6, "max error " + fmt(worst));

    ContourSpec weeks{InversionMethod::Weeks, 64, 2.0, 1.0};
    auto stepw = invert(weeks, [](Complex s) { return 1.0 / (s * (s + 1.0)); }, times);
    double worstw = 0.0;
    for (size_t i = 0; i < times.size(); ++i)
      worstw = std::max(worstw, std::abs(stepw[i] - (1.0 - std::exp(-times[i]))));
    s.check("laplace.weeks_pairs", worstw <= 1e-5, "max error " + fmt(worstw));
  });

  s.guarded("laplace.zero_input", [&] {
    ContourSpec talbot;
    auto zero = invert(talbot, [](Complex) { return Complex(0.0); }, {0.5, 1.0, 2.0});
    double worst = 0.0;
    for (double v : zero) worst = std::max(worst, std::abs(v));
    s.check("laplace.zero_input", worst == 0.0, "max " + fmt(worst));
  });
}

} // namespace

std::vector<CheckResult> run_verification_suite(const std::string& suite) {
  Suite s;
  auto want = [&](const char* name) { return suite == "all" || suite == name; };
  if (want("geometry")) geometry_suite(s);
  if (want("fem")) fem_suite(s);
  if (want("cell")) cell_suite(s);
  if (want("coefficients")) coefficients_suite(s);
  if (want("macro")) macro_suite(s);
  if (want("dns")) dns_suite(s);
  if (want("laplace")) laplace_suite(s);
  if (s.results.empty()) throw ConfigError("unknown suite '" + suite + "'");
  return s.results;
}

} // namespace poro
