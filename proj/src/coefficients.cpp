#include "poro/coefficients.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <thread>

#include "poro/errors.hpp"

namespace poro {

Mat compute_q(const VoxelMesh& mesh, const ElasticModel& model,
              const std::vector<Vec>& chi_ij) {
  const int nv = voigt_size(mesh.dim);
  if (static_cast<int>(chi_ij.size()) != nv)
    throw MissingSolutions("expected " + std::to_string(nv) + " strain correctors");
  Mat q = Mat::Zero(nv, nv);
  for (int a = 0; a < nv; ++a) {
    Vec xa = Vec::Zero(nv);
    xa(a) = -1.0; // chi - p carries strain e(chi) - xi_a
    for (int b = a; b < nv; ++b) {
      Vec xb = Vec::Zero(nv);
      xb(b) = -1.0;
      double val = elastic_energy_with_affine(mesh, model, chi_ij[a], xa, chi_ij[b], xb);
      q(a, b) = val;
      q(b, a) = val;
    }
  }
  return q;
}

std::pair<Mat, double> compute_betas(const VoxelMesh& mesh, const ElasticModel& model,
                                     const Vec& chi, const std::vector<Vec>& chi_ij) {
  const int nv = voigt_size(mesh.dim);
  if (static_cast<int>(chi_ij.size()) != nv || chi.size() != mesh.vector_dofs())
    throw MissingSolutions("static cell solutions missing or mis-sized");
  Vec zero = Vec::Zero(nv);
  Mat beta_ij = Mat::Zero(mesh.dim, mesh.dim);
  for (int v = 0; v < nv; ++v) {
    auto [i, j] = voigt_pair(mesh.dim, v);
    double b = -divergence_integral_with_affine(mesh, Phase::Solid, chi_ij[v], zero);
    beta_ij(i, j) = b;
    beta_ij(j, i) = b;
  }
  double beta = divergence_integral_with_affine(mesh, Phase::Solid, chi, zero);
  double cross = elastic_energy_with_affine(mesh, model, chi, zero, chi, zero);
  double scale = std::max(1.0, std::abs(cross));
  if (std::abs(beta - cross) > 1e-9 * scale)
    throw Incompatible("beta two-route identity violated: int div chi = " +
                       std::to_string(beta) + " vs q(chi,chi) = " + std::to_string(cross));
  if (beta < 0.0) {
    if (beta < -1e-12)
      throw Incompatible("beta = " + std::to_string(beta) + " negative beyond roundoff");
    beta = 0.0;
  }
  return {beta_ij, beta};
}

double compute_delta(double Pi, double gamma, double beta) {
  if (!(Pi > 0.0 && Pi < 1.0)) throw Incompatible("Pi must lie in (0,1)");
  if (!(gamma > 0.0)) throw Incompatible("gamma must be positive");
  if (!(beta >= 0.0)) throw Incompatible("beta must be nonnegative");
  return 1.0 / (Pi / gamma + beta);
}

std::vector<PermeabilitySample> compute_permeability(
    const std::vector<DynamicCellSolution>& solutions) {
  if (solutions.empty()) throw MissingSolutions("no dynamic cell solutions supplied");
  std::vector<PermeabilitySample> out;
  out.reserve(solutions.size());
  for (const auto& s : solutions) out.push_back({s.lambda, s.K});
  return out;
}

Mat high_lambda_limit(const std::vector<PermeabilitySample>& samples, double rho_f,
                      double* error_estimate) {
  // Collect samples with |lambda| in the top decade, ascending.
  double lmax = 0.0;
  for (const auto& s : samples) lmax = std::max(lmax, std::abs(s.lambda));
  std::vector<const PermeabilitySample*> top;
  for (const auto& s : samples)
    if (std::abs(s.lambda) > lmax / 10.0) top.push_back(&s);
  if (top.size() < 3)
    throw InsufficientSamples("need at least 3 samples in the top lambda decade, have " +
                              std::to_string(top.size()));
  std::sort(top.begin(), top.end(), [](auto* a, auto* b) {
    return std::abs(a->lambda) < std::abs(b->lambda);
  });

  auto H = [&](const PermeabilitySample* s) -> Mat {
    return (s->lambda * s->lambda * rho_f * s->K).real();
  };
  // H(lambda) = H_inf + c/lambda + O(1/lambda^2): eliminate the 1/lambda term
  // pairwise, then once more across the two first-order extrapolants.
  size_t n = top.size();
  auto extrap1 = [&](const PermeabilitySample* a, const PermeabilitySample* b) -> Mat {
    double xa = 1.0 / std::abs(a->lambda), xb = 1.0 / std::abs(b->lambda);
    return H(b) + xb / (xa - xb) * (H(b) - H(a));
  };
  Mat e01 = extrap1(top[n - 3], top[n - 2]);
  Mat e12 = extrap1(top[n - 2], top[n - 1]);
  double x01 = 1.0 / std::abs(top[n - 2]->lambda);
  double x12 = 1.0 / std::abs(top[n - 1]->lambda);
  Mat e2 = e12 + x12 / (x01 - x12) * (e12 - e01);
  if (error_estimate) *error_estimate = (e2 - e12).cwiseAbs().maxCoeff();
  return e2;
}

std::vector<Complex> default_lambda_grid() {
  std::vector<Complex> grid;
  const int n = 24;
  for (int i = 0; i < n; ++i) {
    double t = static_cast<double>(i) / (n - 1);
    grid.emplace_back(std::pow(10.0, -2.0 + 6.0 * t), 0.0);
  }
  return grid;
}

EffectiveCoefficients compute_effective_coefficients(const PhaseCell& cell,
                                                     const std::vector<Complex>& lambdas,
                                                     int threads) {
  VoxelMesh mesh = build_periodic_mesh(cell);
  ElasticModel model{cell.materials.a, {}};
  StaticCellSolutions stat = solve_static_cell(mesh, model);

  EffectiveCoefficients eff;
  eff.dim = cell.dim;
  auto [fs, pi] = volume_fractions(cell);
  (void)fs;
  eff.Pi = pi;
  eff.gamma = cell.materials.gamma();
  eff.rho_s = cell.materials.rho_s;
  eff.rho_f = cell.materials.rho_f;
  eff.q_voigt = compute_q(mesh, model, stat.chi_ij);
  auto [bij, beta] = compute_betas(mesh, model, stat.chi, stat.chi_ij);
  eff.beta_ij = bij;
  eff.beta = beta;
  eff.delta = compute_delta(eff.Pi, eff.gamma, eff.beta);

  std::vector<DynamicCellSolution> sols(lambdas.size());
  if (threads <= 1 || lambdas.size() <= 1) {
    for (size_t i = 0; i < lambdas.size(); ++i)
      sols[i] = solve_theta(mesh, lambdas[i], cell.materials.mu, cell.materials.rho_f,
                            cell.materials.alpha);
  } else {
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= lambdas.size()) return;
        sols[i] = solve_theta(mesh, lambdas[i], cell.materials.mu, cell.materials.rho_f,
                              cell.materials.alpha);
      }
    };
    std::vector<std::thread> pool;
    int nt = std::min<int>(threads, static_cast<int>(lambdas.size()));
    for (int t = 0; t < nt; ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
  }
  eff.K_samples = compute_permeability(sols);
  return eff;
}

} // namespace poro
