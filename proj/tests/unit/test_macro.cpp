#include <doctest.h>

#include <numbers>

#include "oracles/oracles.hpp"
#include "poro/errors.hpp"
#include "poro/macro.hpp"
#include "poro/verify.hpp"

using namespace poro;

namespace {

EffectiveCoefficients synthetic_1d(Complex lambda, Complex K) {
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
  if (K != Complex(0.0)) c.K_samples.push_back({lambda, CMat::Constant(1, 1, K)});
  return c;
}

MacroProblem modal_problem(Complex lambda, Complex K, int elements) {
  MacroProblem prob;
  prob.domain = {1, {1.0, 1.0}, {elements, 1}};
  prob.coeffs = synthetic_1d(lambda, K);
  prob.forcing.component = 0;
  prob.forcing.mode = {1, 1};
  prob.lambdas = {lambda};
  return prob;
}

// Projection of the discrete solution onto the forcing mode, exact for the
// modal solution; Galerkin orthogonality makes it a superconvergent probe.
Complex modal_amplitude(const MacroSolution& sol, const MacroField& f, int mode,
                        bool pressure) {
  const int nq = 2048;
  Complex acc = 0.0;
  double w = mode * std::numbers::pi;
  for (int i = 0; i < nq; ++i) {
    double x = (i + 0.5) / nq;
    Complex v = pressure ? sol.eval_p(f, {x, 0}) : sol.eval_u(f, {x, 0})(0);
    acc += 2.0 / nq * v * (pressure ? std::cos(w * x) : std::sin(w * x));
  }
  return acc;
}

} // namespace

TEST_CASE("1D constant-coefficient solve matches the modal closed form") {
  Complex lambda(2.0, 1.0);
  Complex K(0.012, 0.004);
  MacroProblem prob = modal_problem(lambda, K, 256);
  MacroSolution sol = solve_macro(prob);
  const MacroField& f = sol.fields[0];
  CHECK(f.residual <= 1e-10);

  const auto& c = prob.coeffs;
  auto ref = oracles::macro_modal(lambda, c.q_voigt(0, 0), c.beta_ij(0, 0), c.Pi, c.delta,
                                  c.mean_density(), c.rho_f, K, std::numbers::pi,
                                  Complex(1.0));
  CHECK(std::abs(modal_amplitude(sol, f, 1, false) - ref.U) < 1e-6);
  CHECK(std::abs(modal_amplitude(sol, f, 1, true) - ref.P) < 1e-6);

  // pointwise agreement at the discretization-error level
  double worst_u = 0.0;
  for (int i = 0; i <= 256; ++i) {
    double x = i / 256.0;
    worst_u = std::max(worst_u,
                       std::abs(f.u(i) - ref.U * std::sin(std::numbers::pi * x)));
  }
  CHECK(worst_u < 1e-4 * std::abs(ref.U));
}

TEST_CASE("self-convergence toward the modal solution at order >= 1.8") {
  Complex lambda(2.0, 1.0);
  Complex K(0.012, 0.004);
  std::vector<double> errs;
  for (int elements : {64, 128, 256}) {
    MacroProblem prob = modal_problem(lambda, K, elements);
    MacroSolution sol = solve_macro(prob);
    const MacroField& f = sol.fields[0];
    const auto& c = prob.coeffs;
    auto ref = oracles::macro_modal(lambda, c.q_voigt(0, 0), c.beta_ij(0, 0), c.Pi, c.delta,
                                    c.mean_density(), c.rho_f, K, std::numbers::pi,
                                    Complex(1.0));
    // L2 error against the closed form
    double err2 = 0.0;
    int nq = 4096;
    for (int i = 0; i < nq; ++i) {
      double x = (i + 0.5) / nq;
      Complex diff = sol.eval_u(f, {x, 0})(0) - ref.U * std::sin(std::numbers::pi * x);
      err2 += std::norm(diff) / nq;
    }
    errs.push_back(std::sqrt(err2));
  }
  double order1 = std::log2(errs[0] / errs[1]);
  double order2 = std::log2(errs[1] / errs[2]);
  CHECK(order1 >= 1.8);
  CHECK(order2 >= 1.8);
}

TEST_CASE("sealed pores (K = 0) slave the pressure to the strain") {
  Complex lambda(3.0, 0.0);
  MacroProblem prob = modal_problem(lambda, Complex(0.0), 128);
  MacroSolution sol = solve_macro(prob);
  const MacroField& f = sol.fields[0];
  const auto& c = prob.coeffs;
  auto ref = oracles::macro_modal(lambda, c.q_voigt(0, 0), c.beta_ij(0, 0), c.Pi, c.delta,
                                  c.mean_density(), c.rho_f, Complex(0.0), std::numbers::pi,
                                  Complex(1.0));
  // With K = 0 the modal algebra reduces to the single-phase elastic problem
  // with q~ = q + delta (beta - Pi)^2 and p0 slaved to the strain.
  double qt = c.q_voigt(0, 0) + c.delta * std::pow(c.beta_ij(0, 0) - c.Pi, 2);
  Complex U_elastic =
      1.0 / (lambda * lambda * c.mean_density() + qt * std::numbers::pi * std::numbers::pi);
  CHECK(std::abs(ref.U - U_elastic) < 1e-14 * std::abs(U_elastic));
  CHECK(std::abs(modal_amplitude(sol, f, 1, false) - U_elastic) < 1e-6);
  // slaving: P = delta (beta - Pi) w U
  Complex P_slaved = c.delta * (c.beta_ij(0, 0) - c.Pi) * std::numbers::pi * U_elastic;
  CHECK(std::abs(modal_amplitude(sol, f, 1, true) - P_slaved) < 1e-6);
}

TEST_CASE("region guard and permeability lookup errors") {
  Complex lambda(2.0, 1.0);
  MacroProblem prob = modal_problem(lambda, Complex(0.01, 0.0), 32);
  SUBCASE("lambda below the region bound") {
    CHECK_THROWS_AS(assemble_macro(prob, Complex(0.5, 0.0)), OutOfRegion);
  }
  SUBCASE("complex lambda without a dedicated sample") {
    CHECK_THROWS_AS(permeability_at(prob.coeffs, Complex(3.0, 4.0)), MissingK);
  }
  SUBCASE("real lambda outside the sampled range") {
    EffectiveCoefficients c = synthetic_1d(Complex(2.0, 0.0), Complex(0.01, 0.0));
    CHECK_THROWS_AS(permeability_at(c, Complex(100.0, 0.0)), MissingK);
  }
}

TEST_CASE("real-axis K interpolation is rational-linear in log lambda") {
  EffectiveCoefficients c = synthetic_1d(Complex(1.0, 0.0), Complex(0.0));
  c.rho_f = 2.0;
  auto H = [&](double l, Complex K) { return l * l * c.rho_f * K; };
  Complex K1(0.04, 0.0), K2(0.001, 0.0);
  c.K_samples.push_back({Complex(1.0, 0.0), CMat::Constant(1, 1, K1)});
  c.K_samples.push_back({Complex(100.0, 0.0), CMat::Constant(1, 1, K2)});
  // midpoint in log lambda: H interpolates linearly
  double lm = 10.0;
  Complex Hm = 0.5 * (H(1.0, K1) + H(100.0, K2));
  CMat got = permeability_at(c, Complex(lm, 0.0));
  CHECK(std::abs(got(0, 0) - Hm / (lm * lm * c.rho_f)) < 1e-14);
  // exact hits return the sample itself
  CHECK(std::abs(permeability_at(c, Complex(100.0, 0.0))(0, 0) - K2) == 0.0);
}

TEST_CASE("time traces through the Weeks contour honor the initial state") {
  Complex dummy(2.0, 0.0);
  MacroProblem prob = modal_problem(dummy, Complex(0.0), 64); // sealed pores: K known anywhere
  prob.forcing.profile = MacroForcing::TimeProfile::Step;
  prob.lambdas.clear();
  ContourSpec weeks{InversionMethod::Weeks, 48, 2.5, 1.0};
  std::vector<double> times{0.0, 0.5, 1.0, 2.0};
  ProbeTraces traces = macro_time_traces(prob, weeks, {{0.5, 0.0}}, times, 2);
  REQUIRE(traces.values.size() == 1);
  REQUIRE(traces.values[0].size() == 2); // u1 and p0
  CHECK(std::abs(traces.values[0][0][0]) < 1e-5); // u(0) ~ 0
  // the step response moves away from zero
  CHECK(std::abs(traces.values[0][0][3]) > 1e-5);

  SUBCASE("Talbot nodes leave the coercivity region and are rejected") {
    ContourSpec talbot;
    CHECK_THROWS_AS(macro_time_traces(prob, talbot, {{0.5, 0.0}}, times, 1), OutOfRegion);
  }
}

TEST_CASE("2D solve is consistent and conjugate-symmetric") {
  EffectiveCoefficients c;
  c.dim = 2;
  c.q_voigt = Mat::Zero(3, 3);
  c.q_voigt << 3.0, 1.0, 0.0, 1.0, 3.0, 0.0, 0.0, 0.0, 1.0;
  c.beta_ij = Mat::Zero(2, 2);
  c.beta_ij << 0.25, 0.0, 0.0, 0.25;
  c.beta = 0.1;
  c.Pi = 0.35;
  c.gamma = 1.0;
  c.delta = 1.0 / (c.Pi / c.gamma + c.beta);
  c.rho_s = 1.0;
  c.rho_f = 0.9;
  Complex lambda(2.0, 2.0);
  CMat K = CMat::Zero(2, 2);
  K(0, 0) = K(1, 1) = Complex(0.02, 0.005);
  c.K_samples.push_back({lambda, K});
  c.K_samples.push_back({std::conj(lambda), K.conjugate()});

  MacroProblem prob;
  prob.domain = {2, {1.0, 1.0}, {24, 24}};
  prob.coeffs = c;
  prob.forcing.component = 0;
  prob.forcing.mode = {1, 1};
  prob.lambdas = {lambda, std::conj(lambda)};
  MacroSolution sol = solve_macro(prob, 2);
  const MacroField& f1 = sol.at(lambda);
  const MacroField& f2 = sol.at(std::conj(lambda));
  CHECK(f1.residual <= 1e-10);
  CHECK((f1.u.conjugate() - f2.u).cwiseAbs().maxCoeff() < 1e-12);
  CHECK((f1.p.conjugate() - f2.p).cwiseAbs().maxCoeff() < 1e-12);
  // u0 = u + <u_r> evaluates everywhere
  CVec u0 = sol.eval_u0(f1, {0.3, 0.6});
  CHECK(std::isfinite(u0(0).real()));
  CHECK(std::isfinite(u0(1).imag()));
}
