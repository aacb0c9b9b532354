#include <CLI11.hpp>
#include <filesystem>
#include <iostream>
#include <nlohmann/json.hpp>
#include <thread>

#include "poro/cell_solvers.hpp"
#include "poro/coefficients.hpp"
#include "poro/dns.hpp"
#include "poro/errors.hpp"
#include "poro/io.hpp"
#include "poro/macro.hpp"
#include "poro/verify.hpp"

namespace fs = std::filesystem;
using poro::Complex;
using ordered_json = nlohmann::ordered_json;

namespace {

std::vector<Complex> log_grid(double lo, double hi, int count) {
  if (!(lo > 0.0 && hi > lo && count >= 2))
    throw poro::ConfigError("log grid needs 0 < min < max and count >= 2");
  std::vector<Complex> out;
  for (int i = 0; i < count; ++i) {
    double t = static_cast<double>(i) / (count - 1);
    out.emplace_back(std::exp(std::log(lo) + t * (std::log(hi) - std::log(lo))), 0.0);
  }
  return out;
}

void require_keys(const ordered_json& j, std::initializer_list<const char*> required,
                  std::initializer_list<const char*> optional, const std::string& where) {
  for (const char* k : required)
    if (!j.contains(k))
      throw poro::ConfigError(where + " is missing required key '" + std::string(k) + "'");
  for (auto it = j.begin(); it != j.end(); ++it) {
    bool known = false;
    for (const char* k : required) known = known || it.key() == k;
    for (const char* k : optional) known = known || it.key() == k;
    if (!known) throw poro::ConfigError(where + " has unknown key '" + it.key() + "'");
  }
}

ordered_json load_config(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw poro::IoError("cannot open " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw poro::ConfigError("invalid JSON in " + path.string() + ": " + e.what());
  }
  if (!j.contains("schema_version") || j["schema_version"].get<int>() != 1)
    throw poro::ConfigError(path.string() + " needs schema_version 1");
  return j;
}

poro::MacroForcing parse_forcing(const ordered_json& j) {
  require_keys(j, {"component"}, {"mode", "time_profile"}, "forcing");
  poro::MacroForcing f;
  f.component = j.at("component").get<int>();
  if (j.contains("mode")) {
    auto m = j["mode"];
    for (size_t d = 0; d < m.size() && d < 2; ++d) f.mode[d] = m[d].get<int>();
  }
  if (j.contains("time_profile")) {
    std::string p = j["time_profile"].get<std::string>();
    if (p == "impulse")
      f.profile = poro::MacroForcing::TimeProfile::Impulse;
    else if (p == "step")
      f.profile = poro::MacroForcing::TimeProfile::Step;
    else if (p == "ramp")
      f.profile = poro::MacroForcing::TimeProfile::Ramp;
    else
      throw poro::ConfigError("unknown time_profile '" + p + "'");
  }
  return f;
}

int run_cell_static(const std::string& geometry, const std::string& out_dir) {
  poro::PhaseCell cell = poro::read_geometry(geometry);
  poro::VoxelMesh mesh = poro::build_periodic_mesh(cell);
  poro::ElasticModel model{cell.materials.a, {}};
  poro::StaticCellSolutions st = poro::solve_static_cell(mesh, model);

  poro::EffectiveCoefficients eff;
  eff.dim = cell.dim;
  auto [fs_frac, pi] = poro::volume_fractions(cell);
  (void)fs_frac;
  eff.Pi = pi;
  eff.gamma = cell.materials.gamma();
  eff.rho_s = cell.materials.rho_s;
  eff.rho_f = cell.materials.rho_f;
  eff.q_voigt = poro::compute_q(mesh, model, st.chi_ij);
  auto [bij, beta] = poro::compute_betas(mesh, model, st.chi, st.chi_ij);
  eff.beta_ij = bij;
  eff.beta = beta;
  eff.delta = poro::compute_delta(eff.Pi, eff.gamma, eff.beta);

  fs::create_directories(out_dir);
  poro::write_coefficients(eff, fs::path(out_dir) / "static_coefficients.json");

  ordered_json meta;
  meta["schema_version"] = 1;
  meta["dim"] = cell.dim;
  meta["resolution"] = cell.resolution;
  meta["solid_vector_dofs"] = mesh.n_blocks[0] * mesh.dim;
  meta["fluid_vector_dofs"] = mesh.n_blocks[1] * mesh.dim;
  meta["beta_candidate_q_chi_chi"] = st.beta_candidate;
  poro::atomic_write(fs::path(out_dir) / "static_solutions.json", meta.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "static_coefficients.json").string() << "\n";
  return 0;
}

int run_cell_dynamic(const std::string& geometry, const std::string& out_dir,
                     std::vector<double> lambda_log, std::vector<double> alphas,
                     const std::string& viscous_form, bool stabilize, int threads) {
  poro::PhaseCell cell = poro::read_geometry(geometry);
  poro::VoxelMesh mesh = poro::build_periodic_mesh(cell);
  std::vector<Complex> lambdas =
      lambda_log.size() == 3
          ? log_grid(lambda_log[0], lambda_log[1], static_cast<int>(lambda_log[2]))
          : poro::default_lambda_grid();
  if (alphas.empty()) alphas = {cell.materials.alpha};

  poro::ThetaOptions opts;
  opts.stabilize = stabilize;
  opts.viscous_form = viscous_form == "symmetrized" ? poro::GradientForm::Symmetrized
                                                    : poro::GradientForm::Full;
  fs::create_directories(out_dir);
  for (size_t a = 0; a < alphas.size(); ++a) {
    std::vector<poro::DynamicCellSolution> sols(lambdas.size());
    std::atomic<size_t> next{0};
    auto worker = [&]() {
      for (;;) {
        size_t i = next.fetch_add(1);
        if (i >= lambdas.size()) return;
        sols[i] = poro::solve_theta(mesh, lambdas[i], cell.materials.mu, cell.materials.rho_f,
                                    alphas[a], opts);
      }
    };
    std::vector<std::thread> pool;
    for (int t = 0; t < std::max(1, threads); ++t) pool.emplace_back(worker);
    for (auto& t : pool) t.join();
    auto samples = poro::compute_permeability(sols);
    fs::path out = fs::path(out_dir) / ("K_alpha_" + std::to_string(a) + ".csv");
    poro::write_permeability_csv(samples, cell.dim, out);
    std::cout << "alpha " << alphas[a] << " -> " << out.string() << "\n";
  }
  return 0;
}

int run_effective(const std::string& geometry, const std::string& out_dir,
                  std::vector<double> lambda_log, int threads) {
  poro::PhaseCell cell = poro::read_geometry(geometry);
  std::vector<Complex> lambdas =
      lambda_log.size() == 3
          ? log_grid(lambda_log[0], lambda_log[1], static_cast<int>(lambda_log[2]))
          : poro::default_lambda_grid();
  poro::EffectiveCoefficients eff =
      poro::compute_effective_coefficients(cell, lambdas, threads);
  fs::create_directories(out_dir);
  poro::write_coefficients(eff, fs::path(out_dir) / "coefficients.json");
  poro::write_permeability_csv(eff.K_samples, eff.dim, fs::path(out_dir) / "K.csv");
  std::cout << "wrote " << (fs::path(out_dir) / "coefficients.json").string() << "\n";
  return 0;
}

int run_macro(const std::string& config_path, const std::string& out_dir, int threads) {
  ordered_json j = load_config(config_path);
  require_keys(j,
               {"schema_version", "coefficients", "domain", "forcing", "lambda", "probes"},
               {"region_min"}, "macro config");
  poro::MacroProblem prob;
  prob.coeffs = poro::read_coefficients(j.at("coefficients").get<std::string>());

  const auto& dj = j.at("domain");
  require_keys(dj, {"extent", "elements"}, {}, "domain");
  auto ext = dj.at("extent");
  auto els = dj.at("elements");
  prob.domain.dim = static_cast<int>(ext.size());
  for (size_t d = 0; d < ext.size() && d < 2; ++d) {
    prob.domain.extent[d] = ext[d].get<double>();
    prob.domain.elements[d] = els[d].get<int>();
  }
  prob.forcing = parse_forcing(j.at("forcing"));
  if (j.contains("region_min")) prob.region_min = j["region_min"].get<double>();
  if (prob.coeffs.dim != prob.domain.dim && prob.domain.dim == 1)
    prob.coeffs = poro::reduce_to_1d(prob.coeffs);

  std::vector<std::array<double, 2>> probes;
  for (const auto& p : j.at("probes")) {
    std::array<double, 2> x{0, 0};
    for (size_t d = 0; d < p.size() && d < 2; ++d) x[d] = p[d].get<double>();
    probes.push_back(x);
  }

  fs::create_directories(out_dir);
  const auto& lj = j.at("lambda");
  require_keys(lj, {}, {"list", "log_grid", "contour"}, "lambda");
  if (lj.contains("contour")) {
    const auto& cj = lj["contour"];
    require_keys(cj, {"method", "times"}, {"nodes", "sigma", "b"}, "contour");
    poro::ContourSpec spec;
    std::string method = cj.at("method").get<std::string>();
    if (method == "talbot")
      spec.method = poro::InversionMethod::Talbot;
    else if (method == "weeks")
      spec.method = poro::InversionMethod::Weeks;
    else
      throw poro::ConfigError("unknown contour method '" + method + "'");
    if (cj.contains("nodes")) spec.nodes = cj["nodes"].get<int>();
    if (cj.contains("sigma")) spec.sigma = cj["sigma"].get<double>();
    if (cj.contains("b")) spec.b = cj["b"].get<double>();
    std::vector<double> times;
    for (const auto& t : cj.at("times")) times.push_back(t.get<double>());
    poro::ProbeTraces traces = poro::macro_time_traces(prob, spec, probes, times, threads);
    poro::write_traces_csv(traces, prob.domain.dim, fs::path(out_dir) / "traces.csv");
    std::cout << "wrote " << (fs::path(out_dir) / "traces.csv").string() << "\n";
    return 0;
  }

  if (lj.contains("list"))
    for (const auto& l : lj["list"])
      prob.lambdas.emplace_back(l[0].get<double>(), l[1].get<double>());
  else if (lj.contains("log_grid")) {
    auto g = lj["log_grid"];
    prob.lambdas = log_grid(g[0].get<double>(), g[1].get<double>(), g[2].get<int>());
  } else {
    throw poro::ConfigError("lambda needs one of list, log_grid, contour");
  }

  poro::MacroSolution sol = poro::solve_macro(prob, threads);
  std::string csv = "lambda_re,lambda_im";
  for (size_t p = 0; p < probes.size(); ++p) {
    for (int c = 0; c < prob.domain.dim; ++c) {
      csv += ",probe" + std::to_string(p) + "_u" + std::to_string(c + 1) + "_re";
      csv += ",probe" + std::to_string(p) + "_u" + std::to_string(c + 1) + "_im";
    }
    csv += ",probe" + std::to_string(p) + "_p0_re,probe" + std::to_string(p) + "_p0_im";
  }
  csv += "\n";
  for (const auto& f : sol.fields) {
    csv += poro::format_double(f.lambda.real()) + "," + poro::format_double(f.lambda.imag());
    for (const auto& probe : probes) {
      poro::CVec u = sol.eval_u(f, probe);
      Complex p0 = sol.eval_p(f, probe);
      for (int c = 0; c < prob.domain.dim; ++c) {
        csv += "," + poro::format_double(u(c).real());
        csv += "," + poro::format_double(u(c).imag());
      }
      csv += "," + poro::format_double(p0.real()) + "," + poro::format_double(p0.imag());
    }
    csv += "\n";
  }
  poro::atomic_write(fs::path(out_dir) / "macro_lambda.csv", csv);
  std::cout << "wrote " << (fs::path(out_dir) / "macro_lambda.csv").string() << "\n";
  return 0;
}

int run_dns(const std::string& config_path, const std::string& out_dir, int threads) {
  ordered_json j = load_config(config_path);
  require_keys(j, {"schema_version", "geometry", "cells", "lambda", "forcing"},
               {"density", "macro_elements", "cell_resolution_scale"}, "dns config");
  poro::PhaseCell cell = poro::read_geometry(j.at("geometry").get<std::string>());
  Complex lambda(j.at("lambda")[0].get<double>(), j.at("lambda")[1].get<double>());
  poro::MacroForcing forcing = parse_forcing(j.at("forcing"));

  // Effective coefficients with a dedicated K solve at the DNS lambda.
  poro::EffectiveCoefficients eff =
      poro::compute_effective_coefficients(cell, {lambda}, threads);

  poro::MacroProblem mp;
  mp.domain.dim = 2;
  mp.domain.extent = {1.0, 1.0};
  mp.domain.elements = {64, 64};
  if (j.contains("macro_elements")) {
    auto m = j["macro_elements"];
    for (size_t d = 0; d < m.size() && d < 2; ++d) mp.domain.elements[d] = m[d].get<int>();
  }
  mp.coeffs = eff;
  mp.forcing = forcing;
  mp.lambdas = {lambda};
  mp.region_min = 0.0;
  poro::MacroSolution macro = poro::solve_macro(mp, threads);

  poro::MacroProblem mp0 = mp;
  mp0.coeffs.K_samples.clear(); // sealed-pore comparison
  poro::MacroSolution macro0 = poro::solve_macro(mp0, threads);

  poro::GapReport report;
  report.lambda = lambda;
  poro::DnsResult last;
  for (const auto& cj : j.at("cells")) {
    poro::DnsConfig cfg;
    cfg.base = cell;
    cfg.cells = cj.get<int>();
    cfg.density = j.contains("density") ? j["density"].get<int>() : 0;
    cfg.lambda = lambda;
    cfg.forcing = forcing;
    poro::DnsResult r = poro::solve_eps_problem(cfg);
    report.entries.push_back(poro::homogenization_gap(r, macro, macro.fields[0]));
    report.zero_k_gaps.push_back(
        poro::homogenization_gap(r, macro0, macro0.fields[0]).gap);
    last = std::move(r);
  }
  report.solid_average = last.solid_average;
  report.fluid_average = last.fluid_average;
  report.elastic_energy = last.elastic_energy;
  report.compression_energy = last.compression_energy;
  report.viscous_energy = last.viscous_energy;
  report.interface_energy = last.interface_energy;

  fs::create_directories(out_dir);
  poro::write_gap_report(report, fs::path(out_dir) / "gap_report.json");
  std::cout << "wrote " << (fs::path(out_dir) / "gap_report.json").string() << "\n";
  return 0;
}

int run_verify(const std::string& suite, const std::string& out_dir) {
  auto results = poro::run_verification_suite(suite);
  ordered_json j;
  j["schema_version"] = 1;
  j["suite"] = suite;
  ordered_json checks = ordered_json::array();
  bool all_pass = true;
  for (const auto& r : results) {
    ordered_json c;
    c["name"] = r.name;
    c["pass"] = r.pass;
    c["detail"] = r.detail;
    checks.push_back(std::move(c));
    all_pass = all_pass && r.pass;
    std::cout << (r.pass ? "PASS  " : "FAIL  ") << r.name << "  (" << r.detail << ")\n";
  }
  j["checks"] = std::move(checks);
  if (!out_dir.empty()) {
    fs::create_directories(out_dir);
    poro::atomic_write(fs::path(out_dir) / "verify_report.json", j.dump(2) + "\n");
  }
  std::cout << (all_pass ? "all checks passed" : "some checks FAILED") << "\n";
  return all_pass ? 0 : 4;
}

} // namespace

int main(int argc, char** argv) {
  CLI::App app{"Periodic-cell homogenization toolkit for poroelastic slip composites"};
  app.require_subcommand(1);
  int threads = static_cast<int>(std::thread::hardware_concurrency());
  app.add_option("--threads", threads, "worker threads for lambda sweeps");

  std::string geometry, out_dir = ".", config_path, suite = "all", viscous_form = "full";
  std::vector<double> lambda_log, alphas;
  bool stabilize = false;

  auto* cs = app.add_subcommand("cell-static", "static correctors and elastic coefficients");
  cs->add_option("--geometry", geometry)->required();
  cs->add_option("--out", out_dir)->required();

  auto* cd = app.add_subcommand("cell-dynamic", "dynamic permeability K(lambda)");
  cd->add_option("--geometry", geometry)->required();
  cd->add_option("--out", out_dir)->required();
  cd->add_option("--lambda-log", lambda_log)->expected(3);
  cd->add_option("--alpha-sweep", alphas);
  cd->add_option("--viscous-form", viscous_form)->check(CLI::IsMember({"full", "symmetrized"}));
  cd->add_flag("--stabilize-pressure", stabilize);

  auto* ef = app.add_subcommand("effective", "full coefficient report");
  ef->add_option("--geometry", geometry)->required();
  ef->add_option("--out", out_dir)->required();
  ef->add_option("--lambda-log", lambda_log)->expected(3);

  auto* ma = app.add_subcommand("macro", "homogenized macroscopic solve");
  ma->add_option("--config", config_path)->required();
  ma->add_option("--out", out_dir)->required();

  auto* dn = app.add_subcommand("dns", "fine-scale validation sweep");
  dn->add_option("--config", config_path)->required();
  dn->add_option("--out", out_dir)->required();

  auto* ve = app.add_subcommand("verify", "module invariant suites");
  ve->add_option("--suite", suite);
  ve->add_option("--out", out_dir);

  CLI11_PARSE(app, argc, argv);

  try {
    if (cs->parsed()) return run_cell_static(geometry, out_dir);
    if (cd->parsed())
      return run_cell_dynamic(geometry, out_dir, lambda_log, alphas, viscous_form, stabilize,
                              threads);
    if (ef->parsed()) return run_effective(geometry, out_dir, lambda_log, threads);
    if (ma->parsed()) return run_macro(config_path, out_dir, threads);
    if (dn->parsed()) return run_dns(config_path, out_dir, threads);
    if (ve->parsed()) return run_verify(suite, out_dir);
  } catch (const poro::Error& e) {
    std::cerr << e.kind() << ": " << e.what() << "\n";
    return e.exit_code();
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << "\n";
    return 4;
  }
  return 0;
}
