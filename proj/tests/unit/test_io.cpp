#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <random>
#include <sstream>

#include "poro/cell_solvers.hpp"
#include "poro/coefficients.hpp"
#include "poro/errors.hpp"
#include "poro/io.hpp"
#include "poro/verify.hpp"

using namespace poro;
namespace fs = std::filesystem;

namespace {

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

fs::path tmpdir() {
  fs::path d = fs::temp_directory_path() / "poro_io_test";
  fs::create_directories(d);
  return d;
}

EffectiveCoefficients sample_coeffs() {
  EffectiveCoefficients eff;
  eff.dim = 2;
  eff.q_voigt = Mat::Zero(3, 3);
  eff.q_voigt << 3.0310477086463, 1.1, 0.017, 1.1, 2.9, 0.0, 0.017, 0.0, 0.98;
  eff.beta_ij = Mat::Zero(2, 2);
  eff.beta_ij << 0.123456789012345, 0.001, 0.001, 0.11;
  eff.beta = 1.0 / 3.0;
  eff.Pi = 0.312;
  eff.gamma = 2.25;
  eff.delta = 1.0 / (eff.Pi / eff.gamma + eff.beta);
  eff.rho_s = 2.1;
  eff.rho_f = 1.0;
  CMat K(2, 2);
  K << Complex(0.01, 0.002), Complex(1e-5, -2e-6), Complex(1e-5, -2e-6), Complex(0.009, 0.001);
  eff.K_samples.push_back({Complex(1.0, 0.0), K});
  eff.K_samples.push_back({Complex(2.0, 3.0), 0.5 * K});
  return eff;
}

} // namespace

TEST_CASE("base64 round-trips arbitrary bytes") {
  std::mt19937 rng(2024);
  for (size_t len : {size_t{0}, size_t{1}, size_t{2}, size_t{3}, size_t{4}, size_t{17},
                     size_t{255}}) {
    std::vector<std::uint8_t> data(len);
    for (auto& b : data) b = static_cast<std::uint8_t>(rng() & 0xFF);
    CHECK(base64_decode(base64_encode(data)) == data);
  }
}

TEST_CASE("geometry file round-trips exactly") {
  MaterialParams m = default_materials(2);
  m.rho_s = 2.65;
  m.c0 = 1481.3;
  m.alpha = 0.731;
  PhaseCell cell = random_geometry(2, 16, 9, m);
  fs::path p = tmpdir() / "geom.json";
  write_geometry(cell, p);
  PhaseCell back = read_geometry(p);
  CHECK(back.dim == cell.dim);
  CHECK(back.resolution == cell.resolution);
  CHECK(back.phase == cell.phase);
  CHECK(back.materials.rho_s == cell.materials.rho_s);
  CHECK(back.materials.c0 == cell.materials.c0);
  CHECK(back.materials.alpha == cell.materials.alpha);
  CHECK((back.materials.a.voigt - cell.materials.a.voigt).cwiseAbs().maxCoeff() == 0.0);
}

TEST_CASE("coefficient report round-trips bit-exactly and deterministically") {
  EffectiveCoefficients eff = sample_coeffs();
  fs::path p1 = tmpdir() / "coeffs1.json";
  fs::path p2 = tmpdir() / "coeffs2.json";
  write_coefficients(eff, p1);
  write_coefficients(eff, p2);
  CHECK(slurp(p1) == slurp(p2)); // byte-identical across runs

  EffectiveCoefficients back = read_coefficients(p1);
  CHECK((back.q_voigt - eff.q_voigt).cwiseAbs().maxCoeff() == 0.0);
  CHECK((back.beta_ij - eff.beta_ij).cwiseAbs().maxCoeff() == 0.0);
  CHECK(back.beta == eff.beta);
  CHECK(back.Pi == eff.Pi);
  CHECK(back.delta == eff.delta);
  REQUIRE(back.K_samples.size() == eff.K_samples.size());
  for (size_t i = 0; i < back.K_samples.size(); ++i) {
    CHECK(back.K_samples[i].lambda == eff.K_samples[i].lambda);
    CHECK((back.K_samples[i].K - eff.K_samples[i].K).cwiseAbs().maxCoeff() == 0.0);
  }

  // writing the reread coefficients reproduces the same bytes
  fs::path p3 = tmpdir() / "coeffs3.json";
  write_coefficients(back, p3);
  CHECK(slurp(p3) == slurp(p1));
}

TEST_CASE("permeability CSV follows the documented column order") {
  EffectiveCoefficients eff = sample_coeffs();
  fs::path p = tmpdir() / "K.csv";
  write_permeability_csv(eff.K_samples, 2, p);
  std::ifstream in(p);
  std::string header, line1;
  std::getline(in, header);
  std::getline(in, line1);
  CHECK(header ==
        "lambda_re,lambda_im,K_re_11,K_re_12,K_re_21,K_re_22,K_im_11,K_im_12,K_im_21,K_im_22");
  // values round-trip through strtod at full precision
  std::istringstream ss(line1);
  std::string tok;
  std::vector<double> vals;
  while (std::getline(ss, tok, ',')) vals.push_back(std::stod(tok));
  REQUIRE(vals.size() == 10);
  CHECK(vals[0] == 1.0);
  CHECK(vals[2] == eff.K_samples[0].K(0, 0).real());
  CHECK(vals[5] == eff.K_samples[0].K(1, 1).real());
  CHECK(vals[6] == eff.K_samples[0].K(0, 0).imag());
}

TEST_CASE("empty sample list writes a header-only file") {
  fs::path p = tmpdir() / "K_empty.csv";
  write_permeability_csv({}, 2, p);
  std::string content = slurp(p);
  CHECK(content.find("lambda_re") == 0);
  CHECK(std::count(content.begin(), content.end(), '\n') == 1);
}

TEST_CASE("atomic write replaces content and leaves no temp file") {
  fs::path p = tmpdir() / "atomic.txt";
  atomic_write(p, "first");
  atomic_write(p, "second");
  CHECK(slurp(p) == "second");
  CHECK_FALSE(fs::exists(p.string() + ".tmp"));
}

TEST_CASE("invalid inputs raise the io/config error family") {
  fs::path p = tmpdir() / "bad.json";
  atomic_write(p, "{not json");
  CHECK_THROWS_AS(read_geometry(p), IoError);
  atomic_write(p, "{\"schema_version\": 1}");
  CHECK_THROWS_AS(read_geometry(p), ConfigError);
  CHECK_THROWS_AS(read_geometry(tmpdir() / "missing.json"), IoError);
  CHECK_THROWS_AS(base64_decode("@@@@"), IoError);
}
