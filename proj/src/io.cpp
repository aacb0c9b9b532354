#include "poro/io.hpp"

#include <charconv>
#include <fstream>
#include <nlohmann/json.hpp>

#include "poro/errors.hpp"

namespace poro {

using ordered_json = nlohmann::ordered_json;

namespace {

constexpr char kB64[] = "ABCDEFGHIJKLMNOPQRSTUVWXYZabcdefghijklmnopqrstuvwxyz0123456789+/";

int b64_value(char c) {
  if (c >= 'A' && c <= 'Z') return c - 'A';
  if (c >= 'a' && c <= 'z') return c - 'a' + 26;
  if (c >= '0' && c <= '9') return c - '0' + 52;
  if (c == '+') return 62;
  if (c == '/') return 63;
  return -1;
}

ordered_json matrix_to_json(const Mat& m) {
  ordered_json rows = ordered_json::array();
  for (long i = 0; i < m.rows(); ++i) {
    ordered_json row = ordered_json::array();
    for (long j = 0; j < m.cols(); ++j) row.push_back(m(i, j));
    rows.push_back(std::move(row));
  }
  return rows;
}

Mat matrix_from_json(const ordered_json& j) {
  long rows = static_cast<long>(j.size());
  long cols = rows > 0 ? static_cast<long>(j[0].size()) : 0;
  Mat m(rows, cols);
  for (long i = 0; i < rows; ++i)
    for (long c = 0; c < cols; ++c) m(i, c) = j[i][c].get<double>();
  return m;
}

ordered_json load_json(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path.string());
  ordered_json j;
  try {
    in >> j;
  } catch (const std::exception& e) {
    throw IoError("invalid JSON in " + path.string() + ": " + e.what());
  }
  return j;
}

} // namespace

std::string base64_encode(const std::vector<std::uint8_t>& data) {
  std::string out;
  out.reserve((data.size() + 2) / 3 * 4);
  for (size_t i = 0; i < data.size(); i += 3) {
    std::uint32_t v = data[i] << 16;
    int rem = static_cast<int>(data.size() - i);
    if (rem > 1) v |= data[i + 1] << 8;
    if (rem > 2) v |= data[i + 2];
    out.push_back(kB64[(v >> 18) & 63]);
    out.push_back(kB64[(v >> 12) & 63]);
    out.push_back(rem > 1 ? kB64[(v >> 6) & 63] : '=');
    out.push_back(rem > 2 ? kB64[v & 63] : '=');
  }
  return out;
}

std::vector<std::uint8_t> base64_decode(const std::string& text) {
  std::vector<std::uint8_t> out;
  std::uint32_t acc = 0;
  int bits = 0;
  for (char c : text) {
    if (c == '=' || c == '\n' || c == '\r') continue;
    int v = b64_value(c);
    if (v < 0) throw IoError("invalid base64 character");
    acc = (acc << 6) | static_cast<std::uint32_t>(v);
    bits += 6;
    if (bits >= 8) {
      bits -= 8;
      out.push_back(static_cast<std::uint8_t>((acc >> bits) & 0xFF));
    }
  }
  return out;
}

std::string format_double(double v) {
  char buf[32];
  auto res = std::to_chars(buf, buf + sizeof(buf), v);
  return std::string(buf, res.ptr);
}

void atomic_write(const std::filesystem::path& path, const std::string& contents) {
  std::filesystem::path tmp = path;
  tmp += ".tmp";
  {
    std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot open " + tmp.string() + " for writing");
    out << contents;
    if (!out) throw IoError("write failed for " + tmp.string());
  }
  std::error_code ec;
  std::filesystem::rename(tmp, path, ec);
  if (ec) throw IoError("rename failed for " + path.string() + ": " + ec.message());
}

void write_geometry(const PhaseCell& cell, const std::filesystem::path& path) {
  ordered_json j;
  j["schema_version"] = 1;
  j["dim"] = cell.dim;
  j["resolution"] = cell.resolution;
  ordered_json m;
  m["a_voigt"] = matrix_to_json(cell.materials.a.voigt);
  m["rho_s"] = cell.materials.rho_s;
  m["rho_f"] = cell.materials.rho_f;
  m["c0"] = cell.materials.c0;
  m["mu"] = cell.materials.mu;
  m["eta"] = cell.materials.eta;
  m["alpha"] = cell.materials.alpha;
  j["materials"] = std::move(m);
  std::vector<std::uint8_t> bytes(cell.phase.size());
  for (size_t i = 0; i < cell.phase.size(); ++i)
    bytes[i] = cell.phase[i] == Phase::Fluid ? 1 : 0;
  j["phase_base64"] = base64_encode(bytes);
  atomic_write(path, j.dump(2) + "\n");
}

PhaseCell read_geometry(const std::filesystem::path& path) {
  ordered_json j = load_json(path);
  for (const char* key : {"schema_version", "dim", "resolution", "materials", "phase_base64"})
    if (!j.contains(key)) throw ConfigError("geometry file is missing key '" + std::string(key) + "'");
  MaterialParams mp;
  const auto& m = j["materials"];
  mp.a.voigt = matrix_from_json(m.at("a_voigt"));
  mp.rho_s = m.at("rho_s").get<double>();
  mp.rho_f = m.at("rho_f").get<double>();
  mp.c0 = m.at("c0").get<double>();
  mp.mu = m.at("mu").get<double>();
  mp.eta = m.at("eta").get<double>();
  mp.alpha = m.at("alpha").get<double>();
  int dim = j["dim"].get<int>();
  mp.a.dim = dim;
  auto bytes = base64_decode(j["phase_base64"].get<std::string>());
  std::vector<Phase> phase(bytes.size());
  for (size_t i = 0; i < bytes.size(); ++i) {
    if (bytes[i] > 1) throw ConfigError("phase bytes must be 0 (solid) or 1 (fluid)");
    phase[i] = bytes[i] ? Phase::Fluid : Phase::Solid;
  }
  return build_phase_cell(dim, j["resolution"].get<int>(), std::move(phase), mp);
}

void write_coefficients(const EffectiveCoefficients& eff, const std::filesystem::path& path) {
  ordered_json j;
  j["schema_version"] = 1;
  j["dim"] = eff.dim;
  j["q_voigt"] = matrix_to_json(eff.q_voigt);
  j["beta_ij"] = matrix_to_json(eff.beta_ij);
  j["beta"] = eff.beta;
  j["Pi"] = eff.Pi;
  j["gamma"] = eff.gamma;
  j["delta"] = eff.delta;
  j["rho_s"] = eff.rho_s;
  j["rho_f"] = eff.rho_f;
  ordered_json ks = ordered_json::array();
  for (const auto& s : eff.K_samples) {
    ordered_json e;
    e["lambda_re"] = s.lambda.real();
    e["lambda_im"] = s.lambda.imag();
    e["K_re"] = matrix_to_json(s.K.real());
    e["K_im"] = matrix_to_json(s.K.imag());
    ks.push_back(std::move(e));
  }
  j["K"] = std::move(ks);
  atomic_write(path, j.dump(2) + "\n");
}

EffectiveCoefficients read_coefficients(const std::filesystem::path& path) {
  ordered_json j = load_json(path);
  EffectiveCoefficients eff;
  eff.dim = j.at("dim").get<int>();
  eff.q_voigt = matrix_from_json(j.at("q_voigt"));
  eff.beta_ij = matrix_from_json(j.at("beta_ij"));
  eff.beta = j.at("beta").get<double>();
  eff.Pi = j.at("Pi").get<double>();
  eff.gamma = j.at("gamma").get<double>();
  eff.delta = j.at("delta").get<double>();
  eff.rho_s = j.at("rho_s").get<double>();
  eff.rho_f = j.at("rho_f").get<double>();
  for (const auto& e : j.at("K")) {
    PermeabilitySample s;
    s.lambda = Complex(e.at("lambda_re").get<double>(), e.at("lambda_im").get<double>());
    Mat re = matrix_from_json(e.at("K_re"));
    Mat im = matrix_from_json(e.at("K_im"));
    s.K = re.cast<Complex>() + Complex(0, 1) * im.cast<Complex>();
    eff.K_samples.push_back(std::move(s));
  }
  return eff;
}

void write_permeability_csv(const std::vector<PermeabilitySample>& samples, int dim,
                            const std::filesystem::path& path) {
  std::string out = "lambda_re,lambda_im";
  for (int p = 0; p < dim; ++p)
    for (int q = 0; q < dim; ++q)
      out += ",K_re_" + std::to_string(p + 1) + std::to_string(q + 1);
  for (int p = 0; p < dim; ++p)
    for (int q = 0; q < dim; ++q)
      out += ",K_im_" + std::to_string(p + 1) + std::to_string(q + 1);
  out += "\n";
  for (const auto& s : samples) {
    out += format_double(s.lambda.real()) + "," + format_double(s.lambda.imag());
    for (int p = 0; p < dim; ++p)
      for (int q = 0; q < dim; ++q) out += "," + format_double(s.K(p, q).real());
    for (int p = 0; p < dim; ++p)
      for (int q = 0; q < dim; ++q) out += "," + format_double(s.K(p, q).imag());
    out += "\n";
  }
  atomic_write(path, out);
}

void write_traces_csv(const ProbeTraces& traces, int dim, const std::filesystem::path& path) {
  std::string out = "t";
  size_t n_probes = traces.values.size();
  for (size_t p = 0; p < n_probes; ++p) {
    for (int c = 0; c < dim; ++c)
      out += ",probe" + std::to_string(p) + "_u" + std::to_string(c + 1);
    out += ",probe" + std::to_string(p) + "_p0";
  }
  out += "\n";
  for (size_t ti = 0; ti < traces.times.size(); ++ti) {
    out += format_double(traces.times[ti]);
    for (size_t p = 0; p < n_probes; ++p)
      for (int c = 0; c <= dim; ++c) out += "," + format_double(traces.values[p][c][ti]);
    out += "\n";
  }
  atomic_write(path, out);
}

void write_gap_report(const GapReport& report, const std::filesystem::path& path) {
  ordered_json j;
  j["schema_version"] = 1;
  j["lambda_re"] = report.lambda.real();
  j["lambda_im"] = report.lambda.imag();
  ordered_json eps = ordered_json::array(), gaps = ordered_json::array();
  for (const auto& e : report.entries) {
    eps.push_back(e.epsilon);
    ordered_json g;
    g["gap"] = e.gap;
    g["dns_norm"] = e.dns_norm;
    g["macro_norm"] = e.macro_norm;
    gaps.push_back(std::move(g));
  }
  j["epsilons"] = std::move(eps);
  j["gaps"] = std::move(gaps);
  ordered_json zk = ordered_json::array();
  for (double g : report.zero_k_gaps) zk.push_back(g);
  j["zero_k_gaps"] = std::move(zk);
  ordered_json pa;
  for (int c = 0; c < report.solid_average.size(); ++c) {
    pa["solid_re"].push_back(report.solid_average(c).real());
    pa["solid_im"].push_back(report.solid_average(c).imag());
    pa["fluid_re"].push_back(report.fluid_average(c).real());
    pa["fluid_im"].push_back(report.fluid_average(c).imag());
  }
  j["phase_averages"] = std::move(pa);
  ordered_json es;
  es["elastic"] = report.elastic_energy;
  es["compression"] = report.compression_energy;
  es["viscous"] = report.viscous_energy;
  es["interface"] = report.interface_energy;
  j["energy_split"] = std::move(es);
  atomic_write(path, j.dump(2) + "\n");
}

} // namespace poro
