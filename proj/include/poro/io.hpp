#pragma once

#include <filesystem>
#include <string>

#include "poro/coefficients.hpp"
#include "poro/dns.hpp"
#include "poro/geometry.hpp"
#include "poro/macro.hpp"

namespace poro {

// Geometry file: JSON header {dim, resolution, materials{a_voigt, rho_s,
// rho_f, c0, mu, eta, alpha}} plus the phase array as base64, one byte per
// voxel (0 = solid, 1 = fluid), x-fastest ordering.
void write_geometry(const PhaseCell& cell, const std::filesystem::path& path);
PhaseCell read_geometry(const std::filesystem::path& path);

std::string base64_encode(const std::vector<std::uint8_t>& data);
std::vector<std::uint8_t> base64_decode(const std::string& text);

// Coefficient report; round-trips bit-exactly through read_coefficients.
void write_coefficients(const EffectiveCoefficients& eff, const std::filesystem::path& path);
EffectiveCoefficients read_coefficients(const std::filesystem::path& path);

// K(lambda) table: columns lambda_re, lambda_im, then K_re[p][q] row-major,
// then K_im[p][q] row-major. Shortest round-trip decimal formatting.
void write_permeability_csv(const std::vector<PermeabilitySample>& samples, int dim,
                            const std::filesystem::path& path);

// Probe traces: t, then per probe u components and p0.
void write_traces_csv(const ProbeTraces& traces, int dim, const std::filesystem::path& path);

struct GapReport {
  Complex lambda;
  std::vector<GapEntry> entries;         // one per epsilon
  std::vector<double> zero_k_gaps;       // same epsilons, K = 0 macro
  CVec solid_average, fluid_average;     // finest run
  double elastic_energy = 0, compression_energy = 0, viscous_energy = 0,
         interface_energy = 0;           // finest run
};
void write_gap_report(const GapReport& report, const std::filesystem::path& path);

/// Writes text atomically (temp file in the same directory, then rename).
void atomic_write(const std::filesystem::path& path, const std::string& contents);

std::string format_double(double v); // shortest round-trip decimal

} // namespace poro
