#pragma once

#include <string>
#include <vector>

#include "poro/geometry.hpp"

namespace poro {

struct CheckResult {
  std::string name;
  bool pass = false;
  std::string detail;
};

/// Runs the invariant checks of one module ("geometry", "fem", "cell",
/// "coefficients", "macro", "dns", "laplace") or of every module ("all").
/// Deterministic: fixed seeds, serial execution, stable ordering.
std::vector<CheckResult> run_verification_suite(const std::string& suite);

/// Reference materials used by the built-in checks.
MaterialParams default_materials(int dim);

/// Seeded valid random geometry (smooth random indicator thresholded, then
/// revalidated; deterministic for a given seed).
PhaseCell random_geometry(int dim, int resolution, unsigned seed,
                          const MaterialParams& materials);

} // namespace poro
