#include <doctest.h>

#include <numbers>
#include <queue>

#include "poro/errors.hpp"
#include "poro/geometry.hpp"
#include "poro/verify.hpp"

using namespace poro;

namespace {

PhaseCell disk_cell(int res, double radius = 0.25) {
  return build_phase_cell(
      2, res,
      [radius](const std::array<double, 3>& c) {
        return c[0] * c[0] + c[1] * c[1] < radius * radius;
      },
      default_materials(2));
}

// Independent flood fill on the torus (oracle for the union-find check).
bool bfs_connected(const std::vector<Phase>& phase, int n, Phase which) {
  long total = static_cast<long>(n) * n;
  std::vector<char> seen(total, 0);
  long start = -1, count = 0;
  for (long v = 0; v < total; ++v)
    if (phase[v] == which) {
      if (start < 0) start = v;
      ++count;
    }
  if (start < 0) return false;
  std::queue<long> q;
  q.push(start);
  seen[start] = 1;
  long reached = 0;
  while (!q.empty()) {
    long v = q.front();
    q.pop();
    ++reached;
    int i = static_cast<int>(v % n), j = static_cast<int>(v / n);
    const int nb[4][2] = {{i + 1, j}, {i - 1, j}, {i, j + 1}, {i, j - 1}};
    for (auto& d : nb) {
      long w = ((d[0] + n) % n) + static_cast<long>(n) * ((d[1] + n) % n);
      if (!seen[w] && phase[w] == which) {
        seen[w] = 1;
        q.push(w);
      }
    }
  }
  return reached == count;
}

} // namespace

TEST_CASE("disk indicator fluid fraction is the inside-voxel count") {
  const int res = 8;
  PhaseCell cell = disk_cell(res);
  long inside = 0;
  double h = 1.0 / res;
  for (int j = 0; j < res; ++j)
    for (int i = 0; i < res; ++i) {
      double x = (i + 0.5) * h - 0.5, y = (j + 0.5) * h - 0.5;
      if (x * x + y * y < 0.0625) ++inside;
    }
  auto [fs, pi] = volume_fractions(cell);
  CHECK(pi == doctest::Approx(static_cast<double>(inside) / 64.0).epsilon(1e-15));
  CHECK(fs + pi == doctest::Approx(1.0).epsilon(1e-16));
}

TEST_CASE("all-solid cell is rejected with EmptyPhase") {
  std::vector<Phase> phase(4 * 4 * 4, Phase::Solid);
  CHECK_THROWS_AS(build_phase_cell(3, 4, std::move(phase), default_materials(3)), EmptyPhase);
}

TEST_CASE("full horizontal fluid stripe keeps the solid periodically connected") {
  const int res = 8;
  // fluid rows 2..5: solid splits into two bands that reconnect by wraparound
  std::vector<Phase> phase(res * res, Phase::Solid);
  for (int j = 2; j < 6; ++j)
    for (int i = 0; i < res; ++i) phase[i + res * j] = Phase::Fluid;
  CHECK(bfs_connected(phase, res, Phase::Solid)); // independent oracle
  CHECK_NOTHROW(build_phase_cell(2, res, std::move(phase), default_materials(2)));
}

TEST_CASE("checkerboard solid is rejected as disconnected") {
  std::vector<Phase> phase{Phase::Solid, Phase::Fluid, Phase::Fluid, Phase::Solid};
  CHECK_FALSE(bfs_connected(phase, 2, Phase::Solid));
  CHECK_THROWS_AS(build_phase_cell(2, 2, std::move(phase), default_materials(2)),
                  DisconnectedSolid);
}

TEST_CASE("disk fluid fraction converges to the exact area at O(1/res)") {
  double exact = std::numbers::pi * 0.25 * 0.25;
  auto err = [&](int res) {
    auto [fs, pi] = volume_fractions(disk_cell(res));
    (void)fs;
    return std::abs(pi - exact);
  };
  double e64 = err(64), e128 = err(128);
  CHECK(e64 < 2.0 / 64.0);
  CHECK(e128 < 2.0 / 128.0);
  CHECK(e128 < e64);
}

TEST_CASE("single fluid voxel yields 4 facets with outward normals") {
  const int res = 4;
  std::vector<Phase> phase(res * res, Phase::Solid);
  phase[1 + res * 1] = Phase::Fluid;
  PhaseCell cell = build_phase_cell(2, res, std::move(phase), default_materials(2));
  InterfaceMesh im = extract_interface(cell);
  REQUIRE(im.facets.size() == 4);
  CHECK(im.total_area() == doctest::Approx(1.0).epsilon(1e-15));
  for (const auto& f : im.facets) {
    CHECK(f.area == doctest::Approx(0.25));
    CHECK(cell.phase[f.fluid_voxel] == Phase::Fluid);
    CHECK(cell.phase[f.solid_voxel] == Phase::Solid);
    // the normal points from the fluid voxel into the solid voxel
    long diff = f.solid_voxel - f.fluid_voxel;
    long step = f.axis == 0 ? 1 : res;
    long wrap = f.axis == 0 ? -(res - 1) : -res * (res - 1);
    CHECK((diff == f.sign * step || diff == f.sign * wrap));
  }
}

TEST_CASE("stripe interface has two flat faces of total length 2") {
  const int res = 8;
  std::vector<Phase> phase(res * res, Phase::Solid);
  for (int j = 0; j < 4; ++j)
    for (int i = 0; i < res; ++i) phase[i + res * j] = Phase::Fluid;
  PhaseCell cell = build_phase_cell(2, res, std::move(phase), default_materials(2));
  InterfaceMesh im = extract_interface(cell);
  CHECK(im.facets.size() == 2 * res);
  CHECK(im.total_area() == doctest::Approx(2.0).epsilon(1e-15));
}

TEST_CASE("translation leaves Pi, facet count and area unchanged") {
  MaterialParams m = default_materials(2);
  PhaseCell cell = random_geometry(2, 16, 3, m);
  auto [fs, pi] = volume_fractions(cell);
  (void)fs;
  InterfaceMesh im = extract_interface(cell);
  for (auto [si, sj] : {std::pair{1, 0}, {0, 1}, {7, 3}}) {
    std::vector<Phase> shifted(cell.phase.size());
    int n = cell.resolution;
    for (int j = 0; j < n; ++j)
      for (int i = 0; i < n; ++i)
        shifted[cell.index((i + si) % n, (j + sj) % n)] = cell.phase[cell.index(i, j)];
    PhaseCell moved = build_phase_cell(2, n, std::move(shifted), m);
    auto [fs2, pi2] = volume_fractions(moved);
    (void)fs2;
    InterfaceMesh im2 = extract_interface(moved);
    CHECK(pi2 == pi);
    CHECK(im2.facets.size() == im.facets.size());
    CHECK(im2.total_area() == doctest::Approx(im.total_area()).epsilon(1e-14));
  }
}

TEST_CASE("label swap maps Pi to 1-Pi and preserves the facet set") {
  // stripe geometry stays valid under the swap
  const int res = 8;
  std::vector<Phase> phase(res * res, Phase::Solid);
  for (int j = 0; j < 3; ++j)
    for (int i = 0; i < res; ++i) phase[i + res * j] = Phase::Fluid;
  PhaseCell cell = build_phase_cell(2, res, phase, default_materials(2));
  std::vector<Phase> swapped(phase.size());
  for (size_t i = 0; i < phase.size(); ++i)
    swapped[i] = phase[i] == Phase::Fluid ? Phase::Solid : Phase::Fluid;
  PhaseCell dual = build_phase_cell(2, res, std::move(swapped), default_materials(2));
  auto [fs1, pi1] = volume_fractions(cell);
  auto [fs2, pi2] = volume_fractions(dual);
  (void)fs1;
  (void)fs2;
  CHECK(pi1 + pi2 == doctest::Approx(1.0).epsilon(1e-15));
  InterfaceMesh a = extract_interface(cell), b = extract_interface(dual);
  REQUIRE(a.facets.size() == b.facets.size());
  // same faces, flipped orientation: match on (axis, base) with sign negated
  auto key = [](const InterfaceFacet& f) {
    return std::tuple{f.axis, f.base[0], f.base[1], f.base[2]};
  };
  for (size_t i = 0; i < a.facets.size(); ++i) {
    CHECK(key(a.facets[i]) == key(b.facets[i]));
    CHECK(a.facets[i].sign == -b.facets[i].sign);
  }
}

TEST_CASE("material invariants are enforced by name") {
  MaterialParams m = default_materials(2);
  m.mu = -1.0;
  CHECK_THROWS_WITH_AS(validate_materials(m), doctest::Contains("mu"), BadMaterial);
  m = default_materials(2);
  m.eta = -0.7;
  CHECK_THROWS_WITH_AS(validate_materials(m), doctest::Contains("eta"), BadMaterial);
  m = default_materials(2);
  m.alpha = 0.0;
  CHECK_THROWS_WITH_AS(validate_materials(m), doctest::Contains("alpha"), BadMaterial);
  m = default_materials(2);
  m.a.voigt(0, 0) = -5.0; // destroys positive definiteness
  CHECK_THROWS_AS(validate_materials(m), BadMaterial);
}
