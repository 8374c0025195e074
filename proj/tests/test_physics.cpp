#include <doctest.h>

#include <algorithm>
#include <cmath>
#include <vector>

#include "vsr/errors.hpp"
#include "vsr/morphology.hpp"
#include "vsr/physics.hpp"
#include "vsr/rng.hpp"
#include "vsr/terrain.hpp"

using namespace vsr;

namespace {

constexpr double kDeg = 3.14159265358979323846 / 180.0;

double max_speed(const BodyState& state) {
  double m = 0.0;
  for (const Vec2& v : state.vel) {
    m = std::max(m, std::sqrt(dot(v, v)));
  }
  return m;
}

double min_ground_gap(const BodyState& state, const Terrain& terrain) {
  double gap = 1e300;
  for (const Vec2& p : state.pos) {
    gap = std::min(gap, p.y - terrain.height_at(p.x));
  }
  return gap;
}

double mean_edge_length(const BodyState& state) {
  double sum = 0.0;
  int n = 0;
  for (const Spring& s : state.springs) {
    if (!s.edge) continue;
    const Vec2 d = state.pos[s.b] - state.pos[s.a];
    sum += std::sqrt(dot(d, d));
    ++n;
  }
  return sum / n;
}

}  // namespace

TEST_CASE("flat terrain is zero everywhere") {
  const Terrain t = Terrain::flat();
  CHECK(t.height_at(-100.0) == 0.0);
  CHECK(t.height_at(0.0) == 0.0);
  CHECK(t.height_at(3.25) == 0.0);
  CHECK(t.height_at(10000.0) == 0.0);
  CHECK(t.normal_at(7.0).x == 0.0);
  CHECK(t.normal_at(7.0).y == 1.0);
  CHECK(t.kind() == TerrainKind::kFlat);
}

TEST_CASE("uphill slope height matches trigonometry") {
  const Terrain t = Terrain::slope(-10.0);
  CHECK(t.height_at(10.0) ==
        doctest::Approx(10.0 * std::tan(10.0 * kDeg)).epsilon(1e-9));
  // Launch pad sits at the grade height of its far end.
  CHECK(t.height_at(0.0) ==
        doctest::Approx(5.0 * std::tan(10.0 * kDeg)).epsilon(1e-9));
  CHECK(t.height_at(5.0) == doctest::Approx(t.height_at(-3.0)).epsilon(1e-12));
}

TEST_CASE("downhill slope descends") {
  const Terrain t = Terrain::slope(10.0);
  CHECK(t.height_at(10.0) ==
        doctest::Approx(-10.0 * std::tan(10.0 * kDeg)).epsilon(1e-9));
  CHECK(t.height_at(20.0) < t.height_at(10.0));
  // Surface normal tilts against the grade.
  const Vec2 n = t.normal_at(10.0);
  CHECK(n.y > 0.9);
  CHECK(std::sqrt(dot(n, n)) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("slope rejects angles at or beyond 30 degrees") {
  CHECK_THROWS_AS(Terrain::slope(30.0), InvalidTerrain);
  CHECK_THROWS_AS(Terrain::slope(-45.0), InvalidTerrain);
  CHECK_NOTHROW(Terrain::slope(29.9));
}

TEST_CASE("hilly terrain is seeded and bounded") {
  const Terrain a = Terrain::hilly(1.0, 10.0, 42);
  const Terrain b = Terrain::hilly(1.0, 10.0, 42);
  const Terrain c = Terrain::hilly(1.0, 10.0, 43);
  REQUIRE(a.knots().size() == b.knots().size());
  for (std::size_t i = 0; i < a.knots().size(); ++i) {
    CHECK(a.knots()[i].x == b.knots()[i].x);
    CHECK(a.knots()[i].y == b.knots()[i].y);
  }
  bool differs = c.knots().size() != a.knots().size();
  for (std::size_t i = 0; !differs && i < a.knots().size(); ++i) {
    differs = a.knots()[i].x != c.knots()[i].x;
  }
  CHECK(differs);

  // Flat pad, then peaks within [h/2, h] alternating with zero valleys.
  CHECK(a.height_at(0.0) == 0.0);
  CHECK(a.height_at(4.99) == 0.0);
  double prev_x = -1e9;
  for (const Vec2& k : a.knots()) {
    CHECK(k.x > prev_x);
    prev_x = k.x;
    if (k.y != 0.0) {
      CHECK(k.y >= 0.5);
      CHECK(k.y <= 1.0);
    }
  }
  CHECK_THROWS_AS(Terrain::hilly(0.0, 10.0, 1), InvalidTerrain);
  CHECK_THROWS_AS(Terrain::hilly(1.0, -2.0, 1), InvalidTerrain);
}

TEST_CASE("steppy terrain is a staircase") {
  const Terrain t = Terrain::steppy(0.5, 2.0);
  CHECK(t.height_at(3.0) == 0.0);
  CHECK(t.height_at(6.0) == doctest::Approx(0.5).epsilon(1e-12));
  CHECK(t.height_at(8.0) == doctest::Approx(1.0).epsilon(1e-12));
  CHECK(t.height_at(10.5) == doctest::Approx(1.5).epsilon(1e-12));
  // Monotone going up.
  double prev = -1.0;
  for (double x = 0.0; x < 50.0; x += 0.1) {
    const double h = t.height_at(x);
    CHECK(h >= prev - 1e-12);
    prev = h;
  }
  CHECK_THROWS_AS(Terrain::steppy(-0.5, 2.0), InvalidTerrain);
  CHECK_THROWS_AS(Terrain::steppy(0.5, 0.01), InvalidTerrain);
}

TEST_CASE("build_body structure for a single voxel") {
  const VoxelMaterial mat;
  const BodyState state =
      build_body(parse_morphology("1"), mat, Terrain::flat());
  CHECK(state.node_count() == 4);
  REQUIRE(state.springs.size() == 6);
  int edges = 0;
  int diagonals = 0;
  for (const Spring& s : state.springs) {
    if (s.edge) {
      ++edges;
      CHECK(s.rest0 == 1.0);
    } else {
      ++diagonals;
      CHECK(s.rest0 == doctest::Approx(std::sqrt(2.0)).epsilon(1e-12));
    }
  }
  CHECK(edges == 4);
  CHECK(diagonals == 2);
  for (double m : state.node_mass) CHECK(m == 1.0);
}

TEST_CASE("build_body shares corner nodes and sums masses") {
  const VoxelMaterial mat;
  const BodyState worm =
      build_body(parse_morphology("11111"), mat, Terrain::flat());
  CHECK(worm.node_count() == 12);
  CHECK(worm.voxel_count() == 5);

  double total = 0.0;
  for (double m : worm.node_mass) total += m;
  CHECK(total == doctest::Approx(20.0).epsilon(1e-12));

  const BodyState biped =
      build_body(parse_morphology("1111-1111-1001"), mat, Terrain::flat());
  CHECK(biped.node_count() == 19);

  const BodyState square =
      build_body(parse_morphology("11-11"), mat, Terrain::flat());
  CHECK(square.node_count() == 9);
  // The center node belongs to all four voxels.
  CHECK(*std::max_element(square.node_mass.begin(), square.node_mass.end()) ==
        doctest::Approx(4.0).epsilon(1e-12));
}

TEST_CASE("bodies spawn with the standard ground clearance") {
  const VoxelMaterial mat;
  for (const Terrain& t :
       {Terrain::flat(), Terrain::slope(-10.0), Terrain::hilly(1.0, 5.0, 3)}) {
    const BodyState state = build_body(parse_morphology("111"), mat, t);
    CHECK(min_ground_gap(state, t) == doctest::Approx(0.01).epsilon(1e-9));
    for (const Vec2& v : state.vel) {
      CHECK(v.x == 0.0);
      CHECK(v.y == 0.0);
    }
  }
}

TEST_CASE("center of mass") {
  const VoxelMaterial mat;
  BodyState state = build_body(parse_morphology("1"), mat, Terrain::flat());

  SUBCASE("unit voxel with equal masses sits at the centroid") {
    const Vec2 com = center_of_mass(state);
    CHECK(com.x == doctest::Approx(0.5).epsilon(1e-12));
    // Spawned with clearance, so y = 0.5 + 0.01.
    CHECK(com.y == doctest::Approx(0.51).epsilon(1e-9));
  }

  SUBCASE("translation moves the center of mass exactly") {
    const Vec2 before = center_of_mass(state);
    for (Vec2& p : state.pos) p = p + Vec2{3.0, 0.0};
    const Vec2 after = center_of_mass(state);
    CHECK(after.x - before.x == doctest::Approx(3.0).epsilon(1e-12));
    CHECK(after.y == doctest::Approx(before.y).epsilon(1e-12));
  }

  SUBCASE("worm at rest is centered at half its span") {
    const BodyState worm =
        build_body(parse_morphology("11111"), mat, Terrain::flat());
    CHECK(center_of_mass(worm).x == doctest::Approx(2.5).epsilon(1e-6));
  }
}

TEST_CASE("voxel_area") {
  const VoxelMaterial mat;
  BodyState state = build_body(parse_morphology("1"), mat, Terrain::flat());

  SUBCASE("unit square") {
    CHECK(voxel_area(state, 0) == doctest::Approx(1.0).epsilon(1e-12));
    CHECK(voxel_area(state, CellIndex{0, 0}) ==
          doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("rectangle") {
    const auto& n = state.voxel_nodes[0];
    state.pos[n[0]] = {0.0, 0.0};
    state.pos[n[1]] = {2.0, 0.0};
    state.pos[n[2]] = {2.0, 1.0};
    state.pos[n[3]] = {0.0, 1.0};
    CHECK(voxel_area(state, 0) == doctest::Approx(2.0).epsilon(1e-12));
  }

  SUBCASE("parallelogram") {
    const auto& n = state.voxel_nodes[0];
    state.pos[n[0]] = {0.0, 0.0};
    state.pos[n[1]] = {1.0, 0.0};
    state.pos[n[2]] = {1.5, 1.0};
    state.pos[n[3]] = {0.5, 1.0};
    CHECK(voxel_area(state, 0) == doctest::Approx(1.0).epsilon(1e-12));
  }

  SUBCASE("degenerate winding still returns a positive value") {
    const auto& n = state.voxel_nodes[0];
    state.pos[n[0]] = {0.0, 0.0};
    state.pos[n[1]] = {1.0, 1.0};
    state.pos[n[2]] = {1.0, 0.0};
    state.pos[n[3]] = {0.0, 1.0};
    CHECK(voxel_area(state, 0) >= 0.0);
  }

  SUBCASE("bad index throws") {
    CHECK_THROWS_AS(voxel_area(state, 5), NotAVoxel);
    CHECK_THROWS_AS(voxel_area(state, CellIndex{3, 3}), NotAVoxel);
  }
}

TEST_CASE("resting body stays at rest") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::flat();
  BodyState state = build_body(parse_morphology("11111"), mat, terrain);
  const std::vector<double> zeros(state.voxel_count(), 0.0);
  for (int k = 0; k < 180; ++k) {
    for (int s = 0; s < 16; ++s) advance(state, zeros, mat, terrain, kSimDt);
  }
  CHECK(max_speed(state) < 1e-2);
}

TEST_CASE("actuated voxel settles at the modulated rest length") {
  VoxelMaterial mat;
  mat.gravity = 0.0;
  const Terrain terrain = Terrain::flat();

  SUBCASE("full contraction") {
    BodyState state = build_body(parse_morphology("1"), mat, terrain);
    const std::vector<double> controls = {1.0};
    for (int i = 0; i < 2 * 960; ++i) {
      advance(state, controls, mat, terrain, kSimDt);
    }
    CHECK(mean_edge_length(state) ==
          doctest::Approx(0.8).epsilon(0.02));
  }

  SUBCASE("full expansion") {
    BodyState state = build_body(parse_morphology("1"), mat, terrain);
    const std::vector<double> controls = {-1.0};
    for (int i = 0; i < 2 * 960; ++i) {
      advance(state, controls, mat, terrain, kSimDt);
    }
    CHECK(mean_edge_length(state) ==
          doctest::Approx(1.2).epsilon(0.02));
  }

  SUBCASE("controls beyond [-1, 1] are clamped") {
    BodyState state = build_body(parse_morphology("1"), mat, terrain);
    const std::vector<double> controls = {9.0};
    for (int i = 0; i < 2 * 960; ++i) {
      advance(state, controls, mat, terrain, kSimDt);
    }
    CHECK(mean_edge_length(state) ==
          doctest::Approx(0.8).epsilon(0.02));
  }
}

TEST_CASE("dropped voxel lands and rests on its bottom corners") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::flat();
  BodyState state = build_body(parse_morphology("1"), mat, terrain);
  for (Vec2& p : state.pos) p.y += 1.0;
  const std::vector<double> zeros = {0.0};
  for (int i = 0; i < 3 * 960; ++i) {
    advance(state, zeros, mat, terrain, kSimDt);
  }
  CHECK(max_speed(state) < 1e-2);
  // Bottom corners are the first two entries of the voxel's node quad.
  const auto& n = state.voxel_nodes[0];
  for (int corner : {n[0], n[1]}) {
    CHECK(state.contact[corner] == 1);
    CHECK(state.pos[corner].y >= -1e-3);
    CHECK(state.pos[corner].y <= 1e-2);
  }
}

TEST_CASE("edge lengths respect the deformation limit under random control") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::hilly(1.0, 5.0, 7);
  BodyState state = build_body(parse_morphology("1111-1111-1001"), mat, terrain);
  // The contact correction runs after the final edge projection and can
  // re-stretch an edge slightly, so allow a small margin past the limits.
  Rng rng(123);
  std::vector<double> controls(state.voxel_count());
  const double lo = (1.0 - mat.deformation_limit) - 2e-3;
  const double hi = (1.0 + mat.deformation_limit) + 2e-3;

  for (int k = 0; k < 600; ++k) {
    for (double& c : controls) c = rng.uniform(-1.0, 1.0);
    for (int s = 0; s < 16; ++s) advance(state, controls, mat, terrain, kSimDt);
    for (const Spring& sp : state.springs) {
      if (!sp.edge) continue;
      const Vec2 d = state.pos[sp.b] - state.pos[sp.a];
      const double len = std::sqrt(dot(d, d));
      REQUIRE(len >= lo);
      REQUIRE(len <= hi);
    }
  }
}

TEST_CASE("nodes never sink past the penetration tolerance") {
  const VoxelMaterial mat;
  Rng rng(99);
  for (const Terrain& terrain :
       {Terrain::flat(), Terrain::hilly(1.0, 5.0, 7), Terrain::steppy(0.5, 2.0)}) {
    BodyState state = build_body(parse_morphology("11111"), mat, terrain);
    std::vector<double> controls(state.voxel_count());
    for (int k = 0; k < 300; ++k) {
      for (double& c : controls) c = rng.uniform(-1.0, 1.0);
      for (int s = 0; s < 16; ++s) {
        advance(state, controls, mat, terrain, kSimDt);
      }
      REQUIRE(min_ground_gap(state, terrain) >= -1e-3 - 1e-9);
    }
  }
}

TEST_CASE("mechanical energy is conserved without damping or gravity") {
  VoxelMaterial mat;
  mat.gravity = 0.0;
  mat.damping = 0.0;
  const Terrain terrain = Terrain::flat();
  BodyState state = build_body(parse_morphology("11"), mat, terrain);
  for (Vec2& p : state.pos) p.y += 2.0;  // keep contact out of play
  state.vel[0] = {0.05, -0.03};
  state.vel[3] = {-0.04, 0.02};

  const std::vector<double> zeros(state.voxel_count(), 0.0);
  const double e0 = mechanical_energy(state, mat);
  REQUIRE(e0 > 0.0);
  double worst = 0.0;
  for (int k = 0; k < 2 * 60; ++k) {
    for (int s = 0; s < 16; ++s) advance(state, zeros, mat, terrain, kSimDt);
    worst = std::max(worst,
                     std::abs(mechanical_energy(state, mat) - e0) / e0);
  }
  CHECK(worst < 0.01);
}

TEST_CASE("stepping is deterministic") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::hilly(1.0, 5.0, 11);
  BodyState a = build_body(parse_morphology("111"), mat, terrain);
  BodyState b = build_body(parse_morphology("111"), mat, terrain);
  const std::vector<double> controls = {0.5, -0.5, 0.25};
  for (int i = 0; i < 200; ++i) {
    advance(a, controls, mat, terrain, kSimDt);
    advance(b, controls, mat, terrain, kSimDt);
  }
  for (int i = 0; i < a.node_count(); ++i) {
    CHECK(a.pos[i].x == b.pos[i].x);
    CHECK(a.pos[i].y == b.pos[i].y);
    CHECK(a.vel[i].x == b.vel[i].x);
    CHECK(a.vel[i].y == b.vel[i].y);
  }
}

TEST_CASE("flat-terrain trajectories are translation invariant") {
  const Terrain terrain = Terrain::flat();
  const std::vector<double> controls = {1.0, -1.0, 0.5};

  SUBCASE("floating body tracks to rounding noise") {
    VoxelMaterial mat;
    mat.gravity = 0.0;
    BodyState a = build_body(parse_morphology("111"), mat, terrain);
    for (Vec2& p : a.pos) p.y += 2.0;
    a.vel[0] = {0.05, -0.03};
    a.vel[5] = {-0.02, 0.04};
    BodyState b = a;
    for (Vec2& p : b.pos) p.x += 3.0;
    for (int i = 0; i < 120 * 16; ++i) {
      advance(a, controls, mat, terrain, kSimDt);
      advance(b, controls, mat, terrain, kSimDt);
    }
    for (int i = 0; i < a.node_count(); ++i) {
      CHECK(b.pos[i].x - a.pos[i].x == doctest::Approx(3.0).epsilon(1e-9));
      CHECK(b.pos[i].y == doctest::Approx(a.pos[i].y).epsilon(1e-9));
    }
  }

  SUBCASE("grounded gait shows no gross position dependence") {
    // Friction stick-slip switching amplifies the rounding noise that the
    // shifted coordinates inject, so only a coarse bound is meaningful here.
    const VoxelMaterial mat;
    BodyState a = build_body(parse_morphology("111"), mat, terrain);
    BodyState b = a;
    for (Vec2& p : b.pos) p.x += 3.0;
    for (int i = 0; i < 120 * 16; ++i) {
      advance(a, controls, mat, terrain, kSimDt);
      advance(b, controls, mat, terrain, kSimDt);
    }
    for (int i = 0; i < a.node_count(); ++i) {
      CHECK(b.pos[i].x - a.pos[i].x == doctest::Approx(3.0).epsilon(1e-2));
      CHECK(b.pos[i].y == doctest::Approx(a.pos[i].y).epsilon(1e-2));
    }
  }
}

TEST_CASE("physics_step leaves the input state untouched") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::flat();
  const BodyState state = build_body(parse_morphology("1"), mat, terrain);
  const std::vector<double> controls = {0.5};
  const BodyState next = physics_step(state, controls, mat, terrain, kSimDt);
  CHECK(state.sim_time == 0.0);
  CHECK(next.sim_time == kSimDt);
  CHECK(state.rest_scale[0] == 1.0);
  CHECK(next.rest_scale[0] == doctest::Approx(0.9).epsilon(1e-12));
}

TEST_CASE("advance validates the control vector length") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::flat();
  BodyState state = build_body(parse_morphology("11"), mat, terrain);
  const std::vector<double> wrong = {0.0};
  CHECK_THROWS_AS(advance(state, wrong, mat, terrain, kSimDt), InvalidBody);
}

TEST_CASE("non-finite coordinates raise SimulationDiverged") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::flat();
  BodyState state = build_body(parse_morphology("11"), mat, terrain);
  state.pos[2].y = std::numeric_limits<double>::quiet_NaN();
  const std::vector<double> zeros = {0.0, 0.0};
  try {
    advance(state, zeros, mat, terrain, kSimDt);
    FAIL("expected SimulationDiverged");
  } catch (const SimulationDiverged& e) {
    CHECK(e.node_index >= 0);
    CHECK(e.sim_time > 0.0);
  }
}

TEST_CASE("voxel sensors stay in range and read the body") {
  const VoxelMaterial mat;
  const Terrain terrain = Terrain::flat();
  BodyState state = build_body(parse_morphology("11111"), mat, terrain);
  const std::vector<double> zeros(state.voxel_count(), 0.0);
  for (int i = 0; i < 960; ++i) advance(state, zeros, mat, terrain, kSimDt);

  for (int v = 0; v < state.voxel_count(); ++v) {
    const auto s = voxel_sensors(state, v, mat);
    for (double x : s) {
      CHECK(x >= 0.0);
      CHECK(x <= 1.0);
    }
    CHECK(s[0] == doctest::Approx(0.5).epsilon(0.12));  // near rest area
    CHECK(s[1] == 1.0);                                 // resting on ground
  }

  SUBCASE("velocity channels map linearly") {
    for (Vec2& v : state.vel) v = {0.5, -0.25};
    const auto s = voxel_sensors(state, 2, mat);
    CHECK(s[2] == doctest::Approx(0.5 + 0.5 / (2.0 * kVelocityHalfRange))
                      .epsilon(1e-12));
    CHECK(s[3] == doctest::Approx(0.5 - 0.25 / (2.0 * kVelocityHalfRange))
                      .epsilon(1e-12));
    for (Vec2& v : state.vel) v = {50.0, -50.0};
    const auto c = voxel_sensors(state, 2, mat);
    CHECK(c[2] == 1.0);
    CHECK(c[3] == 0.0);
  }

  SUBCASE("floating body reports no touch") {
    BodyState lifted = build_body(parse_morphology("1"), mat, terrain);
    for (Vec2& p : lifted.pos) p.y += 5.0;
    const std::vector<double> zero = {0.0};
    advance(lifted, zero, mat, terrain, kSimDt);
    CHECK(voxel_sensors(lifted, 0, mat)[1] == 0.0);
  }

  CHECK_THROWS_AS(voxel_sensors(state, 99, mat), NotAVoxel);
}

TEST_CASE("mechanical energy bookkeeping") {
  VoxelMaterial mat;
  mat.gravity = 0.0;
  BodyState state = build_body(parse_morphology("1"), mat, Terrain::flat());
  CHECK(mechanical_energy(state, mat) == doctest::Approx(0.0).epsilon(1e-12));
  state.vel[0] = {2.0, 0.0};
  CHECK(mechanical_energy(state, mat) ==
        doctest::Approx(0.5 * 1.0 * 4.0).epsilon(1e-12));
}
