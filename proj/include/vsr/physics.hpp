#pragma once

#include <array>
#include <cstdint>
#include <span>
#include <vector>

#include "vsr/morphology.hpp"
#include "vsr/terrain.hpp"

namespace vsr {

// Material and world constants shared by every voxel of a body. Lengths in
// side lengths, masses in corner masses, time in seconds.
struct VoxelMaterial {
  double side_rest_length = 1.0;
  double mass_per_corner = 1.0;
  double edge_stiffness = 200.0;
  double diagonal_stiffness = 100.0;
  double damping = 4.0;
  double actuation_ratio = 0.2;
  double deformation_limit = 0.3;
  double gravity = 9.81;
  double ground_stiffness = 1.0e6;
  double ground_damping = 100.0;
  double friction_static = 0.8;
  double friction_dynamic = 0.7;
};

inline constexpr double kSimDt = 1.0 / 960.0;
inline constexpr double kSpawnClearance = 0.01;   // in side lengths
inline constexpr double kPenetrationTolerance = 1.0e-3;

struct Spring {
  int a = 0;
  int b = 0;
  int voxel = 0;
  double rest0 = 1.0;
  double stiffness = 0.0;
  bool edge = true;  // false for diagonals
};

// Mass-spring body plus its dynamic state. The structural arrays are fixed
// at build time; copying the whole struct snapshots a simulation.
struct BodyState {
  // structure
  std::vector<double> node_mass;
  std::vector<Spring> springs;
  std::vector<std::array<int, 4>> voxel_nodes;  // bl, br, tr, tl per voxel
  std::vector<CellIndex> voxel_cells;
  double side_length = 1.0;

  // dynamics
  std::vector<Vec2> pos;
  std::vector<Vec2> vel;
  std::vector<double> rest_scale;  // per voxel, 1 - rho * a
  std::vector<std::uint8_t> contact;  // per node, from the last substep
  double sim_time = 0.0;

  int node_count() const { return static_cast<int>(pos.size()); }
  int voxel_count() const { return static_cast<int>(voxel_nodes.size()); }
};

// Assembles the body over the terrain: corner nodes shared between adjacent
// voxels, masses summed per corner, four edge plus two diagonal springs per
// voxel, lowest node spawned kSpawnClearance above the ground.
BodyState build_body(const MorphologyGrid& grid, const VoxelMaterial& material,
                     const Terrain& terrain);

// One semi-implicit Euler substep of size dt. Controls hold one actuation
// value per voxel in voxel order, clamped to [-1, 1]; spring rest lengths
// scale by 1 - actuation_ratio * a. After integration edge lengths are
// projected into [1 - limit, 1 + limit] * l0 and nodes are pushed back to at
// most kPenetrationTolerance below the surface. Throws SimulationDiverged
// when a node coordinate stops being finite.
void advance(BodyState& state, std::span<const double> controls,
             const VoxelMaterial& material, const Terrain& terrain, double dt);

// Pure variant of advance.
BodyState physics_step(const BodyState& state, std::span<const double> controls,
                       const VoxelMaterial& material, const Terrain& terrain,
                       double dt);

Vec2 center_of_mass(const BodyState& state);

// Current area of one voxel by the shoelace formula (always positive).
double voxel_area(const BodyState& state, int voxel_index);
double voxel_area(const BodyState& state, CellIndex cell);

// Kinetic plus spring plus gravitational potential energy, for diagnostics.
double mechanical_energy(const BodyState& state, const VoxelMaterial& material);

inline constexpr double kVelocityHalfRange = 1.0;  // side lengths per second

// Sensor reading for one voxel, every channel in [0, 1]:
//   [0] current area over rest area, halved
//   [1] 1 when any corner touched the ground during the last substep
//   [2] x velocity of the voxel corners' mean, linearly mapped from
//       [-kVelocityHalfRange, kVelocityHalfRange]
//   [3] same for y velocity
std::array<double, 4> voxel_sensors(const BodyState& state, int voxel_index,
                                    const VoxelMaterial& material);

}  // namespace vsr
