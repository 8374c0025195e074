#include "vsr/physics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <unordered_map>

#include "vsr/errors.hpp"

namespace vsr {
namespace {

constexpr double kSqrt2 = 1.41421356237309504880;
constexpr int kProjectionRounds = 2;

double clamp_unit(double v) { return std::clamp(v, -1.0, 1.0); }

// Penetration depth of a node measured perpendicular to the local surface;
// positive when the node sits below the ground line.
double penetration(const Terrain& terrain, Vec2 p, Vec2 normal) {
  const double gap = p.y - terrain.height_at(p.x);
  return -gap * normal.y;
}

void apply_springs(BodyState& state, const VoxelMaterial& material,
                   std::vector<Vec2>& force) {
  for (const Spring& s : state.springs) {
    const Vec2 d = state.pos[s.b] - state.pos[s.a];
    const double len = std::sqrt(dot(d, d));
    if (len < 1.0e-12) continue;
    const Vec2 dir = d * (1.0 / len);
    const double rest = s.rest0 * state.rest_scale[s.voxel];
    const double rel_speed = dot(state.vel[s.b] - state.vel[s.a], dir);
    const double f = -s.stiffness * (len - rest) - material.damping * rel_speed;
    force[s.b] = force[s.b] + dir * f;
    force[s.a] = force[s.a] - dir * f;
  }
}

void apply_contacts(BodyState& state, const VoxelMaterial& material,
                    const Terrain& terrain, double dt,
                    std::vector<Vec2>& force) {
  const int n = state.node_count();
  for (int i = 0; i < n; ++i) {
    const Vec2 normal = terrain.normal_at(state.pos[i].x);
    const double pen = penetration(terrain, state.pos[i], normal);
    if (pen <= 0.0) {
      state.contact[i] = 0;
      continue;
    }
    state.contact[i] = 1;
    const double vn = dot(state.vel[i], normal);
    const double fn =
        std::max(0.0, material.ground_stiffness * pen -
                          material.ground_damping * vn);
    force[i] = force[i] + normal * fn;

    const Vec2 tangent{normal.y, -normal.x};
    const double vt = dot(state.vel[i], tangent);
    const double ft_ext = dot(force[i], tangent);
    // Force that would bring the tangential velocity to zero this substep.
    const double ft_stop = -state.node_mass[i] * vt / dt - ft_ext;
    const double ft_max = material.friction_static * fn;
    double ft = ft_stop;
    if (std::abs(ft_stop) > ft_max) {
      ft = -material.friction_dynamic * fn * (vt > 0.0 ? 1.0 : -1.0);
    }
    force[i] = force[i] + tangent * ft;
  }
}

void project_edges(BodyState& state, const VoxelMaterial& material) {
  const double lo = (1.0 - material.deformation_limit) * material.side_rest_length;
  const double hi = (1.0 + material.deformation_limit) * material.side_rest_length;
  for (const Spring& s : state.springs) {
    if (!s.edge) continue;
    const Vec2 d = state.pos[s.b] - state.pos[s.a];
    const double len = std::sqrt(dot(d, d));
    if (len < 1.0e-12) continue;
    const double target = std::clamp(len, lo, hi);
    if (target == len) continue;
    const Vec2 dir = d * (1.0 / len);
    const double ma = state.node_mass[s.a];
    const double mb = state.node_mass[s.b];
    const double wa = mb / (ma + mb);
    const double wb = ma / (ma + mb);
    const double excess = len - target;
    state.pos[s.a] = state.pos[s.a] + dir * (excess * wa);
    state.pos[s.b] = state.pos[s.b] - dir * (excess * wb);
    const double rel = dot(state.vel[s.b] - state.vel[s.a], dir);
    // Drop the velocity component that keeps violating the clamped limit.
    if ((excess > 0.0 && rel > 0.0) || (excess < 0.0 && rel < 0.0)) {
      state.vel[s.a] = state.vel[s.a] + dir * (rel * wa);
      state.vel[s.b] = state.vel[s.b] - dir * (rel * wb);
    }
  }
}

void project_contacts(BodyState& state, const VoxelMaterial& material,
                      const Terrain& terrain) {
  const double tol = kPenetrationTolerance * material.side_rest_length;
  const int n = state.node_count();
  for (int i = 0; i < n; ++i) {
    const Vec2 normal = terrain.normal_at(state.pos[i].x);
    const double pen = penetration(terrain, state.pos[i], normal);
    if (pen > tol) {
      state.pos[i] = state.pos[i] + normal * (pen - tol);
      const double vn = dot(state.vel[i], normal);
      if (vn < 0.0) state.vel[i] = state.vel[i] - normal * vn;
      state.contact[i] = 1;
    }
    // Next to terrain corners the push along the local normal can land on
    // the wrong side of the adjacent segment; lift straight up as a final
    // backstop so the depth bound holds everywhere.
    const double floor_y = terrain.height_at(state.pos[i].x) - tol;
    if (state.pos[i].y < floor_y) {
      state.pos[i].y = floor_y;
      if (state.vel[i].y < 0.0) state.vel[i].y = 0.0;
      state.contact[i] = 1;
    }
  }
}

}  // namespace

BodyState build_body(const MorphologyGrid& grid, const VoxelMaterial& material,
                     const Terrain& terrain) {
  BodyState state;
  state.side_length = material.side_rest_length;
  state.voxel_cells = grid.voxel_order();

  // Lattice corners are keyed by (row, col) of the node grid, which has one
  // more row and column than the voxel grid.
  const int node_cols = grid.width() + 1;
  std::unordered_map<int, int> node_of;
  auto node_index = [&](int row, int col) {
    const int key = row * node_cols + col;
    const auto it = node_of.find(key);
    if (it != node_of.end()) return it->second;
    const int idx = static_cast<int>(state.pos.size());
    node_of.emplace(key, idx);
    const double l0 = material.side_rest_length;
    state.pos.push_back({col * l0, (grid.height() - row) * l0});
    state.node_mass.push_back(0.0);
    return idx;
  };

  for (std::size_t v = 0; v < state.voxel_cells.size(); ++v) {
    const CellIndex cell = state.voxel_cells[v];
    const int bl = node_index(cell.row + 1, cell.col);
    const int br = node_index(cell.row + 1, cell.col + 1);
    const int tr = node_index(cell.row, cell.col + 1);
    const int tl = node_index(cell.row, cell.col);
    state.voxel_nodes.push_back({bl, br, tr, tl});
    for (int corner : {bl, br, tr, tl}) {
      state.node_mass[corner] += material.mass_per_corner;
    }
    const double l0 = material.side_rest_length;
    const int vi = static_cast<int>(v);
    const double ke = material.edge_stiffness;
    const double kd = material.diagonal_stiffness;
    state.springs.push_back({bl, br, vi, l0, ke, true});
    state.springs.push_back({br, tr, vi, l0, ke, true});
    state.springs.push_back({tr, tl, vi, l0, ke, true});
    state.springs.push_back({tl, bl, vi, l0, ke, true});
    state.springs.push_back({bl, tr, vi, kSqrt2 * l0, kd, false});
    state.springs.push_back({br, tl, vi, kSqrt2 * l0, kd, false});
  }

  double min_gap = std::numeric_limits<double>::infinity();
  for (const Vec2& p : state.pos) {
    min_gap = std::min(min_gap, p.y - terrain.height_at(p.x));
  }
  const double shift = kSpawnClearance * material.side_rest_length - min_gap;
  for (Vec2& p : state.pos) p.y += shift;

  state.vel.assign(state.pos.size(), Vec2{0.0, 0.0});
  state.rest_scale.assign(state.voxel_cells.size(), 1.0);
  state.contact.assign(state.pos.size(), 0);
  return state;
}

void advance(BodyState& state, std::span<const double> controls,
             const VoxelMaterial& material, const Terrain& terrain,
             double dt) {
  if (static_cast<int>(controls.size()) != state.voxel_count()) {
    throw InvalidBody("control vector has " + std::to_string(controls.size()) +
                      " entries for " + std::to_string(state.voxel_count()) +
                      " voxels");
  }
  for (int v = 0; v < state.voxel_count(); ++v) {
    state.rest_scale[v] = 1.0 - material.actuation_ratio * clamp_unit(controls[v]);
  }

  const int n = state.node_count();
  std::vector<Vec2> force(n);
  for (int i = 0; i < n; ++i) {
    force[i] = {0.0, -material.gravity * state.node_mass[i]};
  }
  apply_springs(state, material, force);
  apply_contacts(state, material, terrain, dt, force);

  for (int i = 0; i < n; ++i) {
    state.vel[i] = state.vel[i] + force[i] * (dt / state.node_mass[i]);
    state.pos[i] = state.pos[i] + state.vel[i] * dt;
  }

  for (int round = 0; round < kProjectionRounds; ++round) {
    project_edges(state, material);
    project_contacts(state, material, terrain);
  }

  state.sim_time += dt;
  for (int i = 0; i < n; ++i) {
    if (!std::isfinite(state.pos[i].x) || !std::isfinite(state.pos[i].y) ||
        !std::isfinite(state.vel[i].x) || !std::isfinite(state.vel[i].y)) {
      throw SimulationDiverged("node coordinates stopped being finite",
                               state.sim_time, i);
    }
  }
}

BodyState physics_step(const BodyState& state, std::span<const double> controls,
                       const VoxelMaterial& material, const Terrain& terrain,
                       double dt) {
  BodyState next = state;
  advance(next, controls, material, terrain, dt);
  return next;
}

Vec2 center_of_mass(const BodyState& state) {
  double total = 0.0;
  Vec2 weighted{0.0, 0.0};
  for (int i = 0; i < state.node_count(); ++i) {
    total += state.node_mass[i];
    weighted = weighted + state.pos[i] * state.node_mass[i];
  }
  return weighted * (1.0 / total);
}

double voxel_area(const BodyState& state, int voxel_index) {
  if (voxel_index < 0 || voxel_index >= state.voxel_count()) {
    throw NotAVoxel("voxel index " + std::to_string(voxel_index) +
                    " out of range");
  }
  const auto& nodes = state.voxel_nodes[voxel_index];
  double twice = 0.0;
  for (int k = 0; k < 4; ++k) {
    const Vec2 p = state.pos[nodes[k]];
    const Vec2 q = state.pos[nodes[(k + 1) % 4]];
    twice += p.x * q.y - q.x * p.y;
  }
  return std::abs(twice) * 0.5;
}

double voxel_area(const BodyState& state, CellIndex cell) {
  for (std::size_t v = 0; v < state.voxel_cells.size(); ++v) {
    if (state.voxel_cells[v] == cell) {
      return voxel_area(state, static_cast<int>(v));
    }
  }
  throw NotAVoxel("no voxel at row " + std::to_string(cell.row) + ", col " +
                  std::to_string(cell.col));
}

double mechanical_energy(const BodyState& state,
                         const VoxelMaterial& material) {
  double energy = 0.0;
  for (int i = 0; i < state.node_count(); ++i) {
    energy += 0.5 * state.node_mass[i] * dot(state.vel[i], state.vel[i]);
    energy += state.node_mass[i] * material.gravity * state.pos[i].y;
  }
  for (const Spring& s : state.springs) {
    const Vec2 d = state.pos[s.b] - state.pos[s.a];
    const double len = std::sqrt(dot(d, d));
    const double rest = s.rest0 * state.rest_scale[s.voxel];
    energy += 0.5 * s.stiffness * (len - rest) * (len - rest);
  }
  return energy;
}

std::array<double, 4> voxel_sensors(const BodyState& state, int voxel_index,
                                    const VoxelMaterial& material) {
  if (voxel_index < 0 || voxel_index >= state.voxel_count()) {
    throw NotAVoxel("voxel index " + std::to_string(voxel_index) +
                    " out of range");
  }
  const auto& nodes = state.voxel_nodes[voxel_index];
  const double rest_area =
      material.side_rest_length * material.side_rest_length;
  const double ratio = voxel_area(state, voxel_index) / rest_area;

  bool touching = false;
  Vec2 mean_vel{0.0, 0.0};
  for (int corner : nodes) {
    touching = touching || state.contact[corner] != 0;
    mean_vel = mean_vel + state.vel[corner];
  }
  mean_vel = mean_vel * 0.25;

  auto squash_vel = [](double v) {
    return std::clamp(0.5 + v / (2.0 * kVelocityHalfRange), 0.0, 1.0);
  };
  return {std::clamp(ratio * 0.5, 0.0, 1.0), touching ? 1.0 : 0.0,
          squash_vel(mean_vel.x), squash_vel(mean_vel.y)};
}

}  // namespace vsr
