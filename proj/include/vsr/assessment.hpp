#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <vector>

#include "vsr/morphology.hpp"
#include "vsr/nca.hpp"
#include "vsr/physics.hpp"

namespace vsr {

struct LocomotionProtocol {
  double duration = 30.0;   // s
  double transient = 5.0;   // s, discarded before measuring
  double control_hz = 60.0;

  int total_steps() const;
  int transient_steps() const;
  void validate() const;  // throws InvalidProtocol
};

struct EvaluationOutcome {
  std::string terrain_id;
  double vx = 0.0;  // side lengths per second, -inf when diverged
  bool diverged = false;
  std::vector<double> com_x;  // center of mass after each control step
  std::vector<double> com_y;
  std::vector<std::vector<double>> actuations;  // [control step][voxel]
  std::vector<std::vector<Vec2>> nodes;  // filled only when record_nodes
};

// Runs one full simulation: sensors -> controller -> 16 physics substeps per
// control step. Velocity is center-of-mass x displacement between the end of
// the transient and the end of the run. The controller is reset first.
EvaluationOutcome evaluate_locomotion(const MorphologyGrid& grid,
                                      const VoxelMaterial& material,
                                      NcaController& controller,
                                      const Terrain& terrain,
                                      const LocomotionProtocol& protocol,
                                      std::string terrain_id = "flat",
                                      bool record_nodes = false);

// Convenience path for the optimizer: builds a controller from the genotype
// and returns only vx (-inf on divergence instead of an exception).
double locomotion_fitness(const MorphologyGrid& grid,
                          const VoxelMaterial& material,
                          const NcaConfig& config,
                          std::span<const double> genotype,
                          const Terrain& terrain,
                          const LocomotionProtocol& protocol);

struct TerrainSuiteEntry {
  std::string id;
  Terrain terrain;
};

// The 16 unseen terrains used for adaptability: 6 hilly, 6 steppy, 4 slopes.
// None of them is the flat training terrain.
struct TerrainSuite {
  std::string version;
  std::vector<TerrainSuiteEntry> entries;

  static TerrainSuite standard(std::uint64_t seed);
  const TerrainSuiteEntry* find(const std::string& id) const;
  std::vector<std::string> ids() const;
};

struct ReassessRow {
  std::string terrain_id;
  std::string kind;
  std::string params;
  double vx = 0.0;  // 0 when diverged, see ReassessReport::any_diverged
  bool diverged = false;
  double dominant_freq_hz = 0.0;
};

struct ReassessReport {
  double mean_vx = 0.0;
  bool any_diverged = false;
  std::vector<ReassessRow> rows;
};

// Adaptability: mean vx over the suite, one fresh controller per terrain.
// Diverged runs count as 0 and set the flag.
ReassessReport reassess(const MorphologyGrid& grid,
                        const VoxelMaterial& material, const NcaConfig& config,
                        std::span<const double> genotype,
                        const TerrainSuite& suite,
                        const LocomotionProtocol& protocol, int workers = 1);

struct StatResult {
  double u = 0.0;        // U of the first sample
  double p = 1.0;        // two-sided
  std::size_t n_a = 0;
  std::size_t n_b = 0;
  bool exact = false;    // full enumeration instead of normal approximation
};

// Two-sided Mann-Whitney U with midranks. Exact enumeration when
// n_a * n_b <= 200 and the pooled sample is tie-free, otherwise normal
// approximation with tie and continuity corrections. Throws InvalidSample on
// an empty sample.
StatResult mann_whitney_u(std::span<const double> a, std::span<const double> b);

// Approximation branch, exposed so the two branches can be cross-checked.
StatResult mann_whitney_u_approx(std::span<const double> a,
                                 std::span<const double> b);

// Dominant frequency of a signal sampled at sample_hz: the argmax-magnitude
// DFT bin in (0, sample_hz/2] after mean-centering; 0 for a constant signal.
// Throws InvalidSample when the trace is shorter than 256 samples.
double vibration_metric(std::span<const double> trace, double sample_hz);

// Mean actuation across voxels per control step, post-transient window only.
std::vector<double> mean_actuation_trace(const EvaluationOutcome& outcome,
                                         const LocomotionProtocol& protocol);

}  // namespace vsr
