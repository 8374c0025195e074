#pragma once

#include <array>
#include <memory>
#include <span>
#include <vector>

#include "vsr/morphology.hpp"
#include "vsr/neuro.hpp"

namespace vsr {

// One controller cell per voxel; cells exchange messages with their four
// lattice neighbors. Messages sent during one control step arrive at the
// start of the next.
struct NcaConfig {
  bool uniform = true;      // all cells share one parameter vector
  bool directional = true;  // distinct message per direction
  int channels = 1;         // values per message
  NeuralModel model = NeuralModel::kMlp;
};

// Cell input is [4 sensors, incoming up, left, down, right]; hidden width
// equals the input width; output is [actuation, outgoing messages] with one
// message per direction, or a single broadcast message when not directional.
NetworkShape nca_shape(const NcaConfig& config);

int genotype_length(const NcaConfig& config, const MorphologyGrid& grid);

class NcaController {
public:
  NcaController(const MorphologyGrid& grid, const NcaConfig& config,
                std::span<const double> genotype);

  // Spiking networks keep views into the stored genotype, so the controller
  // moves but does not copy.
  NcaController(const NcaController&) = delete;
  NcaController& operator=(const NcaController&) = delete;
  NcaController(NcaController&&) = default;
  NcaController& operator=(NcaController&&) = default;

  // Runs every cell once on the given per-voxel sensor rows (voxel order)
  // and returns one actuation value in [-1, 1] per voxel.
  std::vector<double> control_step(
      std::span<const std::array<double, 4>> sensors);

  // Clears membrane state, message buffers, and coding state; parameters
  // stay.
  void reset();

  const NcaConfig& config() const { return config_; }
  const NetworkShape& shape() const { return shape_; }
  int voxel_count() const { return static_cast<int>(neighbor_.size()); }

  // Message buffers feeding the next control step, 4 * channels entries per
  // voxel ordered up, left, down, right. Values for the MLP model, spike
  // trains otherwise.
  std::span<const double> incoming_values(int voxel) const;
  std::span<const SpikeTrain> incoming_trains(int voxel) const;

private:
  WeightSet weights_for(int voxel) const;
  void step_mlp(std::span<const std::array<double, 4>> sensors,
                std::vector<double>& actuations);
  void step_snn(std::span<const std::array<double, 4>> sensors,
                std::vector<double>& actuations);

  NcaConfig config_;
  NetworkShape shape_;
  std::vector<double> genotype_;
  std::vector<std::array<int, 4>> neighbor_;  // voxel index per direction, -1 if absent

  // MLP message buffers, [voxel][direction * channels + k].
  std::vector<std::vector<double>> value_in_;
  std::vector<std::vector<double>> value_out_;

  // Spiking state.
  std::vector<LifNetwork> nets_;
  std::vector<std::array<RateEncoderState, 4>> encoders_;
  std::vector<RateDecoderState> decoders_;
  std::vector<std::vector<SpikeTrain>> train_in_;
  std::vector<std::vector<SpikeTrain>> train_out_;

  RateCoding coding_;
  long long step_counter_ = 0;

  // scratch buffers reused across steps
  std::vector<double> x_buf_;
  std::vector<double> hidden_buf_;
  std::vector<double> y_buf_;
  std::unique_ptr<bool[]> in_spikes_;
  std::unique_ptr<bool[]> out_spikes_;
};

NcaController build_controller(const MorphologyGrid& grid,
                               const NcaConfig& config,
                               std::span<const double> genotype);

}  // namespace vsr
