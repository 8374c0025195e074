#include "vsr/nca.hpp"

#include <algorithm>
#include <string>

#include "vsr/errors.hpp"

namespace vsr {
namespace {

constexpr int kDirections = 4;  // up, left, down, right

int opposite(int d) { return (d + 2) % kDirections; }

void check_config(const NcaConfig& config) {
  if (config.channels < 1 || config.channels > 64) {
    throw ConfigError("nca.channels", "must be in [1, 64], got " +
                                          std::to_string(config.channels));
  }
}

}  // namespace

NetworkShape nca_shape(const NcaConfig& config) {
  check_config(config);
  NetworkShape shape;
  shape.inputs = 4 + kDirections * config.channels;
  shape.hidden = shape.inputs;
  shape.outputs =
      1 + (config.directional ? kDirections * config.channels : config.channels);
  shape.model = config.model;
  return shape;
}

int genotype_length(const NcaConfig& config, const MorphologyGrid& grid) {
  const int per_cell = param_count(nca_shape(config));
  return config.uniform ? per_cell : per_cell * grid.voxel_count();
}

NcaController::NcaController(const MorphologyGrid& grid,
                             const NcaConfig& config,
                             std::span<const double> genotype)
    : config_(config),
      shape_(nca_shape(config)),
      genotype_(genotype.begin(), genotype.end()) {
  const int expected = genotype_length(config_, grid);
  if (static_cast<int>(genotype_.size()) != expected) {
    throw GenotypeShapeError("genotype has " +
                             std::to_string(genotype_.size()) +
                             " parameters, controller needs " +
                             std::to_string(expected));
  }

  const auto& cells = grid.voxel_order();
  neighbor_.resize(cells.size());
  for (std::size_t v = 0; v < cells.size(); ++v) {
    const NeighborSet nb = grid.neighbors(cells[v]);
    const std::optional<CellIndex> by_dir[kDirections] = {nb.up, nb.left,
                                                          nb.down, nb.right};
    for (int d = 0; d < kDirections; ++d) {
      neighbor_[v][d] = by_dir[d] ? grid.voxel_index(*by_dir[d]) : -1;
    }
  }

  const std::size_t slots = cells.size();
  const std::size_t per_voxel =
      static_cast<std::size_t>(kDirections) * config_.channels;
  if (config_.model == NeuralModel::kMlp) {
    value_in_.assign(slots, std::vector<double>(per_voxel, 0.0));
    value_out_.assign(slots, std::vector<double>(per_voxel, 0.0));
    x_buf_.resize(shape_.inputs);
    hidden_buf_.resize(shape_.hidden);
    y_buf_.resize(shape_.outputs);
  } else {
    const LifParameters params;
    nets_.reserve(slots);
    for (std::size_t v = 0; v < slots; ++v) {
      nets_.emplace_back(shape_, weights_for(static_cast<int>(v)), params);
    }
    encoders_.assign(slots, std::array<RateEncoderState, 4>{});
    decoders_.assign(slots, RateDecoderState(coding_.window_steps));
    train_in_.assign(slots, std::vector<SpikeTrain>(per_voxel));
    train_out_.assign(slots, std::vector<SpikeTrain>(per_voxel));
    in_spikes_ = std::make_unique<bool[]>(static_cast<std::size_t>(shape_.inputs));
    out_spikes_ =
        std::make_unique<bool[]>(static_cast<std::size_t>(shape_.outputs));
  }
}

WeightSet NcaController::weights_for(int voxel) const {
  const int per_cell = param_count(shape_);
  std::span<const double> slice(genotype_);
  if (!config_.uniform) {
    slice = slice.subspan(static_cast<std::size_t>(voxel) * per_cell,
                          static_cast<std::size_t>(per_cell));
  }
  return slice_weights(shape_, slice);
}

std::vector<double> NcaController::control_step(
    std::span<const std::array<double, 4>> sensors) {
  if (static_cast<int>(sensors.size()) != voxel_count()) {
    throw InvalidBody("got " + std::to_string(sensors.size()) +
                      " sensor rows for " + std::to_string(voxel_count()) +
                      " voxels");
  }
  std::vector<double> actuations(sensors.size(), 0.0);
  if (config_.model == NeuralModel::kMlp) {
    step_mlp(sensors, actuations);
  } else {
    step_snn(sensors, actuations);
  }
  ++step_counter_;
  return actuations;
}

void NcaController::step_mlp(std::span<const std::array<double, 4>> sensors,
                             std::vector<double>& actuations) {
  const int c = config_.channels;
  for (int v = 0; v < voxel_count(); ++v) {
    for (int i = 0; i < 4; ++i) x_buf_[i] = sensors[v][i];
    for (std::size_t j = 0; j < value_in_[v].size(); ++j) {
      x_buf_[4 + j] = value_in_[v][j];
    }
    mlp_forward(shape_, weights_for(v), x_buf_, hidden_buf_, y_buf_);
    actuations[v] = y_buf_[0];
    for (int d = 0; d < kDirections; ++d) {
      for (int k = 0; k < c; ++k) {
        const int src = config_.directional ? 1 + d * c + k : 1 + k;
        value_out_[v][d * c + k] = y_buf_[src];
      }
    }
  }
  for (int v = 0; v < voxel_count(); ++v) {
    for (int d = 0; d < kDirections; ++d) {
      const int nb = neighbor_[v][d];
      for (int k = 0; k < c; ++k) {
        value_in_[v][d * c + k] =
            nb >= 0 ? value_out_[nb][opposite(d) * c + k] : 0.0;
      }
    }
  }
}

void NcaController::step_snn(std::span<const std::array<double, 4>> sensors,
                             std::vector<double>& actuations) {
  const int c = config_.channels;
  std::array<SpikeTrain, 4> sensor_trains;
  for (int v = 0; v < voxel_count(); ++v) {
    for (int i = 0; i < 4; ++i) {
      sensor_trains[i] =
          encode_scalar(sensors[v][i], encoders_[v][i], step_counter_, coding_)
              .train;
    }
    int actuation_spikes = 0;
    std::vector<SpikeTrain>& out = train_out_[v];
    std::fill(out.begin(), out.end(), SpikeTrain{});
    for (int t = 0; t < kSnnStepsPerControl; ++t) {
      for (int i = 0; i < 4; ++i) in_spikes_[i] = sensor_trains[i].get(t);
      for (std::size_t j = 0; j < train_in_[v].size(); ++j) {
        in_spikes_[4 + j] = train_in_[v][j].get(t);
      }
      nets_[v].step({in_spikes_.get(), static_cast<std::size_t>(shape_.inputs)},
                    {out_spikes_.get(),
                     static_cast<std::size_t>(shape_.outputs)});
      if (out_spikes_[0]) ++actuation_spikes;
      for (int d = 0; d < kDirections; ++d) {
        for (int k = 0; k < c; ++k) {
          const int src = config_.directional ? 1 + d * c + k : 1 + k;
          if (out_spikes_[src]) out[d * c + k].set(t);
        }
      }
    }
    decoders_[v].push(actuation_spikes);
    actuations[v] = decode_spikes(decoders_[v], coding_);
  }
  for (int v = 0; v < voxel_count(); ++v) {
    for (int d = 0; d < kDirections; ++d) {
      const int nb = neighbor_[v][d];
      for (int k = 0; k < c; ++k) {
        train_in_[v][d * c + k] =
            nb >= 0 ? train_out_[nb][opposite(d) * c + k] : SpikeTrain{};
      }
    }
  }
}

void NcaController::reset() {
  step_counter_ = 0;
  for (auto& buf : value_in_) std::fill(buf.begin(), buf.end(), 0.0);
  for (auto& buf : value_out_) std::fill(buf.begin(), buf.end(), 0.0);
  for (auto& net : nets_) net.reset();
  for (auto& encs : encoders_) encs.fill(RateEncoderState{});
  for (auto& dec : decoders_) dec.reset();
  for (auto& buf : train_in_) std::fill(buf.begin(), buf.end(), SpikeTrain{});
  for (auto& buf : train_out_) std::fill(buf.begin(), buf.end(), SpikeTrain{});
}

std::span<const double> NcaController::incoming_values(int voxel) const {
  if (voxel < 0 || voxel >= voxel_count()) {
    throw NotAVoxel("voxel index " + std::to_string(voxel) + " out of range");
  }
  if (config_.model != NeuralModel::kMlp) {
    throw Error("message values only exist for the mlp model");
  }
  return value_in_[voxel];
}

std::span<const SpikeTrain> NcaController::incoming_trains(int voxel) const {
  if (voxel < 0 || voxel >= voxel_count()) {
    throw NotAVoxel("voxel index " + std::to_string(voxel) + " out of range");
  }
  if (config_.model == NeuralModel::kMlp) {
    throw Error("spike trains only exist for the spiking models");
  }
  return train_in_[voxel];
}

NcaController build_controller(const MorphologyGrid& grid,
                               const NcaConfig& config,
                               std::span<const double> genotype) {
  return NcaController(grid, config, genotype);
}

}  // namespace vsr
