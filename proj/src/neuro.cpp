#include "vsr/neuro.hpp"

#include <cmath>
#include <string>

#include "vsr/errors.hpp"

namespace vsr {

int param_count(const NetworkShape& shape) {
  if (shape.model == NeuralModel::kMlp) {
    return (shape.inputs + 1) * shape.hidden + (shape.hidden + 1) * shape.outputs;
  }
  return shape.inputs * shape.hidden + shape.hidden * shape.outputs;
}

bool lif_neuron_step(LifNeuronState& state, double drive_sum,
                     double weight_sum, const LifParameters& params,
                     bool homeostasis) {
  const double leak = params.dt * params.potential_decay * state.potential;
  double v = state.potential + drive_sum - leak;

  if (homeostasis) {
    // Offset reacts to the previous step's spike, then the threshold is
    // rebuilt from the incoming-weight clamp plus the fresh offset.
    const double psi =
        state.spiked_last
            ? state.offset + params.offset_gain
            : state.offset - state.offset * params.offset_decay * params.dt;
    state.offset = psi;
    state.threshold = std::min(state.threshold, weight_sum) + psi;
  }

  const bool spiked = v > state.threshold;  // strict: ties do not fire
  if (spiked) v = params.rest_potential;
  state.potential = v;
  state.spiked_last = spiked;
  return spiked;
}

EncodeResult encode_scalar(double value, RateEncoderState& enc,
                           long long control_step, const RateCoding& coding) {
  EncodeResult result;
  if (value < 0.0) {
    value = 0.0;
    result.input_clamped = true;
  } else if (value > 1.0) {
    value = 1.0;
    result.input_clamped = true;
  }
  const double freq = value * (coding.max_hz - coding.min_hz) + coding.min_hz;
  const long long period =
      static_cast<long long>(std::floor(coding.neural_hz() / freq));
  for (int i = 0; i < kSnnStepsPerControl; ++i) {
    const long long h = control_step * kSnnStepsPerControl + i;
    const long long since_last = h - enc.last_spike_step;
    if (since_last > 0 && since_last % period == 0) {
      result.train.set(i);
      enc.last_spike_step = h;
    }
  }
  return result;
}

double decode_spikes(const RateDecoderState& dec, const RateCoding& coding) {
  const double observed_hz =
      static_cast<double>(dec.sum()) * coding.control_hz / coding.window_steps;
  const double actuation = 2.0 * observed_hz / coding.max_hz - 1.0;
  return std::clamp(actuation, -1.0, 1.0);
}

WeightSet slice_weights(const NetworkShape& shape,
                        std::span<const double> params) {
  const std::size_t expected = static_cast<std::size_t>(param_count(shape));
  if (params.size() != expected) {
    throw GenotypeShapeError("parameter block has " +
                             std::to_string(params.size()) +
                             " values, network needs " +
                             std::to_string(expected));
  }
  WeightSet w;
  std::size_t pos = 0;
  const std::size_t n_ih = static_cast<std::size_t>(shape.hidden) * shape.inputs;
  const std::size_t n_ho =
      static_cast<std::size_t>(shape.outputs) * shape.hidden;
  w.input_to_hidden = params.subspan(pos, n_ih);
  pos += n_ih;
  if (shape.model == NeuralModel::kMlp) {
    w.hidden_bias = params.subspan(pos, shape.hidden);
    pos += shape.hidden;
  }
  w.hidden_to_output = params.subspan(pos, n_ho);
  pos += n_ho;
  if (shape.model == NeuralModel::kMlp) {
    w.output_bias = params.subspan(pos, shape.outputs);
    pos += shape.outputs;
  }
  return w;
}

void mlp_forward(const NetworkShape& shape, const WeightSet& weights,
                 std::span<const double> x, std::span<double> scratch,
                 std::span<double> out) {
  for (int j = 0; j < shape.hidden; ++j) {
    double acc = weights.hidden_bias[j];
    const double* row = &weights.input_to_hidden[static_cast<std::size_t>(j) *
                                                 shape.inputs];
    for (int i = 0; i < shape.inputs; ++i) acc += row[i] * x[i];
    scratch[j] = std::tanh(acc);
  }
  for (int o = 0; o < shape.outputs; ++o) {
    double acc = weights.output_bias[o];
    const double* row = &weights.hidden_to_output[static_cast<std::size_t>(o) *
                                                  shape.hidden];
    for (int j = 0; j < shape.hidden; ++j) acc += row[j] * scratch[j];
    out[o] = std::tanh(acc);
  }
}

std::vector<double> mlp_forward(const NetworkShape& shape,
                                const WeightSet& weights,
                                std::span<const double> x) {
  std::vector<double> scratch(static_cast<std::size_t>(shape.hidden));
  std::vector<double> out(static_cast<std::size_t>(shape.outputs));
  mlp_forward(shape, weights, x, scratch, out);
  return out;
}

LifNetwork::LifNetwork(const NetworkShape& shape, const WeightSet& weights,
                       const LifParameters& params)
    : shape_(shape),
      weights_(weights),
      params_(params),
      homeostasis_(shape.model == NeuralModel::kLifHomeostasis),
      hidden_spikes_(static_cast<std::size_t>(shape.hidden), false) {
  hidden_weight_sum_.resize(static_cast<std::size_t>(shape.hidden));
  for (int j = 0; j < shape.hidden; ++j) {
    double s = 0.0;
    const double* row = &weights_.input_to_hidden[static_cast<std::size_t>(j) *
                                                  shape.inputs];
    for (int i = 0; i < shape.inputs; ++i) s += row[i];
    hidden_weight_sum_[j] = s;
  }
  output_weight_sum_.resize(static_cast<std::size_t>(shape.outputs));
  for (int o = 0; o < shape.outputs; ++o) {
    double s = 0.0;
    const double* row =
        &weights_.hidden_to_output[static_cast<std::size_t>(o) * shape.hidden];
    for (int j = 0; j < shape.hidden; ++j) s += row[j];
    output_weight_sum_[o] = s;
  }
  reset();
}

void LifNetwork::reset() {
  LifNeuronState init;
  init.potential = params_.rest_potential;
  init.threshold = params_.threshold_init;
  init.offset = params_.offset_init;
  init.spiked_last = false;
  hidden_.assign(static_cast<std::size_t>(shape_.hidden), init);
  output_.assign(static_cast<std::size_t>(shape_.outputs), init);
}

void LifNetwork::step(std::span<const bool> input_spikes,
                      std::span<bool> out_spikes) {
  for (int j = 0; j < shape_.hidden; ++j) {
    double drive = 0.0;
    const double* row = &weights_.input_to_hidden[static_cast<std::size_t>(j) *
                                                  shape_.inputs];
    for (int i = 0; i < shape_.inputs; ++i) {
      if (input_spikes[i]) drive += row[i];
    }
    hidden_spikes_[j] = lif_neuron_step(hidden_[j], drive,
                                        hidden_weight_sum_[j], params_,
                                        homeostasis_);
  }
  for (int o = 0; o < shape_.outputs; ++o) {
    double drive = 0.0;
    const double* row =
        &weights_.hidden_to_output[static_cast<std::size_t>(o) * shape_.hidden];
    for (int j = 0; j < shape_.hidden; ++j) {
      if (hidden_spikes_[j]) drive += row[j];
    }
    out_spikes[o] = lif_neuron_step(output_[o], drive, output_weight_sum_[o],
                                    params_, homeostasis_);
  }
}

}  // namespace vsr
