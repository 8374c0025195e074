#pragma once

#include <algorithm>
#include <cstdint>
#include <span>
#include <vector>

namespace vsr {

// SNN steps per control step. The neural clock runs at exactly 16x the
// robot control clock (60 Hz -> 960 Hz).
inline constexpr int kSnnStepsPerControl = 16;

enum class NeuralModel { kMlp, kLif, kLifHomeostasis };

// One hidden layer, sized like the input layer.
struct NetworkShape {
  int inputs = 0;
  int hidden = 0;
  int outputs = 0;
  NeuralModel model = NeuralModel::kMlp;
};

// Number of free parameters. MLPs carry biases, LIF networks do not.
int param_count(const NetworkShape& shape);

// LIF neuron constants. Defaults are the working parameter set used for all
// spiking experiments.
struct LifParameters {
  double rest_potential = 0.0;    // mV, v after a spike
  double potential_decay = 0.01;  // 1/s, leak rate of v
  double threshold_init = 1.0;    // mV
  double offset_init = 0.0;       // mV, homeostatic offset start value
  double offset_gain = 0.2;       // mV added to the offset per emitted spike
  double offset_decay = 0.01;     // 1/s, offset leak when silent
  double dt = 1.0 / 960.0;        // s, neural simulation resolution
};

struct LifNeuronState {
  double potential = 0.0;
  double threshold = 1.0;
  double offset = 0.0;
  bool spiked_last = false;
};

// Advance one neuron by one neural step.
//   drive_sum:  sum over incoming synapses of weight * input_spike
//   weight_sum: static sum of all incoming weights (homeostasis clamp)
// Returns true if the neuron fired; on firing the potential resets to rest.
// With homeostasis the offset is updated first (from last step's spike),
// then the threshold, then the spike test.
bool lif_neuron_step(LifNeuronState& state, double drive_sum,
                     double weight_sum, const LifParameters& params,
                     bool homeostasis);

// One control step's worth of spikes, bit i = spike at neural step i.
struct SpikeTrain {
  std::uint16_t bits = 0;

  bool get(int i) const { return (bits >> i) & 1u; }
  void set(int i) { bits = static_cast<std::uint16_t>(bits | (1u << i)); }
  int count() const { return __builtin_popcount(bits); }
  bool operator==(const SpikeTrain&) const = default;
};

// Rate-coding constants shared by encoder and decoder.
struct RateCoding {
  double min_hz = 5.0;     // spike frequency at input 0
  double max_hz = 50.0;    // spike frequency at input 1
  double control_hz = 60.0;
  int window_steps = 5;    // control steps of output history when decoding

  double neural_hz() const { return control_hz * kSnnStepsPerControl; }
};

// Encoder memory: neural step of the most recent emitted spike.
struct RateEncoderState {
  long long last_spike_step = 0;
};

struct EncodeResult {
  SpikeTrain train;
  bool input_clamped = false;
};

// Map a scalar in [0,1] to the spike train for control step k. The scalar
// scales linearly to a frequency in [min_hz, max_hz]; spikes are emitted
// every floor(neural_hz / frequency) neural steps counted from the last
// spike. Out-of-range scalars are clamped and flagged.
EncodeResult encode_scalar(double value, RateEncoderState& enc,
                           long long control_step, const RateCoding& coding);

// Decoder memory: ring of per-control-step spike counts.
class RateDecoderState {
public:
  explicit RateDecoderState(int window_steps = 5)
      : counts_(static_cast<std::size_t>(window_steps), 0) {}

  void push(int count) {
    counts_[cursor_] = count;
    cursor_ = (cursor_ + 1) % counts_.size();
  }
  int sum() const {
    int s = 0;
    for (int c : counts_) s += c;
    return s;
  }
  void reset() {
    std::fill(counts_.begin(), counts_.end(), 0);
    cursor_ = 0;
  }

private:
  std::vector<int> counts_;
  std::size_t cursor_ = 0;
};

// Windowed spike count -> actuation in [-1, 1]. The count over the last
// window_steps control steps gives an observed frequency count*control_hz/
// window_steps, scaled against max_hz and mapped to [-1, 1] with clamping.
double decode_spikes(const RateDecoderState& dec, const RateCoding& coding);

// Views into a flat parameter vector. Weight matrices are stored row-major
// with one row per downstream neuron: w[j*n_in + i] connects input i to
// neuron j. MLP layouts append bias vectors after each matrix.
struct WeightSet {
  std::span<const double> input_to_hidden;   // hidden x inputs
  std::span<const double> hidden_bias;       // MLP only, else empty
  std::span<const double> hidden_to_output;  // outputs x hidden
  std::span<const double> output_bias;       // MLP only, else empty
};

// Slice a parameter block into a WeightSet. params.size() must equal
// param_count(shape).
WeightSet slice_weights(const NetworkShape& shape,
                        std::span<const double> params);

// y = tanh(W2 * tanh(W1 * x + b1) + b2). scratch must hold shape.hidden
// values; out must hold shape.outputs.
void mlp_forward(const NetworkShape& shape, const WeightSet& weights,
                 std::span<const double> x, std::span<double> scratch,
                 std::span<double> out);

// Convenience allocating overload.
std::vector<double> mlp_forward(const NetworkShape& shape,
                                const WeightSet& weights,
                                std::span<const double> x);

// Two-layer feed-forward LIF network. Hidden spikes computed at neural step
// h feed the output layer at the same h; there is no extra per-layer delay.
class LifNetwork {
public:
  LifNetwork(const NetworkShape& shape, const WeightSet& weights,
             const LifParameters& params);

  // One neural step. input_spikes.size() == shape.inputs; out_spikes.size()
  // == shape.outputs (filled with this step's output spikes).
  void step(std::span<const bool> input_spikes, std::span<bool> out_spikes);

  void reset();

  const std::vector<LifNeuronState>& hidden_states() const { return hidden_; }
  const std::vector<LifNeuronState>& output_states() const { return output_; }

private:
  NetworkShape shape_;
  WeightSet weights_;
  LifParameters params_;
  bool homeostasis_ = false;
  std::vector<LifNeuronState> hidden_;
  std::vector<LifNeuronState> output_;
  std::vector<double> hidden_weight_sum_;  // per hidden neuron
  std::vector<double> output_weight_sum_;  // per output neuron
  std::vector<bool> hidden_spikes_;        // scratch
};

}  // namespace vsr
