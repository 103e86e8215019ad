#pragma once

// Multilayer perceptron that learns the evader's feedback policy online.
//
// Inputs are the stacked relative positions (evader - pursuer_i) of all
// pursuers, the output is a planar direction vector whose angle is the
// predicted evader heading. Hidden layers use tanh, the output layer is linear.

#include <cstdint>
#include <deque>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "nrpursuit/dynamics.hpp"

namespace nrpursuit {

struct MlpNetwork {
  std::vector<int> layer_sizes;          // input, hidden..., output
  std::vector<Eigen::MatrixXd> weights;  // [out x (in + 1)], last column is the bias

  /// All weights zero.
  static MlpNetwork zeros(std::vector<int> layer_sizes);
  /// Uniform in [-1/sqrt(fan_in), 1/sqrt(fan_in)] from a seeded generator.
  static MlpNetwork random(std::vector<int> layer_sizes, std::uint64_t seed);

  std::size_t input_size() const { return static_cast<std::size_t>(layer_sizes.front()); }
  std::size_t output_size() const { return static_cast<std::size_t>(layer_sizes.back()); }
  std::size_t parameter_count() const;

  Eigen::VectorXd flatten() const;
  void unflatten(const Eigen::VectorXd& params);
  bool all_finite() const;
};

Eigen::VectorXd mlp_forward(const MlpNetwork& net, const Eigen::VectorXd& chi);

struct TrainingSample {
  Eigen::VectorXd chi;
  Eigen::Vector2d target;  // unit direction
};

/// Fixed-capacity FIFO of observations.
class TrainingBuffer {
 public:
  explicit TrainingBuffer(std::size_t capacity);

  /// Appends (chi, velocity / |velocity|). A zero velocity is skipped and the
  /// call returns false.
  bool ingest(const Eigen::VectorXd& chi, const Vec2& velocity);

  std::size_t size() const { return samples_.size(); }
  std::size_t capacity() const { return capacity_; }
  bool empty() const { return samples_.empty(); }
  const std::deque<TrainingSample>& samples() const { return samples_; }

 private:
  std::size_t capacity_;
  std::deque<TrainingSample> samples_;
};

struct TrainingConfig {
  std::vector<int> hidden_layers{16, 16, 16};
  double eta = 0.01;
  int epochs_per_update = 50;
  double window = 5.0;            // T_l, s
  double retrain_interval = 0.5;  // s
  double sample_interval = 0.05;  // s
  double input_scale = 0.1;       // applied to relative positions before the network
  bool backtrack = true;          // halve the step when a trial raises the loss

  void validate() const;
  std::size_t buffer_capacity() const;
};

struct TrainResult {
  bool ok = true;
  double loss = 0.0;  // windowed loss after the update
  int epochs_run = 0;
  std::string error;
};

/// Mean over the window of r^T r, with r = prediction - target.
double windowed_loss(const MlpNetwork& net, const std::deque<TrainingSample>& samples);

/// Analytic gradient of windowed_loss, one matrix per layer.
std::vector<Eigen::MatrixXd> loss_gradient(const MlpNetwork& net,
                                           const std::deque<TrainingSample>& samples);

/// Full-window gradient descent for cfg.epochs_per_update epochs. On a
/// non-finite loss the weights are restored and ok = false.
TrainResult backprop_update(MlpNetwork& net, const TrainingBuffer& buffer,
                            const TrainingConfig& cfg);

/// atan2 of the network output, or `previous` when the output is ~0.
double predict_evader_heading(const MlpNetwork& net, const Eigen::VectorXd& chi,
                              double previous);

/// Text snapshot: header line, layer sizes line, then each weight matrix
/// row-major, one row per line.
void save_weights(const MlpNetwork& net, std::ostream& out);
MlpNetwork load_weights(std::istream& in);

}  // namespace nrpursuit
