#include "nrpursuit/learning.hpp"

#include <cmath>
#include <iomanip>
#include <istream>
#include <ostream>
#include <random>
#include <sstream>

namespace nrpursuit {

namespace {

constexpr const char* kSnapshotHeader = "nrpursuit-mlp 1";

void check_sizes(const std::vector<int>& sizes) {
  if (sizes.size() < 2) throw ConfigError("learning.layer_sizes", "need input and output layers");
  for (int s : sizes) {
    if (s <= 0) throw ConfigError("learning.layer_sizes", "layer sizes must be positive");
  }
}

// Uniform double in [0, 1) built from the top 53 bits; independent of the
// standard library's distribution implementation.
double unit_uniform(std::mt19937_64& rng) {
  return static_cast<double>(rng() >> 11) * 0x1.0p-53;
}

struct ForwardPass {
  std::vector<Eigen::VectorXd> activations;  // activations[0] is the input
};

ForwardPass forward_pass(const MlpNetwork& net, const Eigen::VectorXd& x) {
  ForwardPass fp;
  fp.activations.reserve(net.weights.size() + 1);
  fp.activations.push_back(x);
  for (std::size_t l = 0; l < net.weights.size(); ++l) {
    const Eigen::MatrixXd& w = net.weights[l];
    const Eigen::Index n_in = w.cols() - 1;
    Eigen::VectorXd z = w.leftCols(n_in) * fp.activations.back() + w.col(n_in);
    if (l + 1 < net.weights.size()) z = z.array().tanh().matrix();
    fp.activations.push_back(std::move(z));
  }
  return fp;
}

}  // namespace

MlpNetwork MlpNetwork::zeros(std::vector<int> layer_sizes) {
  check_sizes(layer_sizes);
  MlpNetwork net;
  net.layer_sizes = std::move(layer_sizes);
  for (std::size_t l = 0; l + 1 < net.layer_sizes.size(); ++l) {
    net.weights.push_back(
        Eigen::MatrixXd::Zero(net.layer_sizes[l + 1], net.layer_sizes[l] + 1));
  }
  return net;
}

MlpNetwork MlpNetwork::random(std::vector<int> layer_sizes, std::uint64_t seed) {
  MlpNetwork net = zeros(std::move(layer_sizes));
  std::mt19937_64 rng(seed);
  for (auto& w : net.weights) {
    const double bound = 1.0 / std::sqrt(static_cast<double>(w.cols() - 1));
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        w(i, j) = bound * (2.0 * unit_uniform(rng) - 1.0);
      }
    }
  }
  return net;
}

std::size_t MlpNetwork::parameter_count() const {
  std::size_t n = 0;
  for (const auto& w : weights) n += static_cast<std::size_t>(w.size());
  return n;
}

Eigen::VectorXd MlpNetwork::flatten() const {
  Eigen::VectorXd p(parameter_count());
  Eigen::Index k = 0;
  for (const auto& w : weights) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) p[k++] = w(i, j);
    }
  }
  return p;
}

void MlpNetwork::unflatten(const Eigen::VectorXd& params) {
  if (static_cast<std::size_t>(params.size()) != parameter_count()) {
    throw ConfigError("weights", "parameter vector has the wrong length");
  }
  Eigen::Index k = 0;
  for (auto& w : weights) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) w(i, j) = params[k++];
    }
  }
}

bool MlpNetwork::all_finite() const {
  for (const auto& w : weights) {
    if (!w.allFinite()) return false;
  }
  return true;
}

Eigen::VectorXd mlp_forward(const MlpNetwork& net, const Eigen::VectorXd& chi) {
  if (static_cast<std::size_t>(chi.size()) != net.input_size()) {
    throw ConfigError("chi", "input has " + std::to_string(chi.size()) +
                                 " entries, network expects " +
                                 std::to_string(net.input_size()));
  }
  return forward_pass(net, chi).activations.back();
}

TrainingBuffer::TrainingBuffer(std::size_t capacity) : capacity_(capacity) {
  if (capacity == 0) throw ConfigError("learning.window", "buffer capacity must be positive");
}

bool TrainingBuffer::ingest(const Eigen::VectorXd& chi, const Vec2& velocity) {
  const double n = velocity.norm();
  if (!(n > 0.0) || !std::isfinite(n)) return false;
  samples_.push_back({chi, Eigen::Vector2d(velocity.x / n, velocity.y / n)});
  while (samples_.size() > capacity_) samples_.pop_front();
  return true;
}

void TrainingConfig::validate() const {
  if (hidden_layers.empty()) throw ConfigError("learning.hidden", "need at least one hidden layer");
  for (int h : hidden_layers) {
    if (h <= 0) throw ConfigError("learning.hidden", "layer widths must be positive");
  }
  if (!(eta > 0.0) || !std::isfinite(eta)) throw ConfigError("learning.eta", "must be > 0");
  if (epochs_per_update < 1) throw ConfigError("learning.epochs", "must be >= 1");
  if (!(window > 0.0)) throw ConfigError("learning.window", "must be > 0");
  if (!(retrain_interval > 0.0)) throw ConfigError("learning.retrain_interval", "must be > 0");
  if (!(sample_interval > 0.0)) throw ConfigError("learning.sample_interval", "must be > 0");
  if (!(input_scale > 0.0) || !std::isfinite(input_scale)) {
    throw ConfigError("learning.input_scale", "must be > 0");
  }
}

std::size_t TrainingConfig::buffer_capacity() const {
  const double n = std::round(window / sample_interval);
  return n < 1.0 ? 1 : static_cast<std::size_t>(n);
}

double windowed_loss(const MlpNetwork& net, const std::deque<TrainingSample>& samples) {
  if (samples.empty()) return 0.0;
  double sum = 0.0;
  for (const auto& s : samples) {
    const Eigen::VectorXd r = forward_pass(net, s.chi).activations.back() - s.target;
    sum += r.squaredNorm();
  }
  return sum / static_cast<double>(samples.size());
}

std::vector<Eigen::MatrixXd> loss_gradient(const MlpNetwork& net,
                                           const std::deque<TrainingSample>& samples) {
  std::vector<Eigen::MatrixXd> grad;
  grad.reserve(net.weights.size());
  for (const auto& w : net.weights) grad.push_back(Eigen::MatrixXd::Zero(w.rows(), w.cols()));
  if (samples.empty()) return grad;

  const double scale = 2.0 / static_cast<double>(samples.size());
  const std::size_t n_layers = net.weights.size();
  for (const auto& s : samples) {
    const ForwardPass fp = forward_pass(net, s.chi);
    Eigen::VectorXd delta = scale * (fp.activations.back() - s.target);
    for (std::size_t l = n_layers; l-- > 0;) {
      const Eigen::VectorXd& a_in = fp.activations[l];
      const Eigen::Index n_in = a_in.size();
      grad[l].leftCols(n_in).noalias() += delta * a_in.transpose();
      grad[l].col(n_in) += delta;
      if (l > 0) {
        Eigen::VectorXd back = net.weights[l].leftCols(n_in).transpose() * delta;
        delta = back.array() * (1.0 - a_in.array().square());
      }
    }
  }
  return grad;
}

TrainResult backprop_update(MlpNetwork& net, const TrainingBuffer& buffer,
                            const TrainingConfig& cfg) {
  TrainResult result;
  if (buffer.empty()) {
    result.ok = false;
    result.error = "empty training buffer";
    return result;
  }
  const MlpNetwork original = net;
  const auto& samples = buffer.samples();
  double loss = windowed_loss(net, samples);

  auto fail = [&](const std::string& why) {
    net = original;
    result.ok = false;
    result.error = why;
    result.loss = windowed_loss(net, samples);
    return result;
  };
  if (!std::isfinite(loss)) return fail("non-finite loss before update");

  for (int epoch = 0; epoch < cfg.epochs_per_update; ++epoch) {
    const auto grad = loss_gradient(net, samples);
    double step = cfg.eta;
    bool accepted = false;
    for (int attempt = 0; attempt < 40; ++attempt) {
      MlpNetwork trial = net;
      for (std::size_t l = 0; l < trial.weights.size(); ++l) trial.weights[l] -= step * grad[l];
      const double trial_loss = windowed_loss(trial, samples);
      if (!std::isfinite(trial_loss)) {
        if (!cfg.backtrack) return fail("non-finite loss during update");
      } else if (!cfg.backtrack || trial_loss <= loss + 1e-12) {
        net = std::move(trial);
        loss = trial_loss;
        accepted = true;
        break;
      }
      step *= 0.5;
    }
    ++result.epochs_run;
    if (!accepted) break;  // no descent step found; already at a stationary point
  }
  result.loss = loss;
  return result;
}

double predict_evader_heading(const MlpNetwork& net, const Eigen::VectorXd& chi,
                              double previous) {
  const Eigen::VectorXd y = mlp_forward(net, chi);
  if (y.size() < 2 || std::hypot(y[0], y[1]) < 1e-8) return previous;
  return std::atan2(y[1], y[0]);
}

void save_weights(const MlpNetwork& net, std::ostream& out) {
  out << kSnapshotHeader << '\n';
  for (std::size_t i = 0; i < net.layer_sizes.size(); ++i) {
    out << (i ? " " : "") << net.layer_sizes[i];
  }
  out << '\n' << std::setprecision(17);
  for (const auto& w : net.weights) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      for (Eigen::Index j = 0; j < w.cols(); ++j) out << (j ? " " : "") << w(i, j);
      out << '\n';
    }
  }
}

MlpNetwork load_weights(std::istream& in) {
  std::string line;
  if (!std::getline(in, line) || line != kSnapshotHeader) {
    throw ConfigError("weights", "missing snapshot header", 1);
  }
  if (!std::getline(in, line)) throw ConfigError("weights", "missing layer sizes", 2);
  std::vector<int> sizes;
  {
    std::istringstream ls(line);
    int s;
    while (ls >> s) sizes.push_back(s);
  }
  MlpNetwork net = MlpNetwork::zeros(sizes);
  int line_no = 2;
  for (auto& w : net.weights) {
    for (Eigen::Index i = 0; i < w.rows(); ++i) {
      ++line_no;
      if (!std::getline(in, line)) throw ConfigError("weights", "truncated snapshot", line_no);
      std::istringstream ls(line);
      for (Eigen::Index j = 0; j < w.cols(); ++j) {
        if (!(ls >> w(i, j))) throw ConfigError("weights", "short weight row", line_no);
      }
    }
  }
  if (!net.all_finite()) throw ConfigError("weights", "non-finite weight in snapshot");
  return net;
}

}  // namespace nrpursuit
