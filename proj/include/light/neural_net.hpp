#pragma once

// Dense feed-forward binary classifier with a LIGHT output unit.
//
//   h_0 = x,  h_l = act(Theta_l^T h_{l-1} + b_l)   (l = 1..L, width d)
//   t = Theta_out^T h_L + b_out,  prob = l(t)
//
// Trained on the mean binary cross-entropy of prob against (y + 1)/2 with
// prob clamped to [1e-7, 1 - 1e-7]; the clamp passes no gradient.
//
// Optimizer updates, per parameter array, with g the mean-loss gradient and
// t the 1-based step count:
//   sgd      theta -= lr * g
//   adagrad  acc += g^2;  theta -= lr * g / (sqrt(acc) + eps)
//   adam     m = b1 m + (1 - b1) g;  v = b2 v + (1 - b2) g^2
//            theta -= lr * (m / (1 - b1^t)) / (sqrt(v / (1 - b2^t)) + eps)

#include <Eigen/Dense>

#include <algorithm>
#include <cmath>
#include <cstdint>
#include <numeric>
#include <random>
#include <string>
#include <string_view>
#include <vector>

#include "light/datasets.hpp"
#include "light/errors.hpp"
#include "light/light_activation.hpp"

namespace light {

enum class HiddenActivation { Linear, Relu };

struct NetworkSpec {
  std::size_t input_dim = 2;
  int L = 1;                 ///< hidden layers, 0..3
  std::size_t width = 100;   ///< hidden width d
  HiddenActivation hidden = HiddenActivation::Linear;
  GrowthModel model = GrowthModel::Verhulst;
  NeuronConfiguration output;    ///< Default tag gives the plain sigmoid
  bool use_bias = true;
  std::uint64_t init_seed = 0;

  void validate() const {
    if (L < 0 || L > 3) throw ValidationError("network: L must be in {0, 1, 2, 3}");
    if (input_dim == 0) throw ValidationError("network: input dimension must be positive");
    if (L > 0 && width == 0) throw ValidationError("network: hidden width must be positive");
    output.params.validate();
  }
};

enum class OptimizerKind { Sgd, Adam, Adagrad };

inline std::string_view to_string(OptimizerKind k) {
  switch (k) {
    case OptimizerKind::Sgd: return "sgd";
    case OptimizerKind::Adam: return "adam";
    case OptimizerKind::Adagrad: return "adagrad";
  }
  return "unknown";
}

inline std::optional<OptimizerKind> parse_optimizer(std::string_view s) {
  if (s == "sgd") return OptimizerKind::Sgd;
  if (s == "adam") return OptimizerKind::Adam;
  if (s == "adagrad") return OptimizerKind::Adagrad;
  return std::nullopt;
}

struct OptimizerSpec {
  OptimizerKind kind = OptimizerKind::Sgd;
  double learning_rate = 0.01;
  double beta1 = 0.9;
  double beta2 = 0.999;
  double epsilon = 1e-7;

  /// sgd 0.01, adam 0.001 (0.9, 0.999), adagrad 0.001; epsilon 1e-7.
  static OptimizerSpec defaults(OptimizerKind k) {
    OptimizerSpec o;
    o.kind = k;
    o.learning_rate = k == OptimizerKind::Sgd ? 0.01 : 0.001;
    return o;
  }

  void validate() const {
    if (!(learning_rate > 0.0)) throw ValidationError("optimizer: learning rate must be > 0");
    if (!(beta1 >= 0.0 && beta1 < 1.0) || !(beta2 >= 0.0 && beta2 < 1.0)) {
      throw ValidationError("optimizer: betas must lie in [0, 1)");
    }
    if (!(epsilon > 0.0)) throw ValidationError("optimizer: epsilon must be > 0");
  }
};

struct TrainConfig {
  std::size_t batch_size = 75;
  int epochs = 1500;
  std::uint64_t shuffle_seed = 0;

  void validate() const {
    if (batch_size < 1) throw ValidationError("train: batch size must be >= 1");
    if (epochs < 1) throw ValidationError("train: epochs must be >= 1");
  }
};

inline constexpr double kProbClamp = 1e-7;

struct Layer {
  Eigen::MatrixXd W;  ///< d_in x d_out
  Eigen::VectorXd b;  ///< d_out
};

struct Gradients {
  std::vector<Layer> layers;
};

struct OptimizerSlots {
  std::vector<Layer> m;    ///< adam first moment
  std::vector<Layer> v;    ///< adam second moment / adagrad accumulator
  long long step = 0;
};

/// Weights, biases and optimizer state of one network. Layers 0..L-1 are
/// hidden, layer L is the output unit.
class Network {
 public:
  explicit Network(NetworkSpec spec) : spec_(std::move(spec)) {
    spec_.validate();
    std::mt19937_64 rng(spec_.init_seed);
    std::size_t in = spec_.input_dim;
    for (int l = 0; l <= spec_.L; ++l) {
      const std::size_t out = l == spec_.L ? 1 : spec_.width;
      // Glorot uniform
      const double lim = std::sqrt(6.0 / static_cast<double>(in + out));
      std::uniform_real_distribution<double> u(-lim, lim);
      Layer layer;
      layer.W.resize(static_cast<Eigen::Index>(in), static_cast<Eigen::Index>(out));
      for (Eigen::Index j = 0; j < layer.W.cols(); ++j) {
        for (Eigen::Index i = 0; i < layer.W.rows(); ++i) layer.W(i, j) = u(rng);
      }
      layer.b = Eigen::VectorXd::Zero(static_cast<Eigen::Index>(out));
      layers_.push_back(std::move(layer));
      in = out;
    }
    threshold_ = decision_threshold(spec_.model, spec_.output.params);
  }

  const NetworkSpec& spec() const { return spec_; }
  std::vector<Layer>& layers() { return layers_; }
  const std::vector<Layer>& layers() const { return layers_; }
  OptimizerSlots& slots() { return slots_; }

  /// Probability level separating the two classes.
  double threshold() const { return threshold_; }

  /// Logits for a batch (one row per sample).
  Eigen::VectorXd logits(const Eigen::MatrixXd& X) const {
    std::vector<Eigen::MatrixXd> acts;
    return forward_pass(X, acts);
  }

  /// (logit, prob) for one feature vector.
  std::pair<double, double> forward(const Eigen::VectorXd& x) const {
    if (static_cast<std::size_t>(x.size()) != spec_.input_dim) {
      throw ValidationError("forward: expected " + std::to_string(spec_.input_dim) + " features, got " +
                            std::to_string(x.size()));
    }
    const double t = logits(x.transpose())(0);
    return {t, activate(t)};
  }

  double activate(double t) const { return light_forward(t, spec_.model, spec_.output.params); }
  double activate_slope(double t) const { return light_derivative(t, spec_.model, spec_.output.params); }

  Eigen::VectorXd probabilities(const Eigen::MatrixXd& X) const {
    Eigen::VectorXd t = logits(X);
    for (Eigen::Index i = 0; i < t.size(); ++i) t(i) = activate(t(i));
    return t;
  }

  /// Mean BCE over the batch.
  double loss(const Eigen::MatrixXd& X, const std::vector<int>& y) const {
    const Eigen::VectorXd p = probabilities(X);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < p.size(); ++i) sum += bce(p(i), y[static_cast<std::size_t>(i)]);
    return sum / static_cast<double>(p.size());
  }

  /// Gradient of the mean BCE with respect to every weight and bias. Also
  /// returns the batch loss through `loss_out` when given.
  Gradients backward(const Eigen::MatrixXd& X, const std::vector<int>& y, double* loss_out = nullptr) const {
    if (X.rows() == 0) throw ValidationError("backward: empty batch");
    if (static_cast<std::size_t>(X.rows()) != y.size()) throw ValidationError("backward: label count mismatch");
    std::vector<Eigen::MatrixXd> acts;
    const Eigen::VectorXd t = forward_pass(X, acts);
    const auto B = static_cast<double>(X.rows());
    Eigen::MatrixXd delta(t.size(), 1);
    double sum = 0.0;
    for (Eigen::Index i = 0; i < t.size(); ++i) {
      const int yi = y[static_cast<std::size_t>(i)];
      if (yi != -1 && yi != 1) throw ValidationError("backward: labels must be -1 or +1");
      const double target = (yi + 1) / 2.0;
      const double p = activate(t(i));
      sum += bce(p, yi);
      double dp = 0.0;
      if (p > kProbClamp && p < 1.0 - kProbClamp) dp = (-target / p + (1.0 - target) / (1.0 - p)) / B;
      delta(i, 0) = dp == 0.0 ? 0.0 : dp * activate_slope(t(i));
    }
    if (loss_out) *loss_out = sum / B;

    Gradients g;
    g.layers.resize(layers_.size());
    for (int l = spec_.L; l >= 0; --l) {
      const auto& in = acts[static_cast<std::size_t>(l)];
      auto& gl = g.layers[static_cast<std::size_t>(l)];
      gl.W = in.transpose() * delta;
      gl.b = spec_.use_bias ? Eigen::VectorXd(delta.colwise().sum().transpose())
                            : Eigen::VectorXd::Zero(delta.cols());
      if (!gl.W.allFinite() || !gl.b.allFinite()) {
        throw TrainingError("non-finite gradient in layer " + std::to_string(l), -1, -1, l);
      }
      if (l > 0) {
        delta = delta * layers_[static_cast<std::size_t>(l)].W.transpose();
        if (spec_.hidden == HiddenActivation::Relu) delta = delta.cwiseProduct(relu_mask(in));
      }
    }
    return g;
  }

  /// Applies one optimizer update. Slots are created on the first call.
  void apply(const Gradients& g, const OptimizerSpec& opt) {
    if (slots_.m.empty()) {
      for (const auto& l : layers_) {
        slots_.m.push_back({Eigen::MatrixXd::Zero(l.W.rows(), l.W.cols()), Eigen::VectorXd::Zero(l.b.size())});
      }
      slots_.v = slots_.m;
    }
    ++slots_.step;
    const auto t = static_cast<double>(slots_.step);
    for (std::size_t l = 0; l < layers_.size(); ++l) {
      step_array(layers_[l].W, g.layers[l].W, slots_.m[l].W, slots_.v[l].W, opt, t);
      if (spec_.use_bias) step_array(layers_[l].b, g.layers[l].b, slots_.m[l].b, slots_.v[l].b, opt, t);
      if (!layers_[l].W.allFinite() || !layers_[l].b.allFinite()) {
        throw TrainingError("non-finite parameter in layer " + std::to_string(l), -1, -1, static_cast<int>(l));
      }
    }
  }

  /// One optimizer step on a batch; returns the batch loss before the update.
  double train_step(const Eigen::MatrixXd& X, const std::vector<int>& y, const OptimizerSpec& opt) {
    double l = 0.0;
    const auto g = backward(X, y, &l);
    apply(g, opt);
    return l;
  }

  /// Fraction of rows with prob > threshold predicted +1 correctly, and so on.
  double accuracy(const Eigen::MatrixXd& X, const std::vector<int>& y) const {
    if (X.rows() == 0) return 0.0;
    const Eigen::VectorXd p = probabilities(X);
    std::size_t hits = 0;
    for (Eigen::Index i = 0; i < p.size(); ++i) {
      const int pred = p(i) > threshold_ ? 1 : -1;
      hits += pred == y[static_cast<std::size_t>(i)];
    }
    return static_cast<double>(hits) / static_cast<double>(p.size());
  }

  static double bce(double p, int y) {
    const double q = std::clamp(p, kProbClamp, 1.0 - kProbClamp);
    return y == 1 ? -std::log(q) : -std::log(1.0 - q);
  }

 private:
  Eigen::VectorXd forward_pass(const Eigen::MatrixXd& X, std::vector<Eigen::MatrixXd>& acts) const {
    if (static_cast<std::size_t>(X.cols()) != spec_.input_dim) {
      throw ValidationError("forward: expected " + std::to_string(spec_.input_dim) + " features, got " +
                            std::to_string(X.cols()));
    }
    acts.clear();
    acts.push_back(X);
    for (int l = 0; l <= spec_.L; ++l) {
      const auto& layer = layers_[static_cast<std::size_t>(l)];
      Eigen::MatrixXd z = acts.back() * layer.W;
      z.rowwise() += layer.b.transpose();
      if (l < spec_.L && spec_.hidden == HiddenActivation::Relu) z = z.cwiseMax(0.0);
      if (!z.allFinite()) throw TrainingError("non-finite activation in layer " + std::to_string(l), -1, -1, l);
      if (l < spec_.L) {
        acts.push_back(std::move(z));
      } else {
        return z.col(0);
      }
    }
    return {};
  }

  // 1 where the post-activation value is positive (ReLU passes gradient).
  static Eigen::MatrixXd relu_mask(const Eigen::MatrixXd& a) {
    return (a.array() > 0.0).cast<double>().matrix();
  }

  template <class A>
  static void step_array(A& theta, const A& g, A& m, A& v, const OptimizerSpec& opt, double t) {
    switch (opt.kind) {
      case OptimizerKind::Sgd:
        theta -= opt.learning_rate * g;
        break;
      case OptimizerKind::Adagrad:
        v.array() += g.array().square();
        theta.array() -= opt.learning_rate * g.array() / (v.array().sqrt() + opt.epsilon);
        break;
      case OptimizerKind::Adam: {
        m = opt.beta1 * m + (1.0 - opt.beta1) * g;
        v.array() = opt.beta2 * v.array() + (1.0 - opt.beta2) * g.array().square();
        const double c1 = 1.0 - std::pow(opt.beta1, t);
        const double c2 = 1.0 - std::pow(opt.beta2, t);
        theta.array() -= opt.learning_rate * (m.array() / c1) / ((v.array() / c2).sqrt() + opt.epsilon);
        break;
      }
    }
  }

  NetworkSpec spec_;
  std::vector<Layer> layers_;
  OptimizerSlots slots_;
  double threshold_ = 0.5;
};

struct EpochRecord {
  int epoch;
  double train_acc;
  double test_acc;
  double train_loss;  ///< mean over the epoch's batches, weighted by batch size
};

using AccuracyCurve = std::vector<EpochRecord>;

/// Number of batches per epoch.
inline std::size_t batches_per_epoch(std::size_t m_train, std::size_t batch_size) {
  return (m_train + batch_size - 1) / batch_size;
}

/// Trains `net` in place. Each epoch reshuffles the training rows with a
/// generator seeded once from cfg.shuffle_seed, then walks them in batches;
/// accuracies are measured after the epoch.
inline AccuracyCurve train(Network& net, const Dataset& data, const OptimizerSpec& opt, const TrainConfig& cfg) {
  opt.validate();
  cfg.validate();
  if (data.split.train.empty()) throw ValidationError("train: empty training split");
  const auto [Xtr, ytr] = data.rows(data.split.train);
  const auto [Xte, yte] = data.rows(data.split.test);
  const std::size_t m = data.split.train.size();
  std::vector<std::size_t> order(m);
  std::iota(order.begin(), order.end(), std::size_t{0});
  std::mt19937_64 rng(cfg.shuffle_seed);
  AccuracyCurve curve;
  curve.reserve(static_cast<std::size_t>(cfg.epochs));
  Eigen::MatrixXd Xb;
  std::vector<int> yb;
  for (int epoch = 1; epoch <= cfg.epochs; ++epoch) {
    std::shuffle(order.begin(), order.end(), rng);
    double loss_sum = 0.0;
    int step = 0;
    for (std::size_t start = 0; start < m; start += cfg.batch_size, ++step) {
      const std::size_t len = std::min(cfg.batch_size, m - start);
      Xb.resize(static_cast<Eigen::Index>(len), Xtr.cols());
      yb.resize(len);
      for (std::size_t i = 0; i < len; ++i) {
        Xb.row(static_cast<Eigen::Index>(i)) = Xtr.row(static_cast<Eigen::Index>(order[start + i]));
        yb[i] = ytr[order[start + i]];
      }
      try {
        loss_sum += net.train_step(Xb, yb, opt) * static_cast<double>(len);
      } catch (const TrainingError& e) {
        throw TrainingError(std::string(e.what()) + " (epoch " + std::to_string(epoch) + ", step " +
                                std::to_string(step) + ")",
                            epoch, step, e.layer());
      }
    }
    curve.push_back({epoch, net.accuracy(Xtr, ytr), net.accuracy(Xte, yte), loss_sum / static_cast<double>(m)});
  }
  return curve;
}

/// First epoch whose test accuracy reaches `fraction` of the final test
/// accuracy (the final epoch when nothing earlier does).
inline int epochs_to_fraction_of_final(const AccuracyCurve& c, double fraction = 0.95) {
  if (c.empty()) return 0;
  const double target = fraction * c.back().test_acc;
  for (const auto& r : c) {
    if (r.test_acc >= target) return r.epoch;
  }
  return c.back().epoch;
}

}  // namespace light
