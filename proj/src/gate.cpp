#include "knnmt/gate.hpp"

#include <algorithm>
#include <cmath>
#include <random>

#include "knnmt/io_util.hpp"

namespace knnmt {

namespace {

constexpr char kMagic[] = "KNNGT1";
constexpr double kLambdaFloor = 1e-12;

double clamped_sigmoid(double z) {
  const double s = 1.0 / (1.0 + std::exp(-z));
  return std::min(1.0 - kLambdaFloor, std::max(kLambdaFloor, s));
}

}  // namespace

double AdaptiveGate::predict_lambda(std::span<const float> features) const {
  if (features.size() != feature_dim) {
    throw Error("gate: feature dim " + std::to_string(features.size()) +
                " does not match gate feature dim " + std::to_string(feature_dim));
  }
  double z = b2;
  for (std::uint32_t h = 0; h < hidden; ++h) {
    double pre = b1[h];
    const float* row = w1.data() + static_cast<std::size_t>(h) * feature_dim;
    for (std::uint32_t j = 0; j < feature_dim; ++j) pre += static_cast<double>(row[j]) * features[j];
    if (pre > 0.0) z += static_cast<double>(w2[h]) * pre;
  }
  return clamped_sigmoid(z);
}

void save_gate(const AdaptiveGate& gate, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  io::write_bytes(out, kMagic, 6);
  io::write_u32(out, gate.feature_dim);
  io::write_u32(out, gate.hidden);
  io::write_f32_array(out, gate.w1.data(), gate.w1.size());
  io::write_f32_array(out, gate.b1.data(), gate.b1.size());
  io::write_f32_array(out, gate.w2.data(), gate.w2.size());
  io::write_f32_array(out, &gate.b2, 1);
  io::write_f32_array(out, &gate.alpha, 1);
}

AdaptiveGate load_gate(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  io::expect_magic(in, kMagic, "gate weights");
  AdaptiveGate gate;
  gate.feature_dim = io::read_u32(in, "feature_dim");
  gate.hidden = io::read_u32(in, "hidden");
  if (gate.feature_dim == 0 || gate.hidden == 0) {
    throw IoError(IoError::Kind::BadHeader, "gate header: zero feature_dim or hidden");
  }
  gate.w1.resize(static_cast<std::size_t>(gate.feature_dim) * gate.hidden);
  gate.b1.resize(gate.hidden);
  gate.w2.resize(gate.hidden);
  io::read_bytes(in, gate.w1.data(), gate.w1.size() * sizeof(float), "w1");
  io::read_bytes(in, gate.b1.data(), gate.b1.size() * sizeof(float), "b1");
  io::read_bytes(in, gate.w2.data(), gate.w2.size() * sizeof(float), "w2");
  io::read_bytes(in, &gate.b2, sizeof(float), "b2");
  io::read_bytes(in, &gate.alpha, sizeof(float), "alpha");
  return gate;
}

GateTrainer::GateTrainer(std::size_t feature_dim, std::size_t hidden, std::uint64_t seed)
    : feature_dim_(feature_dim), hidden_(hidden) {
  if (feature_dim == 0 || hidden == 0) throw Error("gate trainer: zero layer width");
  params_.assign(hidden * feature_dim + hidden + hidden + 1, 0.0);
  std::mt19937_64 rng(splitmix64(seed));
  const double s1 = std::sqrt(6.0 / static_cast<double>(feature_dim + hidden));
  const double s2 = std::sqrt(6.0 / static_cast<double>(hidden + 1));
  std::uniform_real_distribution<double> u(-1.0, 1.0);
  for (std::size_t i = 0; i < hidden * feature_dim; ++i) params_[i] = s1 * u(rng);
  for (std::size_t i = 0; i < hidden; ++i) {
    params_[hidden * feature_dim + hidden + i] = s2 * u(rng);
  }
}

double GateTrainer::predict_lambda(std::span<const float> features) const {
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * feature_dim_;
  const double* w2 = b1 + hidden_;
  const double b2 = w2[hidden_];
  double z = b2;
  for (std::size_t h = 0; h < hidden_; ++h) {
    double pre = b1[h];
    const double* row = w1 + h * feature_dim_;
    for (std::size_t j = 0; j < feature_dim_; ++j) pre += row[j] * features[j];
    if (pre > 0.0) z += w2[h] * pre;
  }
  return clamped_sigmoid(z);
}

double GateTrainer::objective(const std::vector<GateTrainSample>& samples) const {
  if (samples.empty()) throw Error("gate trainer: no samples");
  double total = 0.0;
  for (const GateTrainSample& s : samples) {
    const double lam = predict_lambda(s.features);
    const double mix = (1.0 - lam) * s.p_model_gold + lam * s.p_knn_gold;
    total += std::log(std::max(mix, 1e-300));
  }
  return total / static_cast<double>(samples.size());
}

std::vector<double> GateTrainer::gradient(const std::vector<GateTrainSample>& samples) const {
  if (samples.empty()) throw Error("gate trainer: no samples");
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * feature_dim_;
  const double* w2 = b1 + hidden_;
  const double b2 = w2[hidden_];

  std::vector<double> grad(params_.size(), 0.0);
  double* g_w1 = grad.data();
  double* g_b1 = g_w1 + hidden_ * feature_dim_;
  double* g_w2 = g_b1 + hidden_;
  double* g_b2 = g_w2 + hidden_;

  std::vector<double> pre(hidden_);
  for (const GateTrainSample& s : samples) {
    double z = b2;
    for (std::size_t h = 0; h < hidden_; ++h) {
      double p = b1[h];
      const double* row = w1 + h * feature_dim_;
      for (std::size_t j = 0; j < feature_dim_; ++j) p += row[j] * s.features[j];
      pre[h] = p;
      if (p > 0.0) z += w2[h] * p;
    }
    const double lam = clamped_sigmoid(z);
    const double mix = std::max((1.0 - lam) * s.p_model_gold + lam * s.p_knn_gold, 1e-300);
    const double dz = (s.p_knn_gold - s.p_model_gold) / mix * lam * (1.0 - lam);

    *g_b2 += dz;
    for (std::size_t h = 0; h < hidden_; ++h) {
      if (pre[h] <= 0.0) continue;
      g_w2[h] += dz * pre[h];
      const double dpre = dz * w2[h];
      g_b1[h] += dpre;
      double* row = g_w1 + h * feature_dim_;
      for (std::size_t j = 0; j < feature_dim_; ++j) row[j] += dpre * s.features[j];
    }
  }
  const double inv = 1.0 / static_cast<double>(samples.size());
  for (double& g : grad) g *= inv;
  return grad;
}

void GateTrainer::fit(const std::vector<GateTrainSample>& samples, std::size_t epochs,
                      double learning_rate) {
  // Full-batch Adam ascent on the mean log-likelihood.
  std::vector<double> m(params_.size(), 0.0), v(params_.size(), 0.0);
  const double beta1 = 0.9, beta2 = 0.999, eps = 1e-8;
  for (std::size_t t = 1; t <= epochs; ++t) {
    const std::vector<double> grad = gradient(samples);
    const double bc1 = 1.0 - std::pow(beta1, static_cast<double>(t));
    const double bc2 = 1.0 - std::pow(beta2, static_cast<double>(t));
    for (std::size_t i = 0; i < params_.size(); ++i) {
      m[i] = beta1 * m[i] + (1.0 - beta1) * grad[i];
      v[i] = beta2 * v[i] + (1.0 - beta2) * grad[i] * grad[i];
      params_[i] += learning_rate * (m[i] / bc1) / (std::sqrt(v[i] / bc2) + eps);
    }
  }
}

AdaptiveGate GateTrainer::export_gate(float alpha) const {
  AdaptiveGate gate;
  gate.feature_dim = static_cast<std::uint32_t>(feature_dim_);
  gate.hidden = static_cast<std::uint32_t>(hidden_);
  gate.alpha = alpha;
  const double* w1 = params_.data();
  const double* b1 = w1 + hidden_ * feature_dim_;
  const double* w2 = b1 + hidden_;
  gate.w1.assign(w1, w1 + hidden_ * feature_dim_);
  gate.b1.assign(b1, b1 + hidden_);
  gate.w2.assign(w2, w2 + hidden_);
  gate.b2 = static_cast<float>(w2[hidden_]);
  return gate;
}

AdaptiveGate train_gate_on_samples(const std::vector<GateTrainSample>& samples,
                                   const GateTrainConfig& cfg, float alpha) {
  if (samples.empty()) throw Error("train_gate: no training samples");
  GateTrainer trainer(samples.front().features.size(), cfg.hidden, cfg.seed);
  trainer.fit(samples, cfg.epochs, cfg.learning_rate);
  return trainer.export_gate(alpha);
}

}  // namespace knnmt
