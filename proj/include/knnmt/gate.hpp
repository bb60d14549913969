#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "knnmt/common.hpp"

namespace knnmt {

/// Two-layer MLP (ReLU hidden layer, sigmoid output) predicting the
/// interpolation coefficient lambda per decoding step. Retrieval runs only
/// when the prediction exceeds alpha.
struct AdaptiveGate {
  std::uint32_t feature_dim = 0;
  std::uint32_t hidden = 128;
  std::vector<float> w1;  // hidden x feature_dim, row-major
  std::vector<float> b1;  // hidden
  std::vector<float> w2;  // hidden
  float b2 = 0.0f;
  float alpha = 0.5f;

  /// Deterministic forward pass; output strictly inside (0,1).
  double predict_lambda(std::span<const float> features) const;
};

inline bool should_retrieve(double lambda, double alpha) { return lambda > alpha; }

void save_gate(const AdaptiveGate& gate, const std::filesystem::path& path);
AdaptiveGate load_gate(const std::filesystem::path& path);

/// One teacher-forced decoding step, reduced to what the gate objective
/// needs: the input features plus the base-model and retrieval probabilities
/// of the gold token.
struct GateTrainSample {
  std::vector<float> features;
  double p_model_gold = 0.0;
  double p_knn_gold = 0.0;
};

struct GateTrainConfig {
  std::uint64_t seed = 1;
  std::size_t hidden = 128;
  std::size_t epochs = 200;
  double learning_rate = 0.01;  // Adam
};

/// Double-precision trainer maximizing the interpolated validation
/// log-likelihood: mean over steps of
///   log((1 - lambda_hat) p_model(y*) + lambda_hat p_knn(y*)).
/// Exposed so tests can finite-difference the gradient.
class GateTrainer {
 public:
  GateTrainer(std::size_t feature_dim, std::size_t hidden, std::uint64_t seed);

  double objective(const std::vector<GateTrainSample>& samples) const;
  /// d(objective)/d(params), same layout as params().
  std::vector<double> gradient(const std::vector<GateTrainSample>& samples) const;

  void fit(const std::vector<GateTrainSample>& samples, std::size_t epochs,
           double learning_rate);

  std::vector<double>& params() { return params_; }
  const std::vector<double>& params() const { return params_; }
  std::size_t feature_dim() const { return feature_dim_; }
  std::size_t hidden() const { return hidden_; }

  double predict_lambda(std::span<const float> features) const;
  AdaptiveGate export_gate(float alpha) const;

 private:
  std::size_t feature_dim_;
  std::size_t hidden_;
  std::vector<double> params_;  // [w1 | b1 | w2 | b2]
};

AdaptiveGate train_gate_on_samples(const std::vector<GateTrainSample>& samples,
                                   const GateTrainConfig& cfg, float alpha);

}  // namespace knnmt
