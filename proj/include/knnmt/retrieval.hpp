#pragma once

#include <cstdint>
#include <span>
#include <vector>

#include "knnmt/datastore.hpp"

namespace knnmt {

/// Sparse distribution over token ids produced by neighbor retrieval.
/// Support is at most k tokens; probabilities sum to 1 when non-empty.
struct RetrievalDistribution {
  std::vector<std::pair<std::uint32_t, float>> probs;  // sorted by token id

  bool empty() const { return probs.empty(); }
  std::size_t support_size() const { return probs.size(); }
  float prob(std::uint32_t token) const;

  bool operator==(const RetrievalDistribution&) const = default;
};

struct InterpolationParams {
  std::size_t k = 8;
  double lambda = 0.7;
  double temperature = 10.0;

  void validate() const;
};

/// Softmax over negative neighbor distances, aggregated by token value:
/// p(v) proportional to sum over neighbors with value v of exp(-d/T).
/// The minimum distance is subtracted before exponentiation so any finite
/// distances are representable. An empty NeighborSet yields an empty
/// distribution, which callers must treat as "no retrieval".
RetrievalDistribution knn_distribution(const NeighborSet& neighbors, double temperature);

/// p(y) = (1 - lambda) * p_model(y) + lambda * p_knn(y), with p_knn taken as
/// zero off-support. An empty p_knn returns p_model unchanged regardless of
/// lambda.
std::vector<float> interpolate(std::span<const float> p_model,
                               const RetrievalDistribution& p_knn, double lambda);

/// In-place variant for the decode hot path; out may alias p_model.
void interpolate_into(std::span<const float> p_model, const RetrievalDistribution& p_knn,
                      double lambda, std::span<float> out);

}  // namespace knnmt
