#include "knnmt/retrieval.hpp"

#include <algorithm>
#include <cmath>
#include <limits>

namespace knnmt {

float RetrievalDistribution::prob(std::uint32_t token) const {
  auto it = std::lower_bound(probs.begin(), probs.end(), token,
                             [](const auto& p, std::uint32_t t) { return p.first < t; });
  if (it != probs.end() && it->first == token) return it->second;
  return 0.0f;
}

void InterpolationParams::validate() const {
  if (k == 0) throw Error("interpolation params: k must be >= 1");
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error("interpolation params: lambda must be in [0,1]");
  }
  if (!(temperature > 0.0)) throw Error("interpolation params: temperature must be > 0");
}

RetrievalDistribution knn_distribution(const NeighborSet& neighbors, double temperature) {
  if (!(temperature > 0.0)) throw Error("knn_distribution: temperature must be > 0");
  RetrievalDistribution dist;
  if (neighbors.empty()) return dist;

  float min_d = std::numeric_limits<float>::infinity();
  for (const Neighbor& n : neighbors) {
    if (!std::isfinite(n.distance)) throw Error("knn_distribution: non-finite distance");
    min_d = std::min(min_d, n.distance);
  }

  // Aggregate stabilized weights per token value.
  std::vector<std::pair<std::uint32_t, double>> weights;
  weights.reserve(neighbors.size());
  for (const Neighbor& n : neighbors) {
    weights.emplace_back(n.value, std::exp(-(static_cast<double>(n.distance) - min_d) /
                                           temperature));
  }
  std::sort(weights.begin(), weights.end(),
            [](const auto& a, const auto& b) { return a.first < b.first; });

  double total = 0.0;
  for (const auto& [token, w] : weights) total += w;

  dist.probs.reserve(weights.size());
  for (std::size_t i = 0; i < weights.size();) {
    const std::uint32_t token = weights[i].first;
    double acc = 0.0;
    for (; i < weights.size() && weights[i].first == token; ++i) acc += weights[i].second;
    const float p = static_cast<float>(acc / total);
    if (p > 0.0f) dist.probs.emplace_back(token, p);
  }
  return dist;
}

void interpolate_into(std::span<const float> p_model, const RetrievalDistribution& p_knn,
                      double lambda, std::span<float> out) {
  if (!(lambda >= 0.0 && lambda <= 1.0)) {
    throw Error("interpolate: lambda must be in [0,1], got " + std::to_string(lambda));
  }
  if (out.size() != p_model.size()) throw Error("interpolate: output size mismatch");

  if (p_knn.empty()) {
    if (out.data() != p_model.data()) {
      std::copy(p_model.begin(), p_model.end(), out.begin());
    }
    return;
  }

  const float keep = static_cast<float>(1.0 - lambda);
  for (std::size_t i = 0; i < p_model.size(); ++i) out[i] = keep * p_model[i];
  const float mix = static_cast<float>(lambda);
  for (const auto& [token, p] : p_knn.probs) {
    if (token < out.size()) out[token] += mix * p;
  }
}

std::vector<float> interpolate(std::span<const float> p_model,
                               const RetrievalDistribution& p_knn, double lambda) {
  std::vector<float> out(p_model.size());
  interpolate_into(p_model, p_knn, lambda, out);
  return out;
}

}  // namespace knnmt
