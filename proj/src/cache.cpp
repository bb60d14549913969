#include "knnmt/cache.hpp"

#include <cmath>
#include <limits>

#include "knnmt/distance.hpp"

namespace knnmt {

DistributionCache::DistributionCache(double tau) : tau_(tau) {
  if (!(tau >= 0.0)) throw Error("cache: tau must be non-negative");
}

std::span<const float> DistributionCache::repr(std::size_t i) const {
  return {reprs_.data() + i * dim_, dim_};
}

const RetrievalDistribution* DistributionCache::lookup(std::span<const float> query) const {
  if (dists_.empty()) return nullptr;
  if (query.size() != dim_) {
    throw Error("cache lookup: query dim " + std::to_string(query.size()) +
                " does not match cache dim " + std::to_string(dim_));
  }

  std::size_t best = 0;
  double best_d2 = std::numeric_limits<double>::infinity();
  for (std::size_t i = 0; i < dists_.size(); ++i) {
    const double d2 = squared_l2_f64(query.data(), reprs_.data() + i * dim_, dim_);
    if (d2 < best_d2) {  // strict: ties keep the earliest-inserted entry
      best_d2 = d2;
      best = i;
    }
  }
  // tau is on the unsquared distance scale.
  if (best_d2 <= tau_ * tau_) return &dists_[best];
  return nullptr;
}

std::optional<RetrievalDistribution> DistributionCache::lookup_copy(
    std::span<const float> query) const {
  const RetrievalDistribution* hit = lookup(query);
  if (hit == nullptr) return std::nullopt;
  return *hit;
}

void DistributionCache::insert(const std::vector<std::vector<float>>& reprs,
                               const std::vector<RetrievalDistribution>& dists) {
  if (reprs.size() != dists.size()) {
    throw Error("cache insert: " + std::to_string(reprs.size()) + " reprs vs " +
                std::to_string(dists.size()) + " distributions");
  }
  for (std::size_t i = 0; i < reprs.size(); ++i) {
    if (dists_.empty() && reprs_.empty() && dim_ == 0) dim_ = reprs[i].size();
    if (reprs[i].size() != dim_) {
      throw Error("cache insert: repr dim " + std::to_string(reprs[i].size()) +
                  " does not match cache dim " + std::to_string(dim_));
    }
    reprs_.insert(reprs_.end(), reprs[i].begin(), reprs[i].end());
    dists_.push_back(dists[i]);
  }
}

}  // namespace knnmt
