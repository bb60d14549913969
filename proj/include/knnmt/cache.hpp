#pragma once

#include <optional>
#include <span>
#include <vector>

#include "knnmt/retrieval.hpp"

namespace knnmt {

/// Per-decode cache of (representation, retrieval distribution) pairs.
/// Lookup returns the distribution of the closest cached representation when
/// its unsquared Euclidean distance is within tau. Owned by exactly one
/// decode session; cleared between sessions.
class DistributionCache {
 public:
  explicit DistributionCache(double tau);

  /// Closest-entry lookup; ties go to the earliest-inserted entry.
  /// Returns nothing when the cache is empty or the minimum distance
  /// exceeds tau (the caller must search the datastore).
  const RetrievalDistribution* lookup(std::span<const float> query) const;
  std::optional<RetrievalDistribution> lookup_copy(std::span<const float> query) const;

  /// Appends one (repr, distribution) pair per active beam.
  void insert(const std::vector<std::vector<float>>& reprs,
              const std::vector<RetrievalDistribution>& dists);

  void clear() { reprs_.clear(); dists_.clear(); }
  std::size_t size() const { return dists_.size(); }
  double tau() const { return tau_; }
  std::span<const float> repr(std::size_t i) const;
  const RetrievalDistribution& distribution(std::size_t i) const { return dists_[i]; }

 private:
  double tau_;
  std::size_t dim_ = 0;           // set by the first insert
  std::vector<float> reprs_;      // size() * dim_, row-major
  std::vector<RetrievalDistribution> dists_;
};

}  // namespace knnmt
