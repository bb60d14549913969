#pragma once

#include <cstdint>
#include <vector>

#include "knnmt/datastore.hpp"

namespace knnmt {

struct PruneReport {
  std::uint64_t original_size = 0;
  std::uint64_t pruned_size = 0;
  std::uint64_t merges_performed = 0;
  std::uint32_t k_used = 0;
};

struct MergeEvent {
  std::uint32_t absorber;  // surviving entry
  std::uint32_t removed;
};

struct PruneResult {
  Datastore datastore;
  PruneReport report;
  std::vector<MergeEvent> merges;  // in removal order
};

/// Datastores above this size use an IVF index for the pruning neighbor
/// scans instead of exact search.
constexpr std::size_t kPruneExactThreshold = 100'000;

/// Greedy-merge pruning: sweeps entries in ascending index order; for each
/// entry still present, retrieves its k nearest neighbors among the
/// not-yet-removed entries (excluding itself) and removes every neighbor
/// with a larger index and the same value that has not itself absorbed an
/// entry. Surviving entries keep their original keys and relative order.
PruneResult greedy_merge_prune(const Datastore& ds, std::size_t k);

}  // namespace knnmt
