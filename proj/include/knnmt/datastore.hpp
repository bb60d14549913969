#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "knnmt/common.hpp"

namespace knnmt {

/// Key-value memory: each entry maps a decoder output representation to the
/// target token that followed it. Immutable once built; concurrent reads are
/// safe.
struct Datastore {
  std::uint32_t dim = 0;
  std::vector<float> keys;           // size() * dim, row-major
  std::vector<std::uint32_t> values;

  std::size_t size() const { return values.size(); }
  bool empty() const { return values.empty(); }

  std::span<const float> key(std::size_t i) const {
    return {keys.data() + i * dim, dim};
  }

  void append(std::span<const float> key, std::uint32_t value);

  /// Checks shape consistency and key finiteness; throws Error on violation.
  void validate() const;
};

struct Neighbor {
  std::uint32_t index;  // entry index in the datastore
  float distance;       // squared Euclidean
  std::uint32_t value;  // token id of the entry
};

/// Retrieved neighbors, sorted ascending by (distance, index).
using NeighborSet = std::vector<Neighbor>;

/// Brute-force k-nearest-neighbor scan over all entries. Returns the
/// min(k, N) entries with the smallest squared Euclidean distance to the
/// query; equal distances are ordered by ascending entry index.
NeighborSet exact_knn(const Datastore& ds, std::span<const float> query, std::size_t k);

/// Batched form: `queries` holds n_queries rows of ds.dim floats.
std::vector<NeighborSet> exact_knn_batch(const Datastore& ds, const float* queries,
                                         std::size_t n_queries, std::size_t k);

void save_datastore(const Datastore& ds, const std::filesystem::path& path);
Datastore load_datastore(const std::filesystem::path& path);

}  // namespace knnmt
