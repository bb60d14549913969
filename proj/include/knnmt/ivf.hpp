#pragma once

#include <cstdint>
#include <filesystem>
#include <span>
#include <vector>

#include "knnmt/datastore.hpp"

namespace knnmt {

/// Inverted-file index: k-means partition of the datastore keys. Queries
/// probe only the nprobe nearest cells. Immutable after construction.
struct IvfIndex {
  std::uint32_t n_clusters = 0;
  std::uint32_t dim = 0;
  std::vector<float> centroids;                     // n_clusters * dim
  std::vector<std::uint32_t> assignments;           // per datastore entry
  std::vector<std::vector<std::uint64_t>> lists;    // per-cluster entry ids, ascending

  std::span<const float> centroid(std::size_t c) const {
    return {centroids.data() + c * dim, dim};
  }
};

constexpr std::size_t kDefaultNprobe = 8;
constexpr std::size_t kDefaultKmeansIters = 10;

/// IVF auto-sizing rule: exact search below this entry count, IVF above.
constexpr std::size_t kExactSearchThreshold = 4096;

inline std::size_t default_n_clusters(std::size_t n_entries) {
  std::size_t c = 1;
  while ((c + 1) * (c + 1) <= n_entries) ++c;  // floor(sqrt)
  if ((c + 1) * (c + 1) - n_entries < n_entries - c * c) ++c;
  return c;
}

/// Deterministic k-means build. Initial centroids are every
/// floor(N/n_clusters)-th key; a fixed number of Lloyd iterations; clusters
/// that go empty are re-seeded with the entry farthest from its current
/// centroid.
IvfIndex build_ivf_index(const Datastore& ds, std::size_t n_clusters,
                         std::size_t kmeans_iters = kDefaultKmeansIters);

/// exact_knn restricted to the union of the nprobe clusters whose centroids
/// are nearest to the query. nprobe larger than n_clusters probes all cells.
NeighborSet ivf_search(const IvfIndex& index, const Datastore& ds,
                       std::span<const float> query, std::size_t k, std::size_t nprobe);

/// Batched probe: scans each touched cluster block once per step for all
/// queries probing it.
std::vector<NeighborSet> ivf_search_batch(const IvfIndex& index, const Datastore& ds,
                                          const float* queries, std::size_t n_queries,
                                          std::size_t k, std::size_t nprobe);

void save_ivf_index(const IvfIndex& index, const std::filesystem::path& path);
IvfIndex load_ivf_index(const std::filesystem::path& path);

}  // namespace knnmt
