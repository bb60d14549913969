#include "knnmt/ivf.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <queue>

#include "knnmt/distance.hpp"
#include "knnmt/io_util.hpp"

namespace knnmt {

namespace {

constexpr char kMagic[] = "KNNIV1";

std::uint32_t nearest_centroid(const IvfIndex& index, const float* key) {
  std::uint32_t best = 0;
  float best_d = std::numeric_limits<float>::infinity();
  for (std::uint32_t c = 0; c < index.n_clusters; ++c) {
    const float d = squared_l2(key, index.centroids.data() + c * index.dim, index.dim);
    if (d < best_d) {  // ties keep the lowest cluster id
      best_d = d;
      best = c;
    }
  }
  return best;
}

// Re-seed each empty cluster with the entry farthest from its assigned
// centroid; the entry moves to the empty cluster.
void reseed_empty_clusters(const Datastore& ds, IvfIndex& index,
                           std::vector<std::size_t>& counts) {
  for (std::uint32_t c = 0; c < index.n_clusters; ++c) {
    if (counts[c] != 0) continue;
    std::size_t far_entry = 0;
    double far_d = -1.0;
    for (std::size_t i = 0; i < ds.size(); ++i) {
      if (counts[index.assignments[i]] <= 1) continue;  // keep donors nonempty
      const double d = squared_l2_f64(
          ds.keys.data() + i * ds.dim,
          index.centroids.data() + index.assignments[i] * static_cast<std::size_t>(index.dim),
          ds.dim);
      if (d > far_d) {
        far_d = d;
        far_entry = i;
      }
    }
    if (far_d < 0.0) continue;  // nothing movable
    counts[index.assignments[far_entry]]--;
    index.assignments[far_entry] = c;
    counts[c] = 1;
    std::copy_n(ds.keys.data() + far_entry * ds.dim, ds.dim,
                index.centroids.data() + c * static_cast<std::size_t>(index.dim));
  }
}

// Top-nprobe centroids by (distance, cluster id).
std::vector<std::uint32_t> probe_order(const IvfIndex& index, const float* q,
                                       std::size_t nprobe) {
  nprobe = std::min<std::size_t>(nprobe, index.n_clusters);
  std::vector<std::pair<float, std::uint32_t>> dists(index.n_clusters);
  for (std::uint32_t c = 0; c < index.n_clusters; ++c) {
    dists[c] = {squared_l2(q, index.centroids.data() + c * index.dim, index.dim), c};
  }
  std::partial_sort(dists.begin(), dists.begin() + static_cast<std::ptrdiff_t>(nprobe),
                    dists.end());
  std::vector<std::uint32_t> out(nprobe);
  for (std::size_t i = 0; i < nprobe; ++i) out[i] = dists[i].second;
  return out;
}

struct HeapWorse {
  bool operator()(const Neighbor& a, const Neighbor& b) const {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  }
};

using TopkHeap = std::priority_queue<Neighbor, std::vector<Neighbor>, HeapWorse>;

void heap_offer(TopkHeap& heap, std::size_t k, std::uint32_t idx, float d,
                std::uint32_t value) {
  if (heap.size() < k) {
    heap.push({idx, d, value});
    return;
  }
  const Neighbor& worst = heap.top();
  if (d < worst.distance || (d == worst.distance && idx < worst.index)) {
    heap.pop();
    heap.push({idx, d, value});
  }
}

NeighborSet heap_drain(TopkHeap& heap) {
  NeighborSet out(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

}  // namespace

IvfIndex build_ivf_index(const Datastore& ds, std::size_t n_clusters,
                         std::size_t kmeans_iters) {
  if (n_clusters == 0) throw Error("build_ivf_index: n_clusters must be >= 1");
  if (n_clusters > ds.size()) {
    throw Error("build_ivf_index: n_clusters " + std::to_string(n_clusters) +
                " exceeds entry count " + std::to_string(ds.size()));
  }
  if (kmeans_iters == 0) throw Error("build_ivf_index: kmeans_iters must be >= 1");

  IvfIndex index;
  index.n_clusters = static_cast<std::uint32_t>(n_clusters);
  index.dim = ds.dim;
  index.centroids.resize(n_clusters * static_cast<std::size_t>(ds.dim));
  index.assignments.assign(ds.size(), 0);

  const std::size_t stride = ds.size() / n_clusters;
  for (std::size_t c = 0; c < n_clusters; ++c) {
    std::copy_n(ds.keys.data() + (c * stride) * ds.dim, ds.dim,
                index.centroids.data() + c * static_cast<std::size_t>(ds.dim));
  }

  std::vector<std::size_t> counts(n_clusters, 0);
  std::vector<double> sums(n_clusters * static_cast<std::size_t>(ds.dim));

  for (std::size_t iter = 0; iter < kmeans_iters; ++iter) {
    std::fill(counts.begin(), counts.end(), 0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      const std::uint32_t c = nearest_centroid(index, ds.keys.data() + i * ds.dim);
      index.assignments[i] = c;
      counts[c]++;
    }
    reseed_empty_clusters(ds, index, counts);

    std::fill(sums.begin(), sums.end(), 0.0);
    for (std::size_t i = 0; i < ds.size(); ++i) {
      double* dst = sums.data() + index.assignments[i] * static_cast<std::size_t>(ds.dim);
      const float* src = ds.keys.data() + i * ds.dim;
      for (std::size_t j = 0; j < ds.dim; ++j) dst[j] += src[j];
    }
    for (std::size_t c = 0; c < n_clusters; ++c) {
      if (counts[c] == 0) continue;
      float* dst = index.centroids.data() + c * static_cast<std::size_t>(index.dim);
      const double* src = sums.data() + c * static_cast<std::size_t>(ds.dim);
      for (std::size_t j = 0; j < ds.dim; ++j) {
        dst[j] = static_cast<float>(src[j] / static_cast<double>(counts[c]));
      }
    }
  }

  // Final assignment pass so every entry sits under its nearest centroid.
  std::fill(counts.begin(), counts.end(), 0);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    const std::uint32_t c = nearest_centroid(index, ds.keys.data() + i * ds.dim);
    index.assignments[i] = c;
    counts[c]++;
  }
  reseed_empty_clusters(ds, index, counts);

  index.lists.assign(n_clusters, {});
  for (std::size_t c = 0; c < n_clusters; ++c) index.lists[c].reserve(counts[c]);
  for (std::size_t i = 0; i < ds.size(); ++i) {
    index.lists[index.assignments[i]].push_back(i);
  }
  return index;
}

NeighborSet ivf_search(const IvfIndex& index, const Datastore& ds,
                       std::span<const float> query, std::size_t k, std::size_t nprobe) {
  if (k == 0) throw Error("ivf_search: k must be >= 1");
  if (nprobe == 0) throw Error("ivf_search: nprobe must be >= 1");
  if (query.size() != index.dim || ds.dim != index.dim) {
    throw Error("ivf_search: dim mismatch (query " + std::to_string(query.size()) +
                ", index " + std::to_string(index.dim) + ", datastore " +
                std::to_string(ds.dim) + ")");
  }
  if (ds.empty()) return {};

  TopkHeap heap;
  for (const std::uint32_t c : probe_order(index, query.data(), nprobe)) {
    for (const std::uint64_t entry : index.lists[c]) {
      const float d = squared_l2(query.data(), ds.keys.data() + entry * ds.dim, ds.dim);
      heap_offer(heap, k, static_cast<std::uint32_t>(entry), d, ds.values[entry]);
    }
  }
  return heap_drain(heap);
}

std::vector<NeighborSet> ivf_search_batch(const IvfIndex& index, const Datastore& ds,
                                          const float* queries, std::size_t n_queries,
                                          std::size_t k, std::size_t nprobe) {
  if (k == 0) throw Error("ivf_search_batch: k must be >= 1");
  std::vector<TopkHeap> heaps(n_queries);

  // Group queries by probed cluster, then stream each cluster block once.
  std::vector<std::vector<std::uint32_t>> probers(index.n_clusters);
  for (std::size_t qi = 0; qi < n_queries; ++qi) {
    for (const std::uint32_t c : probe_order(index, queries + qi * index.dim, nprobe)) {
      probers[c].push_back(static_cast<std::uint32_t>(qi));
    }
  }
  for (std::uint32_t c = 0; c < index.n_clusters; ++c) {
    if (probers[c].empty()) continue;
    for (const std::uint64_t entry : index.lists[c]) {
      const float* key = ds.keys.data() + entry * ds.dim;
      for (const std::uint32_t qi : probers[c]) {
        const float d = squared_l2(queries + qi * index.dim, key, ds.dim);
        heap_offer(heaps[qi], k, static_cast<std::uint32_t>(entry), d, ds.values[entry]);
      }
    }
  }

  std::vector<NeighborSet> out(n_queries);
  for (std::size_t qi = 0; qi < n_queries; ++qi) out[qi] = heap_drain(heaps[qi]);
  return out;
}

void save_ivf_index(const IvfIndex& index, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  io::write_bytes(out, kMagic, 6);
  io::write_u32(out, index.n_clusters);
  io::write_u32(out, index.dim);
  io::write_f32_array(out, index.centroids.data(), index.centroids.size());
  for (const auto& list : index.lists) {
    io::write_u64(out, list.size());
    io::write_bytes(out, list.data(), list.size() * sizeof(std::uint64_t));
  }
}

IvfIndex load_ivf_index(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  io::expect_magic(in, kMagic, "ivf index");
  IvfIndex index;
  index.n_clusters = io::read_u32(in, "n_clusters");
  index.dim = io::read_u32(in, "dim");
  if (index.n_clusters == 0 || index.dim == 0) {
    throw IoError(IoError::Kind::BadHeader, "ivf index header: zero n_clusters or dim");
  }
  index.centroids.resize(index.n_clusters * static_cast<std::size_t>(index.dim));
  io::read_bytes(in, index.centroids.data(), index.centroids.size() * sizeof(float),
                 "centroids");
  index.lists.resize(index.n_clusters);
  std::size_t total = 0;
  for (auto& list : index.lists) {
    const std::uint64_t len = io::read_u64(in, "cluster list length");
    list.resize(len);
    io::read_bytes(in, list.data(), len * sizeof(std::uint64_t), "cluster list");
    total += len;
  }
  index.assignments.assign(total, 0);
  for (std::uint32_t c = 0; c < index.n_clusters; ++c) {
    for (const std::uint64_t entry : index.lists[c]) {
      if (entry >= total) {
        throw IoError(IoError::Kind::BadHeader, "ivf index: entry id out of range");
      }
      index.assignments[entry] = c;
    }
  }
  return index;
}

}  // namespace knnmt
