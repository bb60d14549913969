#include "knnmt/datastore.hpp"

#include <algorithm>
#include <cmath>
#include <queue>

#include "knnmt/distance.hpp"
#include "knnmt/io_util.hpp"

namespace knnmt {

namespace {

constexpr char kMagic[] = "KNNDS1";

// Max-heap ordering: the worst (largest distance, then largest index)
// candidate sits on top so it can be evicted first.
struct HeapWorse {
  bool operator()(const Neighbor& a, const Neighbor& b) const {
    if (a.distance != b.distance) return a.distance < b.distance;
    return a.index < b.index;
  }
};

}  // namespace

void Datastore::append(std::span<const float> key, std::uint32_t value) {
  if (key.size() != dim) {
    throw Error("datastore append: key has dim " + std::to_string(key.size()) +
                ", datastore has dim " + std::to_string(dim));
  }
  keys.insert(keys.end(), key.begin(), key.end());
  values.push_back(value);
}

void Datastore::validate() const {
  if (dim == 0 && !values.empty()) throw Error("datastore: dim is 0 but entries exist");
  if (keys.size() != values.size() * static_cast<std::size_t>(dim)) {
    throw Error("datastore: keys/values shape mismatch");
  }
  for (float v : keys) {
    if (!std::isfinite(v)) throw Error("datastore: non-finite key component");
  }
}

NeighborSet exact_knn(const Datastore& ds, std::span<const float> query, std::size_t k) {
  if (k == 0) throw Error("exact_knn: k must be >= 1");
  if (ds.empty()) return {};
  if (query.size() != ds.dim) {
    throw Error("exact_knn: query dim " + std::to_string(query.size()) +
                " does not match datastore dim " + std::to_string(ds.dim));
  }

  std::priority_queue<Neighbor, std::vector<Neighbor>, HeapWorse> heap;
  const float* q = query.data();
  const std::size_t n = ds.size();
  for (std::size_t i = 0; i < n; ++i) {
    const float d = squared_l2(q, ds.keys.data() + i * ds.dim, ds.dim);
    if (heap.size() < k) {
      heap.push({static_cast<std::uint32_t>(i), d, ds.values[i]});
    } else {
      const Neighbor& worst = heap.top();
      if (d < worst.distance ||
          (d == worst.distance && static_cast<std::uint32_t>(i) < worst.index)) {
        heap.pop();
        heap.push({static_cast<std::uint32_t>(i), d, ds.values[i]});
      }
    }
  }

  NeighborSet out(heap.size());
  for (std::size_t i = heap.size(); i-- > 0;) {
    out[i] = heap.top();
    heap.pop();
  }
  return out;
}

std::vector<NeighborSet> exact_knn_batch(const Datastore& ds, const float* queries,
                                         std::size_t n_queries, std::size_t k) {
  std::vector<NeighborSet> out;
  out.reserve(n_queries);
  for (std::size_t qi = 0; qi < n_queries; ++qi) {
    out.push_back(exact_knn(ds, {queries + qi * ds.dim, ds.dim}, k));
  }
  return out;
}

void save_datastore(const Datastore& ds, const std::filesystem::path& path) {
  auto out = io::open_output(path);
  io::write_bytes(out, kMagic, 6);
  io::write_u32(out, ds.dim);
  io::write_u64(out, ds.size());
  io::write_f32_array(out, ds.keys.data(), ds.keys.size());
  io::write_u32_array(out, ds.values.data(), ds.values.size());
}

Datastore load_datastore(const std::filesystem::path& path) {
  auto in = io::open_input(path);
  io::expect_magic(in, kMagic, "datastore");
  Datastore ds;
  ds.dim = io::read_u32(in, "dim");
  const std::uint64_t n = io::read_u64(in, "entry count");
  if (ds.dim == 0 && n > 0) {
    throw IoError(IoError::Kind::BadHeader, "datastore header: dim=0 with nonzero entry count");
  }

  const std::uint64_t expected = n * ds.dim * sizeof(float) + n * sizeof(std::uint32_t);
  const std::uint64_t actual = io::remaining_bytes(in);
  if (actual != expected) {
    throw IoError(IoError::Kind::Truncated,
                  "datastore payload size mismatch: expected " + std::to_string(expected) +
                      " bytes, got " + std::to_string(actual));
  }

  ds.keys.resize(static_cast<std::size_t>(n) * ds.dim);
  ds.values.resize(static_cast<std::size_t>(n));
  io::read_bytes(in, ds.keys.data(), ds.keys.size() * sizeof(float), "keys");
  io::read_bytes(in, ds.values.data(), ds.values.size() * sizeof(std::uint32_t), "values");
  return ds;
}

}  // namespace knnmt
