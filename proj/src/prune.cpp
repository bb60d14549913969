#include "knnmt/prune.hpp"

#include <algorithm>
#include <cstring>
#include <limits>

#include "knnmt/distance.hpp"
#include "knnmt/ivf.hpp"

namespace knnmt {

namespace {

struct Candidate {
  double distance;
  std::uint32_t index;

  bool operator<(const Candidate& o) const {
    if (distance != o.distance) return distance < o.distance;
    return index < o.index;
  }
};

// Fixed-capacity top-k by (distance, index), kept sorted; k is small here.
class TopK {
 public:
  explicit TopK(std::size_t k) : k_(k) { items_.reserve(k + 1); }

  void offer(double d, std::uint32_t idx) {
    if (items_.size() == k_ && !(Candidate{d, idx} < items_.back())) return;
    const Candidate c{d, idx};
    auto pos = std::upper_bound(items_.begin(), items_.end(), c);
    items_.insert(pos, c);
    if (items_.size() > k_) items_.pop_back();
  }

  const std::vector<Candidate>& items() const { return items_; }

 private:
  std::size_t k_;
  std::vector<Candidate> items_;
};

}  // namespace

PruneResult greedy_merge_prune(const Datastore& ds, std::size_t k) {
  const std::size_t n = ds.size();
  if (n == 0) throw Error("greedy_merge_prune: datastore is empty");
  if (k == 0) throw Error("greedy_merge_prune: k must be >= 1");
  if (k >= n) {
    throw Error("greedy_merge_prune: k (" + std::to_string(k) +
                ") must be smaller than the entry count (" + std::to_string(n) + ")");
  }

  const bool use_ivf = n > kPruneExactThreshold;
  IvfIndex index;
  if (use_ivf) {
    index = build_ivf_index(ds, default_n_clusters(n));
  }

  std::vector<bool> removed(n, false);
  std::vector<bool> absorbed_something(n, false);
  std::vector<MergeEvent> merges;

  const std::size_t dim = ds.dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (removed[i]) continue;

    TopK top(k);
    const float* qi = ds.keys.data() + i * dim;
    if (!use_ivf) {
      for (std::size_t j = 0; j < n; ++j) {
        if (j == i || removed[j]) continue;
        top.offer(squared_l2_f64(qi, ds.keys.data() + j * dim, dim),
                  static_cast<std::uint32_t>(j));
      }
    } else {
      // Approximate neighbor set from the probed cells; recall loss only
      // affects which merges fire.
      std::vector<std::pair<float, std::uint32_t>> cd(index.n_clusters);
      for (std::uint32_t c = 0; c < index.n_clusters; ++c) {
        cd[c] = {squared_l2(qi, index.centroids.data() + c * dim, dim), c};
      }
      const std::size_t nprobe = std::min<std::size_t>(kDefaultNprobe, index.n_clusters);
      std::partial_sort(cd.begin(), cd.begin() + static_cast<std::ptrdiff_t>(nprobe),
                        cd.end());
      for (std::size_t p = 0; p < nprobe; ++p) {
        for (const std::uint64_t j : index.lists[cd[p].second]) {
          if (j == i || removed[j]) continue;
          top.offer(squared_l2_f64(qi, ds.keys.data() + j * dim, dim),
                    static_cast<std::uint32_t>(j));
        }
      }
    }

    for (const Candidate& c : top.items()) {
      const std::uint32_t j = c.index;
      if (j <= i) continue;
      if (ds.values[j] != ds.values[i]) continue;
      if (absorbed_something[j]) continue;  // "has not been merged before"
      removed[j] = true;
      absorbed_something[i] = true;
      merges.push_back({static_cast<std::uint32_t>(i), j});
    }
  }

  PruneResult result;
  result.datastore.dim = ds.dim;
  for (std::size_t i = 0; i < n; ++i) {
    if (!removed[i]) result.datastore.append(ds.key(i), ds.values[i]);
  }
  result.report.original_size = n;
  result.report.pruned_size = result.datastore.size();
  result.report.merges_performed = merges.size();
  result.report.k_used = static_cast<std::uint32_t>(k);
  result.merges = std::move(merges);
  return result;
}

}  // namespace knnmt
