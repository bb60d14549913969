#include "knnmt/task.hpp"

#include <numeric>
#include <random>

namespace knnmt {

TokenMapping TokenMapping::base(std::uint64_t seed, std::size_t content_vocab) {
  TokenMapping m;
  m.map.resize(content_vocab);
  std::iota(m.map.begin(), m.map.end(), 0u);
  std::mt19937_64 rng(hash_combine(seed, 0x6d617070ULL));  // "mapp"
  for (std::size_t i = content_vocab; i > 1; --i) {
    std::uniform_int_distribution<std::size_t> pick(0, i - 1);
    std::swap(m.map[i - 1], m.map[pick(rng)]);
  }
  return m;
}

TokenMapping TokenMapping::domain_variant(std::uint64_t seed, std::uint32_t domain,
                                          double shift) const {
  if (!(shift >= 0.0 && shift <= 1.0)) {
    throw Error("token mapping: domain_shift must be in [0,1]");
  }
  TokenMapping m = *this;
  if (domain == 0 || shift == 0.0) return m;

  const std::size_t vocab = map.size();
  const std::size_t n_rewrites = static_cast<std::size_t>(shift * static_cast<double>(vocab));
  std::mt19937_64 rng(hash_combine(hash_combine(seed, 0x646f6dULL), domain));  // "dom"

  // Choose which rules to rewrite via a partial shuffle.
  std::vector<std::uint32_t> order(vocab);
  std::iota(order.begin(), order.end(), 0u);
  for (std::size_t i = 0; i < n_rewrites && i < vocab; ++i) {
    std::uniform_int_distribution<std::size_t> pick(i, vocab - 1);
    std::swap(order[i], order[pick(rng)]);
  }
  std::uniform_int_distribution<std::uint32_t> target(0, static_cast<std::uint32_t>(vocab - 1));
  for (std::size_t i = 0; i < n_rewrites && i < vocab; ++i) {
    const std::uint32_t src = order[i];
    std::uint32_t dst = target(rng);
    if (dst == map[src]) dst = (dst + 1) % vocab;  // force a real rewrite
    m.map[src] = dst;
  }
  return m;
}

std::vector<std::uint32_t> TokenMapping::inverse_permutation() const {
  std::vector<std::uint32_t> inv(map.size(), 0u);
  std::vector<bool> seen(map.size(), false);
  for (std::uint32_t i = 0; i < map.size(); ++i) {
    if (seen[map[i]]) throw Error("token mapping: not a permutation");
    seen[map[i]] = true;
    inv[map[i]] = i;
  }
  return inv;
}

}  // namespace knnmt
