#pragma once

#include <cstdint>
#include <vector>

#include "knnmt/common.hpp"

namespace knnmt {

/// The synthetic translation task: each target token is a per-token mapping
/// of one source token, read at a swapped position. The base mapping is a
/// seeded permutation of the content vocabulary; domain variants rewrite a
/// fraction of its rules. The stub model is biased toward the base mapping
/// only, so domain variants create a genuine adaptation gap.
struct TokenMapping {
  std::vector<std::uint32_t> map;  // content index -> content index

  static TokenMapping base(std::uint64_t seed, std::size_t content_vocab);

  /// Domain 0 is the base domain (no rewrites). Domains >= 1 rewrite
  /// floor(shift * vocab) rules with the domain's sub-seed.
  TokenMapping domain_variant(std::uint64_t seed, std::uint32_t domain,
                              double shift) const;

  /// Inverse of the base permutation.
  std::vector<std::uint32_t> inverse_permutation() const;
};

/// Position swap used by the task: adjacent pairs exchange places, the last
/// position of an odd-length sentence stays put. Positions at or beyond the
/// source length map to themselves.
inline std::size_t swapped_source_position(std::size_t pos, std::size_t source_len) {
  if (pos >= source_len) return pos;
  if (pos % 2 == 0) return (pos + 1 < source_len) ? pos + 1 : pos;
  return pos - 1;
}

}  // namespace knnmt
