#pragma once

#include <span>
#include <vector>

#include "knnmt/datastore.hpp"
#include "knnmt/vocab.hpp"

namespace knnmt {

/// Sequence-to-sequence model abstraction. `encode` summarizes a source
/// sentence once; `step` produces the decoder representation and the dense
/// next-token distribution for a given target prefix. Both are deterministic
/// functions of their inputs.
class BaseModel {
 public:
  virtual ~BaseModel() = default;

  virtual const Vocabulary& vocab() const = 0;
  virtual std::size_t repr_dim() const = 0;
  virtual std::size_t summary_dim() const = 0;

  /// Source summary vector. Unknown tokens map to UNK; an empty source is an
  /// error.
  virtual std::vector<float> encode(std::span<const std::uint32_t> source_ids) const = 0;

  /// One decoding step. `prefix_ids` must begin with BOS. Writes repr_dim
  /// floats to `repr_out` and a vocab-sized distribution (sums to 1 within
  /// 1e-6) to `dist_out`.
  virtual void step(std::span<const float> summary, std::span<const std::uint32_t> prefix_ids,
                    std::span<float> repr_out, std::span<float> dist_out) const = 0;
};

struct SentencePair;

/// Builds the datastore from a parallel corpus under teacher forcing: one
/// entry per target token position, keyed by the decoder representation at
/// that position with the true target prefix, valued by the target token.
/// Rejects target tokens outside the model vocabulary, naming the offending
/// sentence index.
Datastore build_datastore(const std::vector<SentencePair>& corpus, const BaseModel& model);

}  // namespace knnmt
