#pragma once

#include "knnmt/model.hpp"
#include "knnmt/task.hpp"

namespace knnmt {

struct StubModelConfig {
  std::uint64_t seed = 17;
  std::size_t repr_dim = 64;
  std::size_t content_vocab = 512;
  std::size_t max_positions = 64;  // source length capacity + stop marker slot
};

/// Deterministic stand-in for a neural translation model, sized for desk
/// experiments. The encoder writes one small embedding per (swapped) source
/// position into a slotted summary plus a hashed n-gram region; a step reads
/// the slot for its position, mixes in hashed prefix n-gram features, and
/// projects into the representation space. The output layer is biased toward
/// the base token-mapping rule of the synthetic task, so the stub reaches
/// non-trivial BLEU without any retrieval.
///
/// The representation geometry is deliberately structured: the position-slot
/// readout is low-rank (slot width < repr_dim) so PCA keeps retrieval
/// working, and nearby prefixes land close together so a distribution cache
/// gets real hits.
class StubModel : public BaseModel {
 public:
  explicit StubModel(const StubModelConfig& cfg = {});

  const Vocabulary& vocab() const override { return vocab_; }
  std::size_t repr_dim() const override { return cfg_.repr_dim; }
  std::size_t summary_dim() const override { return (cfg_.max_positions + 1) * slot_dim_; }

  std::vector<float> encode(std::span<const std::uint32_t> source_ids) const override;
  void step(std::span<const float> summary, std::span<const std::uint32_t> prefix_ids,
            std::span<float> repr_out, std::span<float> dist_out) const override;

  const StubModelConfig& config() const { return cfg_; }
  const TokenMapping& base_mapping() const { return base_mapping_; }

 private:
  std::span<const float> slot(std::span<const float> summary, std::size_t pos) const {
    return summary.subspan(pos * slot_dim_, slot_dim_);
  }
  std::span<const float> global_region(std::span<const float> summary) const {
    return summary.subspan(cfg_.max_positions * slot_dim_, slot_dim_);
  }

  StubModelConfig cfg_;
  Vocabulary vocab_;
  TokenMapping base_mapping_;
  std::size_t slot_dim_;

  // Seeded feature tables (see stub_model.cpp for the layout).
  std::vector<float> token_emb_;     // (content_vocab + 1) x slot_dim, unit rows
  std::vector<float> eos_marker_;    // slot_dim, unit
  std::vector<float> hash_table_;    // kHashBuckets x slot_dim (source n-grams)
  std::vector<float> prefix_table_;  // kHashBuckets x slot_dim (prefix n-grams)
  std::vector<float> proj_read_;     // repr_dim x slot_dim, orthonormal columns
  std::vector<float> proj_prefix_;   // repr_dim x slot_dim
  std::vector<float> proj_global_;   // repr_dim x slot_dim
  std::vector<float> out_rows_;      // vocab_size x repr_dim
  std::vector<float> out_bias_;      // vocab_size
};

}  // namespace knnmt
