#include "knnmt/stub_model.hpp"

#include <algorithm>
#include <cmath>
#include <random>

namespace knnmt {

namespace {

constexpr std::size_t kHashBuckets = 4096;
constexpr float kLogitGain = 3.0f;     // output row scale; sets base-model confidence
constexpr float kPrefixMix = 0.45f;    // prefix n-gram contribution to the representation
constexpr float kGlobalMix = 0.30f;    // per-sentence global contribution
constexpr float kReprScale = 6.0f;     // representation norm; sets the cache tau scale
constexpr float kReservedBias = -30.0f;

constexpr std::uint64_t kTagTokenEmb = 0x746f6b656dULL;
constexpr std::uint64_t kTagMarker = 0x656f73ULL;
constexpr std::uint64_t kTagSourceNgram = 0x736e67ULL;
constexpr std::uint64_t kTagPrefixNgram = 0x706e67ULL;
constexpr std::uint64_t kTagProjRead = 0x707264ULL;
constexpr std::uint64_t kTagProjPrefix = 0x707072ULL;
constexpr std::uint64_t kTagProjGlobal = 0x70676cULL;

std::vector<float> gaussian_table(std::uint64_t seed, std::size_t rows, std::size_t cols,
                                  double sigma) {
  std::vector<float> t(rows * cols);
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, sigma);
  for (float& x : t) x = static_cast<float>(gauss(rng));
  return t;
}

void normalize_rows(std::vector<float>& table, std::size_t cols) {
  for (std::size_t r = 0; r * cols < table.size(); ++r) {
    float* row = table.data() + r * cols;
    double n2 = 0.0;
    for (std::size_t c = 0; c < cols; ++c) n2 += static_cast<double>(row[c]) * row[c];
    const float inv = static_cast<float>(1.0 / std::sqrt(std::max(n2, 1e-30)));
    for (std::size_t c = 0; c < cols; ++c) row[c] *= inv;
  }
}

// repr_dim x slot_dim matrix with orthonormal columns (Gram-Schmidt of a
// seeded Gaussian draw). Requires repr_dim >= slot_dim.
std::vector<float> orthonormal_columns(std::uint64_t seed, std::size_t rows,
                                       std::size_t cols) {
  std::vector<std::vector<double>> basis(cols, std::vector<double>(rows));
  std::mt19937_64 rng(seed);
  std::normal_distribution<double> gauss(0.0, 1.0);
  for (std::size_t c = 0; c < cols; ++c) {
    for (std::size_t r = 0; r < rows; ++r) basis[c][r] = gauss(rng);
    for (int pass = 0; pass < 2; ++pass) {
      for (std::size_t p = 0; p < c; ++p) {
        double d = 0.0;
        for (std::size_t r = 0; r < rows; ++r) d += basis[c][r] * basis[p][r];
        for (std::size_t r = 0; r < rows; ++r) basis[c][r] -= d * basis[p][r];
      }
    }
    double n2 = 0.0;
    for (std::size_t r = 0; r < rows; ++r) n2 += basis[c][r] * basis[c][r];
    const double inv = 1.0 / std::sqrt(n2);
    for (std::size_t r = 0; r < rows; ++r) basis[c][r] *= inv;
  }
  std::vector<float> out(rows * cols);
  for (std::size_t r = 0; r < rows; ++r) {
    for (std::size_t c = 0; c < cols; ++c) out[r * cols + c] = static_cast<float>(basis[c][r]);
  }
  return out;
}

std::size_t bucket_of(std::uint64_t h) { return h % kHashBuckets; }

// y += M x for an (rows x cols) row-major matrix.
void add_matvec(std::span<float> y, const std::vector<float>& m, std::size_t cols,
                const float* x, float scale) {
  for (std::size_t r = 0; r < y.size(); ++r) {
    const float* row = m.data() + r * cols;
    float s = 0.0f;
    for (std::size_t c = 0; c < cols; ++c) s += row[c] * x[c];
    y[r] += scale * s;
  }
}

// Normalizes src into dst; leaves dst zeroed when src is numerically zero.
bool normalized_copy(std::span<const float> src, float* dst) {
  double n2 = 0.0;
  for (float v : src) n2 += static_cast<double>(v) * v;
  if (n2 < 1e-24) {
    std::fill_n(dst, src.size(), 0.0f);
    return false;
  }
  const float inv = static_cast<float>(1.0 / std::sqrt(n2));
  for (std::size_t i = 0; i < src.size(); ++i) dst[i] = src[i] * inv;
  return true;
}

}  // namespace

StubModel::StubModel(const StubModelConfig& cfg)
    : cfg_(cfg),
      vocab_(Vocabulary::synthetic(cfg.content_vocab)),
      base_mapping_(TokenMapping::base(cfg.seed, cfg.content_vocab)),
      slot_dim_(std::min<std::size_t>(32, cfg.repr_dim)) {
  if (cfg.repr_dim == 0) throw Error("stub model: repr_dim must be >= 1");
  if (cfg.content_vocab == 0) throw Error("stub model: content vocab must be >= 1");
  if (cfg.max_positions < 2) throw Error("stub model: max_positions must be >= 2");

  token_emb_ = gaussian_table(hash_combine(cfg.seed, kTagTokenEmb),
                              cfg.content_vocab + 1, slot_dim_, 1.0);
  normalize_rows(token_emb_, slot_dim_);
  eos_marker_ = gaussian_table(hash_combine(cfg.seed, kTagMarker), 1, slot_dim_, 1.0);
  normalize_rows(eos_marker_, slot_dim_);

  const double feat_sigma = 1.0 / std::sqrt(static_cast<double>(slot_dim_));
  hash_table_ = gaussian_table(hash_combine(cfg.seed, kTagSourceNgram), kHashBuckets,
                               slot_dim_, feat_sigma);
  prefix_table_ = gaussian_table(hash_combine(cfg.seed, kTagPrefixNgram), kHashBuckets,
                                 slot_dim_, feat_sigma);

  proj_read_ = orthonormal_columns(hash_combine(cfg.seed, kTagProjRead), cfg.repr_dim,
                                   slot_dim_);
  proj_prefix_ = gaussian_table(hash_combine(cfg.seed, kTagProjPrefix), cfg.repr_dim,
                                slot_dim_, feat_sigma);
  proj_global_ = gaussian_table(hash_combine(cfg.seed, kTagProjGlobal), cfg.repr_dim,
                                slot_dim_, feat_sigma);

  // Output rows: each content token's row is the projected embedding of the
  // source token that maps to it under the base rule; the EOS row is the
  // projected stop marker. Reserved tokens get a large negative bias.
  const std::vector<std::uint32_t> inverse = base_mapping_.inverse_permutation();
  out_rows_.assign(vocab_.size() * cfg.repr_dim, 0.0f);
  out_bias_.assign(vocab_.size(), 0.0f);
  out_bias_[Vocabulary::kPad] = kReservedBias;
  out_bias_[Vocabulary::kBos] = kReservedBias;
  out_bias_[Vocabulary::kUnk] = kReservedBias;

  std::vector<float> projected(cfg.repr_dim);
  auto fill_row = [&](std::uint32_t token_id, const float* emb) {
    std::fill(projected.begin(), projected.end(), 0.0f);
    add_matvec(projected, proj_read_, slot_dim_, emb, 1.0f);
    float* row = out_rows_.data() + static_cast<std::size_t>(token_id) * cfg_.repr_dim;
    for (std::size_t r = 0; r < cfg_.repr_dim; ++r) row[r] = kLogitGain * projected[r];
  };
  for (std::uint32_t c = 0; c < cfg.content_vocab; ++c) {
    fill_row(vocab_.content_id(c), token_emb_.data() + inverse[c] * slot_dim_);
  }
  fill_row(Vocabulary::kEos, eos_marker_.data());
}

std::vector<float> StubModel::encode(std::span<const std::uint32_t> source_ids) const {
  const std::size_t len = source_ids.size();
  if (len == 0) throw Error("stub encode: empty source");
  if (len + 1 > cfg_.max_positions) {
    throw Error("stub encode: source length " + std::to_string(len) +
                " exceeds capacity " + std::to_string(cfg_.max_positions - 1));
  }

  std::vector<float> summary(summary_dim(), 0.0f);
  auto emb_row = [&](std::uint32_t id) {
    const std::size_t row =
        vocab_.is_content(id) ? vocab_.content_index(id) : cfg_.content_vocab;  // UNK row
    return token_emb_.data() + row * slot_dim_;
  };

  // One embedding per slot, written in swapped order so that a step at
  // position t reads the source token the task maps there.
  for (std::size_t i = 0; i < len; ++i) {
    const std::uint32_t tok = source_ids[swapped_source_position(i, len)];
    std::copy_n(emb_row(tok), slot_dim_, summary.data() + i * slot_dim_);
  }
  std::copy_n(eos_marker_.data(), slot_dim_, summary.data() + len * slot_dim_);

  // Hashed unigram + bigram features, shared by the whole sentence.
  float* global = summary.data() + cfg_.max_positions * slot_dim_;
  auto add_feature = [&](std::uint64_t h) {
    const float* row = hash_table_.data() + bucket_of(h) * slot_dim_;
    for (std::size_t c = 0; c < slot_dim_; ++c) global[c] += row[c];
  };
  for (std::size_t i = 0; i < len; ++i) {
    add_feature(hash_combine(hash_combine(kTagSourceNgram, 1), source_ids[i]));
    if (i + 1 < len) {
      add_feature(hash_combine(hash_combine(hash_combine(kTagSourceNgram, 2),
                                            source_ids[i]),
                               source_ids[i + 1]));
    }
  }

  double n2 = 0.0;
  for (float v : summary) n2 += static_cast<double>(v) * v;
  const float inv = static_cast<float>(1.0 / std::sqrt(n2));
  for (float& v : summary) v *= inv;
  return summary;
}

void StubModel::step(std::span<const float> summary,
                     std::span<const std::uint32_t> prefix_ids, std::span<float> repr_out,
                     std::span<float> dist_out) const {
  if (summary.size() != summary_dim()) {
    throw Error("stub step: summary dim " + std::to_string(summary.size()) +
                " does not match model summary dim " + std::to_string(summary_dim()));
  }
  if (prefix_ids.empty() || prefix_ids.front() != Vocabulary::kBos) {
    throw Error("stub step: prefix must begin with BOS");
  }
  if (repr_out.size() != cfg_.repr_dim || dist_out.size() != vocab_.size()) {
    throw Error("stub step: bad output span sizes");
  }

  const std::size_t t = prefix_ids.size() - 1;  // target position being predicted

  std::vector<float> unit(slot_dim_);
  std::fill(repr_out.begin(), repr_out.end(), 0.0f);
  if (t < cfg_.max_positions) {
    if (normalized_copy(slot(summary, t), unit.data())) {
      add_matvec(repr_out, proj_read_, slot_dim_, unit.data(), 1.0f);
    }
  }

  // Final prefix n-grams, n <= 3.
  std::vector<float> feat(slot_dim_, 0.0f);
  for (std::size_t n = 1; n <= 3 && n <= prefix_ids.size(); ++n) {
    std::uint64_t h = hash_combine(kTagPrefixNgram, n);
    for (std::size_t i = prefix_ids.size() - n; i < prefix_ids.size(); ++i) {
      h = hash_combine(h, prefix_ids[i]);
    }
    const float* row = prefix_table_.data() + bucket_of(h) * slot_dim_;
    for (std::size_t c = 0; c < slot_dim_; ++c) feat[c] += row[c];
  }
  if (normalized_copy({feat.data(), slot_dim_}, unit.data())) {
    add_matvec(repr_out, proj_prefix_, slot_dim_, unit.data(), kPrefixMix);
  }
  if (normalized_copy(global_region(summary), unit.data())) {
    add_matvec(repr_out, proj_global_, slot_dim_, unit.data(), kGlobalMix);
  }

  double n2 = 0.0;
  for (float v : repr_out) n2 += static_cast<double>(v) * v;
  const float scale = static_cast<float>(kReprScale / std::sqrt(std::max(n2, 1e-24)));
  for (float& v : repr_out) v *= scale;

  // Softmax of the output layer, stabilized in double.
  const std::size_t vsize = vocab_.size();
  std::vector<double> logits(vsize);
  double max_logit = -1e300;
  for (std::size_t y = 0; y < vsize; ++y) {
    const float* row = out_rows_.data() + y * cfg_.repr_dim;
    double s = out_bias_[y];
    for (std::size_t r = 0; r < cfg_.repr_dim; ++r) {
      s += static_cast<double>(row[r]) * repr_out[r];
    }
    logits[y] = s;
    max_logit = std::max(max_logit, s);
  }
  double total = 0.0;
  for (std::size_t y = 0; y < vsize; ++y) {
    logits[y] = std::exp(logits[y] - max_logit);
    total += logits[y];
  }
  for (std::size_t y = 0; y < vsize; ++y) {
    dist_out[y] = static_cast<float>(logits[y] / total);
  }
}

}  // namespace knnmt
