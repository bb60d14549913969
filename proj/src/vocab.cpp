#include "knnmt/vocab.hpp"

namespace knnmt {

Vocabulary Vocabulary::synthetic(std::size_t content_count) {
  Vocabulary v;
  v.tokens_ = {"<pad>", "<s>", "</s>", "<unk>"};
  v.tokens_.reserve(kNumReserved + content_count);
  for (std::size_t i = 0; i < content_count; ++i) {
    v.tokens_.push_back(content_token_name(i));
  }
  for (std::uint32_t i = 0; i < v.tokens_.size(); ++i) v.by_token_[v.tokens_[i]] = i;
  return v;
}

std::uint32_t Vocabulary::id(const std::string& token) const {
  auto it = by_token_.find(token);
  return it == by_token_.end() ? kUnk : it->second;
}

const std::string& Vocabulary::token(std::uint32_t id) const {
  if (id >= tokens_.size()) throw Error("vocabulary: id out of range");
  return tokens_[id];
}

std::vector<std::uint32_t> Vocabulary::encode(std::span<const std::string> tokens) const {
  std::vector<std::uint32_t> ids;
  ids.reserve(tokens.size());
  for (const std::string& t : tokens) ids.push_back(id(t));
  return ids;
}

std::vector<std::string> Vocabulary::decode(std::span<const std::uint32_t> ids) const {
  std::vector<std::string> tokens;
  tokens.reserve(ids.size());
  for (std::uint32_t i : ids) tokens.push_back(token(i));
  return tokens;
}

}  // namespace knnmt
