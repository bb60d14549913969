#pragma once

#include <cstdint>
#include <span>
#include <string>
#include <unordered_map>
#include <vector>

#include "knnmt/common.hpp"

namespace knnmt {

/// Token <-> id table with fixed reserved ids for PAD/BOS/EOS/UNK.
class Vocabulary {
 public:
  static constexpr std::uint32_t kPad = 0;
  static constexpr std::uint32_t kBos = 1;
  static constexpr std::uint32_t kEos = 2;
  static constexpr std::uint32_t kUnk = 3;
  static constexpr std::uint32_t kNumReserved = 4;

  /// Reserved tokens plus content tokens "w0".."w{n-1}".
  static Vocabulary synthetic(std::size_t content_count);

  std::size_t size() const { return tokens_.size(); }
  std::size_t content_count() const { return tokens_.size() - kNumReserved; }

  /// kUnk for tokens not in the table.
  std::uint32_t id(const std::string& token) const;
  const std::string& token(std::uint32_t id) const;
  bool contains(const std::string& token) const { return by_token_.count(token) != 0; }

  bool is_content(std::uint32_t id) const { return id >= kNumReserved && id < size(); }
  std::uint32_t content_id(std::size_t content_index) const {
    return kNumReserved + static_cast<std::uint32_t>(content_index);
  }
  std::size_t content_index(std::uint32_t id) const { return id - kNumReserved; }

  std::vector<std::uint32_t> encode(std::span<const std::string> tokens) const;
  std::vector<std::string> decode(std::span<const std::uint32_t> ids) const;

 private:
  std::vector<std::string> tokens_;
  std::unordered_map<std::string, std::uint32_t> by_token_;
};

/// Naming convention for synthetic content tokens.
inline std::string content_token_name(std::size_t i) { return "w" + std::to_string(i); }

}  // namespace knnmt
