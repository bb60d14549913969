#pragma once

#include <filesystem>
#include <string>
#include <vector>

#include "knnmt/common.hpp"

namespace knnmt {

struct SentencePair {
  std::vector<std::string> source;
  std::vector<std::string> target;
};

std::vector<std::string> split_whitespace(const std::string& line);

/// One sentence pair per line: source tokens TAB target tokens, whitespace
/// tokenization, UTF-8.
std::vector<SentencePair> load_corpus_tsv(const std::filesystem::path& path);
void save_corpus_tsv(const std::vector<SentencePair>& corpus,
                     const std::filesystem::path& path);

/// References for scoring: target tokens with a trailing "</s>" removed.
std::vector<std::vector<std::string>> reference_tokens(const std::vector<SentencePair>& corpus);
std::vector<std::vector<std::string>> source_tokens(const std::vector<SentencePair>& corpus);

}  // namespace knnmt
