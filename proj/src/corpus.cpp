#include "knnmt/corpus.hpp"

#include <fstream>
#include <sstream>

#include "knnmt/io_util.hpp"

namespace knnmt {

std::vector<std::string> split_whitespace(const std::string& line) {
  std::vector<std::string> tokens;
  std::istringstream in(line);
  std::string tok;
  while (in >> tok) tokens.push_back(std::move(tok));
  return tokens;
}

std::vector<SentencePair> load_corpus_tsv(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw IoError(IoError::Kind::OpenFailed, "cannot open corpus: " + path.string());
  std::vector<SentencePair> corpus;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw Error("corpus " + path.string() + " line " + std::to_string(line_no) +
                  ": expected 'source TAB target'");
    }
    SentencePair pair;
    pair.source = split_whitespace(line.substr(0, tab));
    pair.target = split_whitespace(line.substr(tab + 1));
    corpus.push_back(std::move(pair));
  }
  return corpus;
}

void save_corpus_tsv(const std::vector<SentencePair>& corpus,
                     const std::filesystem::path& path) {
  auto out = io::open_output(path);
  for (const SentencePair& pair : corpus) {
    std::string line;
    for (std::size_t i = 0; i < pair.source.size(); ++i) {
      if (i) line += ' ';
      line += pair.source[i];
    }
    line += '\t';
    for (std::size_t i = 0; i < pair.target.size(); ++i) {
      if (i) line += ' ';
      line += pair.target[i];
    }
    line += '\n';
    out.write(line.data(), static_cast<std::streamsize>(line.size()));
  }
  if (!out) throw IoError(IoError::Kind::WriteFailed, "failed writing " + path.string());
}

std::vector<std::vector<std::string>> reference_tokens(
    const std::vector<SentencePair>& corpus) {
  std::vector<std::vector<std::string>> refs;
  refs.reserve(corpus.size());
  for (const SentencePair& pair : corpus) {
    std::vector<std::string> ref = pair.target;
    if (!ref.empty() && ref.back() == "</s>") ref.pop_back();
    refs.push_back(std::move(ref));
  }
  return refs;
}

std::vector<std::vector<std::string>> source_tokens(const std::vector<SentencePair>& corpus) {
  std::vector<std::vector<std::string>> out;
  out.reserve(corpus.size());
  for (const SentencePair& pair : corpus) out.push_back(pair.source);
  return out;
}

}  // namespace knnmt
