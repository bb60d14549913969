#include "knnmt/model.hpp"

#include "knnmt/corpus.hpp"

namespace knnmt {

Datastore build_datastore(const std::vector<SentencePair>& corpus, const BaseModel& model) {
  if (corpus.empty()) throw Error("build_datastore: corpus is empty");
  const Vocabulary& vocab = model.vocab();

  Datastore ds;
  ds.dim = static_cast<std::uint32_t>(model.repr_dim());

  std::vector<float> repr(model.repr_dim());
  std::vector<float> dist(vocab.size());
  std::vector<std::uint32_t> prefix;

  for (std::size_t s = 0; s < corpus.size(); ++s) {
    const SentencePair& pair = corpus[s];
    for (const std::string& tok : pair.target) {
      if (!vocab.contains(tok)) {
        throw Error("build_datastore: sentence " + std::to_string(s) + ": target token '" +
                    tok + "' outside model vocabulary");
      }
    }
    const std::vector<std::uint32_t> source_ids = vocab.encode(pair.source);
    const std::vector<float> summary = model.encode(source_ids);

    prefix.assign(1, Vocabulary::kBos);
    for (const std::string& tok : pair.target) {
      model.step(summary, prefix, repr, dist);
      const std::uint32_t y = vocab.id(tok);
      ds.append(repr, y);
      prefix.push_back(y);
    }
  }
  return ds;
}

}  // namespace knnmt
