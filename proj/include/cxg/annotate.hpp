// Three-level token annotation: lexical form, universal POS tag, and a
// semantic domain id from k-means clustering of word embeddings.

#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxg/corpus.hpp"
#include "cxg/upos.hpp"

namespace cxg {

inline constexpr int32_t kNoDomain = -1;

struct AnnotatedToken {
  std::string lex;          // lowercased word form
  Upos pos = Upos::X;
  int32_t sem = kNoDomain;  // >= 0 only for open-class words with a domain
};

// Annotated increment with document-span boundaries preserved; adjacent-pair
// statistics and construction matching never cross a segment boundary.
struct AnnotatedText {
  std::vector<AnnotatedToken> tokens;
  std::vector<std::pair<std::size_t, std::size_t>> segments;  // [begin, end)
};

struct EmbeddingTable {
  std::vector<std::string> vocabulary;  // unique, first occurrence wins
  std::vector<std::vector<double>> vectors;
  std::size_t dim = 0;

  const std::vector<double>* find(const std::string& word) const;

 private:
  mutable std::unordered_map<std::string, std::size_t> index_;
  mutable bool indexed_ = false;
};

// Textual vector format: optional "<count> <dim>" header, then one line per
// word: the word followed by dim floats.
EmbeddingTable load_embeddings(const std::string& path);

struct DomainModel {
  int k = 0;  // 0 = no semantic level in this run
  std::size_t dim = 0;
  std::vector<std::vector<double>> centroids;
  std::map<std::string, int32_t> assignment;  // word -> cluster id in [0, k)
  bool k_clamped = false;                     // k was reduced to the number of distinct vectors
  std::vector<double> wcss_trace;             // within-cluster sum of squares per iteration

  int32_t domain_of(const std::string& word) const {
    auto it = assignment.find(word);
    return it == assignment.end() ? kNoDomain : it->second;
  }

  std::string to_json() const;
  static DomainModel from_json_file(const std::string& path);
};

// One global model per run: k = ceil(|covered vocabulary| / 1000), seeded
// k-means++ init, Euclidean distance, <= 300 iterations or centroid movement
// below 1e-6.
DomainModel fit_domains(const EmbeddingTable& emb, const std::vector<std::string>& corpus_vocab,
                        std::uint64_t rng_seed);

class TagLexicon {
 public:
  TagLexicon() = default;

  // Lookup order: exact word, longest matching suffix rule, default NOUN.
  Upos tag(const std::string& word) const;

  void add_word(const std::string& word, Upos tag) { words_[word] = tag; }
  void add_suffix_rule(const std::string& suffix, Upos tag);

  // Most-frequent-tag lexicon from gold (token, tag) material.
  static TagLexicon build_from_tagged(const std::vector<Document>& docs);

  // TSV file: "word<TAB>TAG" entries; lines starting with '-' are suffix
  // rules ("-ing<TAB>VERB").
  static TagLexicon from_file(const std::string& path);

  // Small built-in English suffix fallback set.
  static TagLexicon with_default_rules();

  std::size_t word_count() const { return words_.size(); }

 private:
  std::unordered_map<std::string, Upos> words_;
  std::vector<std::pair<std::string, Upos>> suffix_rules_;  // longest first
};

std::vector<Upos> tag_pos(const std::vector<std::string>& tokens, const TagLexicon& lexicon);

// Pretagged increments keep their tags; otherwise the lexicon tagger runs.
// sem is NONE for closed-class tags and for words absent from the model.
AnnotatedText annotate_increment(const Increment& increment, const TagLexicon& lexicon,
                                 const DomainModel& domains);

}  // namespace cxg
