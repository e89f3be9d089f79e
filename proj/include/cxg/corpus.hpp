// Corpus ingestion, tokenization, and partitioning into fixed-size
// training increments under production / perception / background policies.

#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include "cxg/upos.hpp"

namespace cxg {

enum class CorpusFormat { kPlainLines, kJsonlDocs, kTaggedConlluLike };

std::optional<CorpusFormat> corpus_format_from_string(const std::string& s);
std::string to_string(CorpusFormat f);

enum class Condition { kProduction, kPerception, kBackground };

std::optional<Condition> condition_from_string(const std::string& s);
std::string to_string(Condition c);

struct Document {
  std::string doc_id;
  std::string author_id;  // empty = unknown
  std::string venue_id;   // empty = none
  std::string text;

  // Tagged input only: the raw token / tag columns, preserved verbatim so
  // they survive to annotation (and re-emission) unchanged.
  std::vector<std::string> raw_tokens;
  std::vector<Upos> raw_tags;

  bool pretagged() const { return !raw_tags.empty(); }

  // Word tokens in final (lowercased, punctuation-dropped) form, plus the
  // surviving tags when pretagged. Cached on first use.
  const std::vector<std::string>& word_tokens() const;
  const std::vector<Upos>& word_tags() const;

 private:
  void materialize() const;
  mutable bool materialized_ = false;
  mutable std::vector<std::string> tokens_;
  mutable std::vector<Upos> tags_;
};

// Unicode-aware word segmentation: maximal runs of letters/digits with
// word-internal apostrophes (between letters) and comma/period (between
// digits); output lowercased; tokens without any letter or digit never form.
std::vector<std::string> tokenize(const std::string& text);

std::vector<Document> load_corpus(const std::string& path, CorpusFormat format);

// Re-emits documents in the tagged format (token<TAB>UPOS lines under
// "# newdoc id = ..." headers). Round-trips with load_corpus.
void write_tagged_corpus(const std::vector<Document>& docs, const std::string& path);

enum class PartitionMode { kByIndividual, kAggregate };

struct PartitionPolicy {
  PartitionMode mode = PartitionMode::kAggregate;
  std::optional<int64_t> per_author_word_cap;  // >= 1 when present
  std::optional<int64_t> per_venue_doc_cap;    // >= 1 when present
  int64_t increment_size = 100000;             // tokens
};

// Contiguous slice of one document's token stream placed in one increment.
// begin/end index into the increment's token vector; doc_token_begin is the
// offset of the slice within the source document.
struct DocSpan {
  std::string doc_id;
  std::size_t begin = 0;
  std::size_t end = 0;
  std::size_t doc_token_begin = 0;
};

struct Increment {
  int index = 0;
  Condition condition = Condition::kBackground;
  std::vector<std::string> tokens;
  std::vector<Upos> tags;  // parallel to tokens; empty when untagged
  std::vector<DocSpan> spans;

  std::vector<std::string> source_docs() const;
  bool pretagged() const { return !tags.empty(); }
};

struct PartitionResult {
  std::vector<Increment> increments;
  int64_t total_usable_tokens = 0;  // every token of every eligible document
  int64_t discarded_tokens = 0;     // usable minus placed
};

// by_individual: one eligible author (>= increment_size tokens) per
// increment, authors in first-appearance order, stream truncated at the
// increment boundary. aggregate: seeded shuffle of documents, then greedy
// packing to exactly increment_size tokens per increment; the per-author
// word cap splits documents, the per-venue doc cap defers them.
PartitionResult partition(const std::vector<Document>& docs, const PartitionPolicy& policy,
                          Condition condition, std::uint64_t rng_seed);

// n_samples permutations of [0, n_increments); permutation 0 is the identity.
std::vector<std::vector<std::size_t>> sample_orderings(std::size_t n_increments,
                                                       std::size_t n_samples,
                                                       std::uint64_t rng_seed);

}  // namespace cxg
