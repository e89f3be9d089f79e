// Shared test support: independent oracles (never routed through the code
// under test) and synthetic corpus generators with known inventories.

#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include "cxg/analytics.hpp"
#include "cxg/annotate.hpp"
#include "cxg/association.hpp"
#include "cxg/corpus.hpp"

namespace cxgtest {

// RAII scratch directory under the system temp root.
class TempDir {
 public:
  explicit TempDir(const std::string& tag);
  ~TempDir();
  TempDir(const TempDir&) = delete;
  TempDir& operator=(const TempDir&) = delete;

  const std::filesystem::path& path() const { return path_; }
  std::string file(const std::string& name) const { return (path_ / name).string(); }

 private:
  std::filesystem::path path_;
};

// ---------------------------------------------------------------------------
// Oracles
// ---------------------------------------------------------------------------

// Independent word segmenter over the same rule set as cxg::tokenize
// (letters/digits as cores, apostrophe between letters, comma/period between
// digits, ASCII lowercasing). Separate decoder and scan strategy.
std::vector<std::string> reference_tokenize(const std::string& text);

// Nested-loop recount of adjacent-pair statistics.
cxg::PairCounts brute_force_counts(const cxg::AnnotatedText& annotated);

// Direct contingency-table delta-P over an annotated stream.
double brute_force_delta_p(const cxg::AnnotatedText& annotated, const cxg::SlotRep& a,
                           const cxg::SlotRep& b, cxg::Direction dir);

// Distinct-count of the first k sets via sorted merge.
std::size_t distinct_count(const std::vector<cxg::TypeSet>& sets, std::size_t k);

// ---------------------------------------------------------------------------
// Synthetic corpora with known construction inventories
// ---------------------------------------------------------------------------

struct PlantedCorpus {
  std::vector<cxg::Document> docs;  // pretagged, iid random tags
  std::vector<std::string> inventory;  // canonical forms of the planted constructions
};

// Word-trigram constructions over a uniform-random background. Pattern-word
// transitions carry delta-P around in_pattern_prob; background transitions
// sit near zero. Pattern words also occur in the background, and every
// token draws an iid random tag, so coarser levels stay uninformative.
PlantedCorpus make_planted_corpus(int n_patterns, std::int64_t total_tokens,
                                  std::uint64_t seed, double in_pattern_prob = 0.85,
                                  int background_vocab = 2000, int n_docs = 20);

// Concatenates pretagged documents into one annotated stream with one
// segment per document.
cxg::AnnotatedText annotated_from_docs(const std::vector<cxg::Document>& docs);

struct PopulationParams {
  int n_authors = 20;
  int pool_size = 60;          // shared construction pool
  int shared_per_author = 40;  // sampled per author from the pool
  int unique_per_author = 20;  // author-only constructions
  std::int64_t tokens_per_author = 12000;
  std::int64_t doc_tokens = 400;
  double pattern_event_prob = 0.214;  // ~45% of tokens inside patterns
  int background_vocab = 50000;
  double zipf_s = 1.2;
};

struct Population {
  std::string corpus_path;  // tagged format with author metadata
  std::vector<std::string> shared_pool;                     // canonical constructions
  std::vector<std::vector<std::string>> author_inventory;   // shared sample + uniques
};

// Authors share a construction pool and a Zipfian background vocabulary;
// each author adds private constructions that are unused word orders over
// the same shared words, so lexicons are statistically identical across
// conditions while grammars differ. Tags are iid random.
Population make_population(const std::string& dir, std::uint64_t seed,
                           const PopulationParams& params = {});

// Zipfian background plus a large Zipf-used construction inventory; stands
// in for natural text when no corpus is supplied. Tagged format, iid tags.
std::string make_naturalish_corpus(const std::string& dir, std::int64_t total_tokens,
                                   std::uint64_t seed);

// Single-segment annotated stream with the given lex forms, every token
// tagged NOUN and undomained.
cxg::AnnotatedText annotate_stream(const std::vector<std::string>& tokens);

}  // namespace cxgtest
