// Construction extraction: association-driven beam search over slot
// sequences, grammar-vs-corpus matching, MDL scoring, and MDL-based
// selection of the association threshold.

#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "cxg/association.hpp"

namespace cxg {

struct Construction {
  std::vector<SlotRep> slots;  // 3 <= length <= max_len
  // Provenance.
  int source_increment = -1;
  double score = 0.0;  // weakest transition at extraction

  std::string canonical() const;

  bool operator==(const Construction& o) const { return slots == o.slots; }
  bool operator<(const Construction& o) const { return slots < o.slots; }
};

struct InductionConfig {
  std::vector<double> threshold_grid;  // defaults to 0.05 .. 0.95 step 0.05
  int beam_width = 10;
  int max_len = 6;
  int min_count = 5;
  Direction direction = Direction::LR;

  InductionConfig();
};

struct Grammar {
  std::vector<Construction> constructions;  // sorted canonical, no duplicates
  // Config snapshot.
  double threshold = 0.0;
  int beam_width = 0;
  int max_len = 0;
  int min_count = 0;
  int source_increment = -1;

  bool contains(const Construction& c) const;
  std::vector<std::string> canonical_set() const;

  // Byte-stable canonical JSON; seed < 0 omits the field.
  std::string to_json(std::int64_t seed = -1) const;
  static Grammar from_json_file(const std::string& path);
};

struct MdlScore {
  double grammar_bits = 0.0;
  double data_bits = 0.0;
  double total = 0.0;
};

// From every token position, up to beam_width partial sequences grow by the
// representations of the next token whose transition delta-P clears the
// threshold; a partial's score is its weakest transition. When a partial can
// no longer extend (or hits max_len) every prefix of length >= 3 is emitted
// as a candidate at that start position. Candidates extracted from fewer
// than min_count positions are discarded.
std::vector<Construction> beam_extract(const AnnotatedText& annotated, const PairCounts& counts,
                                       double threshold, int beam_width, int max_len,
                                       int min_count, Direction direction = Direction::LR);

struct MatchResult {
  std::vector<std::pair<std::size_t, std::size_t>> matches;  // (construction index, start)
  std::vector<bool> covered;                                 // per token
  std::size_t covered_tokens = 0;
};

// Greedy leftmost-longest cover; a slot holds of a token when the token's
// representation at that level equals the slot id. Matches never span
// segment boundaries.
MatchResult match(const Grammar& grammar, const AnnotatedText& annotated);

// Two-part cost: each slot costs 2 bits for its level plus log2 of the level
// inventory; the corpus is a symbol stream where construction matches and
// uncovered tokens each cost log2(|G| + |V|) bits.
MdlScore mdl_score(const Grammar& grammar, const AnnotatedText& annotated);

struct ThresholdSelection {
  double threshold = 0.0;
  Grammar grammar;
  std::vector<std::pair<double, MdlScore>> trace;  // per grid point
};

// Minimal total MDL over the grid; ties go to the larger threshold. The
// winning grammar is kept as extracted (no post-hoc pruning).
ThresholdSelection select_threshold(const AnnotatedText& annotated, const PairCounts& counts,
                                    const std::vector<double>& grid, const InductionConfig& cfg);

// annotate -> count_pairs -> select_threshold for one increment.
Grammar induce(const Increment& increment, const TagLexicon& lexicon, const DomainModel& domains,
               const InductionConfig& cfg);

}  // namespace cxg
