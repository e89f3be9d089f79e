// Contingency counts over adjacent representation pairs and the directional
// delta-P association measure that drives candidate extraction.

#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <unordered_map>
#include <vector>

#include "cxg/annotate.hpp"

namespace cxg {

enum class Level : std::uint8_t { LEX, SEM, POS };

std::string to_string(Level l);

// One slot constraint: an identifier at one representation level.
struct SlotRep {
  Level level = Level::LEX;
  std::string id;

  bool operator==(const SlotRep&) const = default;
  auto operator<=>(const SlotRep&) const = default;

  std::string canonical() const { return to_string(level) + ":" + id; }
};

struct SlotRepHash {
  std::size_t operator()(const SlotRep& r) const {
    return std::hash<std::string>{}(r.id) * 31u + static_cast<std::size_t>(r.level);
  }
};

struct SlotRepPairHash {
  std::size_t operator()(const std::pair<SlotRep, SlotRep>& p) const {
    return SlotRepHash{}(p.first) * 1000003u ^ SlotRepHash{}(p.second);
  }
};

// The 2-3 representations of one annotated token, most specific first.
std::vector<SlotRep> token_reps(const AnnotatedToken& t);

enum class Direction { LR, RL };

// For each adjacent token pair within a segment, every (rep of first, rep of
// second) combination counts once; marginals count once per pair per rep; N
// counts token pairs.
struct PairCounts {
  std::unordered_map<std::pair<SlotRep, SlotRep>, std::uint64_t, SlotRepPairHash> pairs;
  std::unordered_map<SlotRep, std::uint64_t, SlotRepHash> first_marginal;
  std::unordered_map<SlotRep, std::uint64_t, SlotRepHash> second_marginal;
  std::uint64_t n_pairs = 0;

  std::uint64_t pair_count(const SlotRep& a, const SlotRep& b) const;
  std::uint64_t first_count(const SlotRep& a) const;
  std::uint64_t second_count(const SlotRep& b) const;

  void merge(const PairCounts& other);
};

PairCounts count_pairs(const AnnotatedText& annotated);

// Directional delta-P. LR: P(b second | a first) - P(b second | a not first).
// RL mirrors with the second slot as the cue. Zero-denominator terms
// contribute zero.
double delta_p(const PairCounts& counts, const SlotRep& a, const SlotRep& b, Direction dir);

// CSV dump: level_a,id_a,level_b,id_b,count,dp_lr,dp_rl in canonical order.
void dump_association_csv(const PairCounts& counts, const std::string& path);

}  // namespace cxg
