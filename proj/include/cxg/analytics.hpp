// Set-level operations over grammars and lexicons: cumulative unions for
// growth curves, Jaccard distances, and pair sampling for the convergence
// experiment.

#pragma once

#include <cstdint>
#include <set>
#include <string>
#include <vector>

namespace cxg {

enum class CurveKind { kLexicon, kGrammar };

std::string to_string(CurveKind k);

struct GrowthCurve {
  std::vector<std::pair<std::int64_t, double>> points;  // (tokens observed, cumulative types)
  CurveKind kind = CurveKind::kLexicon;
  std::string condition;
};

struct DistanceSample {
  std::string condition;
  std::string register_id;
  std::size_t i = 0;
  std::size_t j = 0;
  double distance = 0.0;
};

using TypeSet = std::set<std::string>;

// Point k is (k * token_step, |union of the first k sets|).
GrowthCurve cumulative_union(const std::vector<TypeSet>& items_per_increment,
                             std::int64_t token_step);

// 1 - |a n b| / |a u b|; both empty -> 0.
double jaccard_distance(const TypeSet& a, const TypeSet& b);

// Unordered pairs i != j, sampled without replacement until the pair pool is
// exhausted, then with replacement; every sample carries its distance.
std::vector<DistanceSample> sample_pairs(const std::vector<TypeSet>& grammars,
                                         std::size_t n_pairs, std::uint64_t rng_seed);

}  // namespace cxg
