#include "cxg/analytics.hpp"

#include <algorithm>

#include "cxg/errors.hpp"
#include "cxg/rng.hpp"

namespace cxg {

std::string to_string(CurveKind k) {
  return k == CurveKind::kLexicon ? "lexicon" : "grammar";
}

GrowthCurve cumulative_union(const std::vector<TypeSet>& items_per_increment,
                             std::int64_t token_step) {
  if (items_per_increment.empty()) throw DataError("cumulative_union over an empty list");
  GrowthCurve curve;
  TypeSet acc;
  std::int64_t tokens = 0;
  for (const auto& s : items_per_increment) {
    acc.insert(s.begin(), s.end());
    tokens += token_step;
    curve.points.emplace_back(tokens, static_cast<double>(acc.size()));
  }
  return curve;
}

double jaccard_distance(const TypeSet& a, const TypeSet& b) {
  if (a.empty() && b.empty()) return 0.0;
  std::size_t inter = 0;
  auto ia = a.begin();
  auto ib = b.begin();
  while (ia != a.end() && ib != b.end()) {
    if (*ia < *ib) {
      ++ia;
    } else if (*ib < *ia) {
      ++ib;
    } else {
      ++inter;
      ++ia;
      ++ib;
    }
  }
  const std::size_t uni = a.size() + b.size() - inter;
  return 1.0 - static_cast<double>(inter) / static_cast<double>(uni);
}

std::vector<DistanceSample> sample_pairs(const std::vector<TypeSet>& grammars,
                                         std::size_t n_pairs, std::uint64_t rng_seed) {
  if (grammars.size() < 2) throw DataError("sample_pairs needs at least 2 grammars");
  if (n_pairs < 1) throw ConfigError("n_pairs must be >= 1");

  std::vector<std::pair<std::size_t, std::size_t>> pool;
  for (std::size_t i = 0; i < grammars.size(); ++i) {
    for (std::size_t j = i + 1; j < grammars.size(); ++j) pool.emplace_back(i, j);
  }
  Rng rng(rng_seed);
  rng.shuffle(pool);

  std::vector<DistanceSample> out;
  out.reserve(n_pairs);
  for (std::size_t k = 0; k < n_pairs; ++k) {
    std::pair<std::size_t, std::size_t> p;
    if (k < pool.size()) {
      p = pool[k];
    } else {
      // Pool exhausted: continue with replacement.
      p = pool[rng.below(pool.size())];
    }
    DistanceSample s;
    s.i = p.first;
    s.j = p.second;
    s.distance = jaccard_distance(grammars[p.first], grammars[p.second]);
    out.push_back(std::move(s));
  }
  return out;
}

}  // namespace cxg
