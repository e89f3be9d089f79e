#include "cxg/association.hpp"

#include <algorithm>
#include <fstream>

#include "cxg/errors.hpp"

namespace cxg {

std::string to_string(Level l) {
  switch (l) {
    case Level::LEX:
      return "LEX";
    case Level::SEM:
      return "SEM";
    case Level::POS:
      return "POS";
  }
  return "?";
}

std::vector<SlotRep> token_reps(const AnnotatedToken& t) {
  std::vector<SlotRep> reps;
  reps.reserve(3);
  reps.push_back(SlotRep{Level::LEX, t.lex});
  if (t.sem != kNoDomain) reps.push_back(SlotRep{Level::SEM, std::to_string(t.sem)});
  reps.push_back(SlotRep{Level::POS, std::string(to_string(t.pos))});
  return reps;
}

std::uint64_t PairCounts::pair_count(const SlotRep& a, const SlotRep& b) const {
  auto it = pairs.find({a, b});
  return it == pairs.end() ? 0 : it->second;
}

std::uint64_t PairCounts::first_count(const SlotRep& a) const {
  auto it = first_marginal.find(a);
  return it == first_marginal.end() ? 0 : it->second;
}

std::uint64_t PairCounts::second_count(const SlotRep& b) const {
  auto it = second_marginal.find(b);
  return it == second_marginal.end() ? 0 : it->second;
}

void PairCounts::merge(const PairCounts& other) {
  for (const auto& [k, v] : other.pairs) pairs[k] += v;
  for (const auto& [k, v] : other.first_marginal) first_marginal[k] += v;
  for (const auto& [k, v] : other.second_marginal) second_marginal[k] += v;
  n_pairs += other.n_pairs;
}

PairCounts count_pairs(const AnnotatedText& annotated) {
  PairCounts counts;
  for (const auto& [begin, end] : annotated.segments) {
    if (end - begin < 2) continue;
    auto prev_reps = token_reps(annotated.tokens[begin]);
    for (std::size_t i = begin + 1; i < end; ++i) {
      auto cur_reps = token_reps(annotated.tokens[i]);
      ++counts.n_pairs;
      for (const auto& a : prev_reps) counts.first_marginal[a] += 1;
      for (const auto& b : cur_reps) counts.second_marginal[b] += 1;
      for (const auto& a : prev_reps) {
        for (const auto& b : cur_reps) counts.pairs[{a, b}] += 1;
      }
      prev_reps = std::move(cur_reps);
    }
  }
  return counts;
}

double delta_p(const PairCounts& counts, const SlotRep& a, const SlotRep& b, Direction dir) {
  const double c = static_cast<double>(counts.pair_count(a, b));
  const double m1 = static_cast<double>(counts.first_count(a));
  const double m2 = static_cast<double>(counts.second_count(b));
  const double n = static_cast<double>(counts.n_pairs);

  double cue, cue_hit, other_hit;
  if (dir == Direction::LR) {
    cue = m1;
    cue_hit = c;
    other_hit = m2 - c;
  } else {
    cue = m2;
    cue_hit = c;
    other_hit = m1 - c;
  }
  const double p_given_cue = cue > 0.0 ? cue_hit / cue : 0.0;
  const double rest = n - cue;
  const double p_given_not = rest > 0.0 ? other_hit / rest : 0.0;
  return p_given_cue - p_given_not;
}

void dump_association_csv(const PairCounts& counts, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);

  std::vector<std::pair<SlotRep, SlotRep>> keys;
  keys.reserve(counts.pairs.size());
  for (const auto& [k, v] : counts.pairs) keys.push_back(k);
  std::sort(keys.begin(), keys.end());

  out << "level_a,id_a,level_b,id_b,count,dp_lr,dp_rl\n";
  char buf[64];
  for (const auto& [a, b] : keys) {
    out << to_string(a.level) << ',' << a.id << ',' << to_string(b.level) << ',' << b.id << ','
        << counts.pair_count(a, b) << ',';
    std::snprintf(buf, sizeof(buf), "%.6f", delta_p(counts, a, b, Direction::LR));
    out << buf << ',';
    std::snprintf(buf, sizeof(buf), "%.6f", delta_p(counts, a, b, Direction::RL));
    out << buf << '\n';
  }
}

}  // namespace cxg
