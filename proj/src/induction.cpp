#include "cxg/induction.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <map>
#include <set>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"

namespace cxg {

InductionConfig::InductionConfig() {
  for (int i = 1; i <= 19; ++i) threshold_grid.push_back(i * 0.05);
}

std::string Construction::canonical() const {
  std::string s;
  for (const auto& slot : slots) {
    if (!s.empty()) s += '+';
    s += slot.canonical();
  }
  return s;
}

bool Grammar::contains(const Construction& c) const {
  return std::binary_search(constructions.begin(), constructions.end(), c);
}

std::vector<std::string> Grammar::canonical_set() const {
  std::vector<std::string> out;
  out.reserve(constructions.size());
  for (const auto& c : constructions) out.push_back(c.canonical());
  return out;
}

// ---------------------------------------------------------------------------
// Beam extraction
// ---------------------------------------------------------------------------

namespace {

struct DpCache {
  const PairCounts& counts;
  Direction dir;
  std::unordered_map<std::pair<SlotRep, SlotRep>, double, SlotRepPairHash> memo;

  double get(const SlotRep& a, const SlotRep& b) {
    auto key = std::make_pair(a, b);
    auto it = memo.find(key);
    if (it != memo.end()) return it->second;
    const double v = delta_p(counts, a, b, dir);
    memo.emplace(std::move(key), v);
    return v;
  }
};

struct Partial {
  std::vector<SlotRep> slots;
  double score;  // min transition delta-P; +inf before the first transition
};

// Beam order: stronger score first, then lexicographically smaller slot
// sequence (level order LEX < SEM < POS realizes the level preference).
bool beam_less(const Partial& a, const Partial& b) {
  if (a.score != b.score) return a.score > b.score;
  return a.slots < b.slots;
}

void extract_impl(const AnnotatedText& annotated,
                  const std::vector<std::vector<SlotRep>>& reps, DpCache& dp, double threshold,
                  int beam_width, int max_len,
                  std::map<std::vector<SlotRep>, std::pair<std::uint64_t, double>>& tally) {
  std::vector<Partial> live, next;
  std::vector<std::vector<SlotRep>> emitted;  // per start position, deduped

  for (const auto& [seg_begin, seg_end] : annotated.segments) {
    for (std::size_t start = seg_begin; start < seg_end; ++start) {
      live.clear();
      emitted.clear();
      for (const auto& r : reps[start]) {
        live.push_back(Partial{{r}, std::numeric_limits<double>::infinity()});
      }
      if (live.size() > static_cast<std::size_t>(beam_width)) {
        std::sort(live.begin(), live.end(), beam_less);
        live.resize(beam_width);
      }

      std::size_t pos = start + 1;  // position of the next token to absorb
      while (!live.empty()) {
        next.clear();
        const bool can_grow =
            pos < seg_end && static_cast<int>(live.front().slots.size()) < max_len;
        for (auto& p : live) {
          bool grew = false;
          if (can_grow) {
            for (const auto& r : reps[pos]) {
              const double v = dp.get(p.slots.back(), r);
              if (v >= threshold) {
                Partial q;
                q.slots = p.slots;
                q.slots.push_back(r);
                q.score = std::min(p.score, v);
                next.push_back(std::move(q));
                grew = true;
              }
            }
          }
          if (!grew && p.slots.size() >= 3) {
            // Terminated: every prefix of length >= 3 is a candidate here.
            for (std::size_t len = 3; len <= p.slots.size(); ++len) {
              emitted.emplace_back(p.slots.begin(), p.slots.begin() + len);
            }
          }
        }
        std::sort(next.begin(), next.end(), beam_less);
        if (next.size() > static_cast<std::size_t>(beam_width)) next.resize(beam_width);
        live.swap(next);
        ++pos;
      }

      std::sort(emitted.begin(), emitted.end());
      emitted.erase(std::unique(emitted.begin(), emitted.end()), emitted.end());
      for (auto& e : emitted) {
        auto& entry = tally[e];
        entry.first += 1;
      }
    }
  }
}

// Records the weakest-link score per candidate for provenance.
void record_scores(DpCache& dp,
                   std::map<std::vector<SlotRep>, std::pair<std::uint64_t, double>>& tally) {
  for (auto& [slots, entry] : tally) {
    double score = std::numeric_limits<double>::infinity();
    for (std::size_t i = 0; i + 1 < slots.size(); ++i) {
      score = std::min(score, dp.get(slots[i], slots[i + 1]));
    }
    entry.second = score;
  }
}

std::vector<Construction> finish_extraction(
    std::map<std::vector<SlotRep>, std::pair<std::uint64_t, double>>& tally, int min_count) {
  std::vector<Construction> out;
  for (auto& [slots, entry] : tally) {
    if (entry.first < static_cast<std::uint64_t>(std::max(1, min_count))) continue;
    Construction c;
    c.slots = slots;
    c.score = entry.second;
    out.push_back(std::move(c));
  }
  std::sort(out.begin(), out.end());
  return out;
}

std::vector<std::vector<SlotRep>> precompute_reps(const AnnotatedText& annotated) {
  std::vector<std::vector<SlotRep>> reps;
  reps.reserve(annotated.tokens.size());
  for (const auto& t : annotated.tokens) reps.push_back(token_reps(t));
  return reps;
}

}  // namespace

std::vector<Construction> beam_extract(const AnnotatedText& annotated, const PairCounts& counts,
                                       double threshold, int beam_width, int max_len,
                                       int min_count, Direction direction) {
  if (threshold < -1.0 || threshold > 1.0) throw ConfigError("threshold must lie in [-1, 1]");
  if (beam_width < 1) throw ConfigError("beam_width must be >= 1");
  if (max_len < 3) throw ConfigError("max_len must be >= 3");

  const auto reps = precompute_reps(annotated);
  DpCache dp{counts, direction, {}};
  std::map<std::vector<SlotRep>, std::pair<std::uint64_t, double>> tally;
  extract_impl(annotated, reps, dp, threshold, beam_width, max_len, tally);
  record_scores(dp, tally);
  return finish_extraction(tally, min_count);
}

// ---------------------------------------------------------------------------
// Matching
// ---------------------------------------------------------------------------

namespace {

bool slot_holds(const SlotRep& slot, const AnnotatedToken& t) {
  switch (slot.level) {
    case Level::LEX:
      return slot.id == t.lex;
    case Level::POS:
      return slot.id == to_string(t.pos);
    case Level::SEM:
      return t.sem != kNoDomain && slot.id == std::to_string(t.sem);
  }
  return false;
}

}  // namespace

MatchResult match(const Grammar& grammar, const AnnotatedText& annotated) {
  MatchResult res;
  res.covered.assign(annotated.tokens.size(), false);
  if (grammar.constructions.empty()) return res;

  // Constructions indexed by first slot, longest first within a bucket.
  std::unordered_map<SlotRep, std::vector<std::size_t>, SlotRepHash> by_first;
  for (std::size_t i = 0; i < grammar.constructions.size(); ++i) {
    by_first[grammar.constructions[i].slots.front()].push_back(i);
  }
  auto longer_first = [&](std::size_t a, std::size_t b) {
    const auto& ca = grammar.constructions[a];
    const auto& cb = grammar.constructions[b];
    if (ca.slots.size() != cb.slots.size()) return ca.slots.size() > cb.slots.size();
    return a < b;  // grammar order is canonical
  };
  for (auto& [slot, bucket] : by_first) std::sort(bucket.begin(), bucket.end(), longer_first);

  std::vector<std::size_t> candidates;
  for (const auto& [seg_begin, seg_end] : annotated.segments) {
    std::size_t i = seg_begin;
    while (i < seg_end) {
      candidates.clear();
      for (const auto& r : token_reps(annotated.tokens[i])) {
        auto it = by_first.find(r);
        if (it != by_first.end()) {
          candidates.insert(candidates.end(), it->second.begin(), it->second.end());
        }
      }
      std::sort(candidates.begin(), candidates.end(), longer_first);

      std::size_t advanced = 0;
      for (auto ci : candidates) {
        const auto& slots = grammar.constructions[ci].slots;
        if (i + slots.size() > seg_end) continue;
        bool ok = true;
        for (std::size_t j = 0; j < slots.size(); ++j) {
          if (!slot_holds(slots[j], annotated.tokens[i + j])) {
            ok = false;
            break;
          }
        }
        if (ok) {
          res.matches.emplace_back(ci, i);
          for (std::size_t j = 0; j < slots.size(); ++j) res.covered[i + j] = true;
          res.covered_tokens += slots.size();
          advanced = slots.size();
          break;
        }
      }
      i += advanced ? advanced : 1;
    }
  }
  return res;
}

// ---------------------------------------------------------------------------
// MDL
// ---------------------------------------------------------------------------

MdlScore mdl_score(const Grammar& grammar, const AnnotatedText& annotated) {
  std::unordered_set<std::string> lex_types;
  std::unordered_set<int32_t> sem_types;
  for (const auto& t : annotated.tokens) {
    lex_types.insert(t.lex);
    if (t.sem != kNoDomain) sem_types.insert(t.sem);
  }
  const double lex_inv = static_cast<double>(std::max<std::size_t>(1, lex_types.size()));
  const double sem_inv = static_cast<double>(std::max<std::size_t>(1, sem_types.size()));
  const double pos_inv = static_cast<double>(kUposCount);

  MdlScore s;
  for (const auto& c : grammar.constructions) {
    for (const auto& slot : c.slots) {
      double inv = pos_inv;
      if (slot.level == Level::LEX) inv = lex_inv;
      if (slot.level == Level::SEM) inv = sem_inv;
      s.grammar_bits += 2.0 + std::log2(inv);
    }
  }

  const auto m = match(grammar, annotated);
  const double symbol_bits =
      std::log2(std::max(1.0, static_cast<double>(grammar.constructions.size()) + lex_inv));
  const std::size_t uncovered = annotated.tokens.size() - m.covered_tokens;
  s.data_bits = (static_cast<double>(m.matches.size()) + static_cast<double>(uncovered)) * symbol_bits;
  s.total = s.grammar_bits + s.data_bits;
  return s;
}

// ---------------------------------------------------------------------------
// Threshold selection / induction
// ---------------------------------------------------------------------------

ThresholdSelection select_threshold(const AnnotatedText& annotated, const PairCounts& counts,
                                    const std::vector<double>& grid, const InductionConfig& cfg) {
  if (grid.empty()) throw ConfigError("threshold grid must be nonempty");
  for (double t : grid) {
    if (t < -1.0 || t > 1.0) throw ConfigError("threshold grid values must lie in [-1, 1]");
  }

  const auto reps = precompute_reps(annotated);
  DpCache dp{counts, cfg.direction, {}};

  ThresholdSelection sel;
  bool have_best = false;
  double best_total = 0.0;

  for (double t : grid) {
    std::map<std::vector<SlotRep>, std::pair<std::uint64_t, double>> tally;
    extract_impl(annotated, reps, dp, t, cfg.beam_width, cfg.max_len, tally);
    record_scores(dp, tally);

    Grammar g;
    g.constructions = finish_extraction(tally, cfg.min_count);
    g.threshold = t;
    g.beam_width = cfg.beam_width;
    g.max_len = cfg.max_len;
    g.min_count = cfg.min_count;

    const MdlScore score = mdl_score(g, annotated);
    sel.trace.emplace_back(t, score);
    if (!have_best || score.total < best_total ||
        (score.total == best_total && t > sel.threshold)) {
      have_best = true;
      best_total = score.total;
      sel.threshold = t;
      sel.grammar = std::move(g);
    }
  }
  return sel;
}

Grammar induce(const Increment& increment, const TagLexicon& lexicon, const DomainModel& domains,
               const InductionConfig& cfg) {
  const AnnotatedText annotated = annotate_increment(increment, lexicon, domains);
  const PairCounts counts = count_pairs(annotated);
  ThresholdSelection sel = select_threshold(annotated, counts, cfg.threshold_grid, cfg);
  Grammar g = std::move(sel.grammar);
  g.source_increment = increment.index;
  for (auto& c : g.constructions) c.source_increment = increment.index;
  return g;
}

// ---------------------------------------------------------------------------
// Serialization
// ---------------------------------------------------------------------------

std::string Grammar::to_json(std::int64_t seed) const {
  nlohmann::ordered_json j;
  nlohmann::ordered_json cfg;
  cfg["threshold"] = threshold;
  cfg["beam_width"] = beam_width;
  cfg["max_len"] = max_len;
  cfg["min_count"] = min_count;
  j["config"] = std::move(cfg);
  j["source_increment"] = source_increment;
  if (seed >= 0) j["seed"] = seed;
  nlohmann::ordered_json arr = nlohmann::ordered_json::array();
  for (const auto& c : constructions) arr.push_back(c.canonical());
  j["constructions"] = std::move(arr);
  return j.dump(2) + "\n";
}

namespace {

SlotRep parse_slot(const std::string& s) {
  const auto colon = s.find(':');
  if (colon == std::string::npos) throw DataError("malformed slot: " + s);
  const std::string level = s.substr(0, colon);
  SlotRep r;
  r.id = s.substr(colon + 1);
  if (level == "LEX") {
    r.level = Level::LEX;
  } else if (level == "SEM") {
    r.level = Level::SEM;
  } else if (level == "POS") {
    r.level = Level::POS;
  } else {
    throw DataError("malformed slot level: " + s);
  }
  return r;
}

}  // namespace

Grammar Grammar::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read grammar: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("malformed grammar file: " + path);
  Grammar g;
  if (j.contains("config")) {
    const auto& c = j["config"];
    g.threshold = c.value("threshold", 0.0);
    g.beam_width = c.value("beam_width", 0);
    g.max_len = c.value("max_len", 0);
    g.min_count = c.value("min_count", 0);
  }
  g.source_increment = j.value("source_increment", -1);
  for (const auto& s : j.value("constructions", nlohmann::json::array())) {
    Construction c;
    std::string spec = s.get<std::string>();
    std::size_t pos = 0;
    while (pos != std::string::npos) {
      const auto plus = spec.find('+', pos);
      const std::string part =
          plus == std::string::npos ? spec.substr(pos) : spec.substr(pos, plus - pos);
      c.slots.push_back(parse_slot(part));
      pos = plus == std::string::npos ? std::string::npos : plus + 1;
    }
    c.source_increment = g.source_increment;
    g.constructions.push_back(std::move(c));
  }
  std::sort(g.constructions.begin(), g.constructions.end());
  return g;
}

}  // namespace cxg
