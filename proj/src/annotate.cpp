#include "cxg/annotate.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <limits>
#include <sstream>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"
#include "cxg/rng.hpp"

namespace cxg {

// ---------------------------------------------------------------------------
// Embeddings
// ---------------------------------------------------------------------------

const std::vector<double>* EmbeddingTable::find(const std::string& word) const {
  if (!indexed_) {
    index_.reserve(vocabulary.size());
    for (std::size_t i = 0; i < vocabulary.size(); ++i) index_.emplace(vocabulary[i], i);
    indexed_ = true;
  }
  auto it = index_.find(word);
  return it == index_.end() ? nullptr : &vectors[it->second];
}

EmbeddingTable load_embeddings(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read embeddings file: " + path);

  EmbeddingTable table;
  std::unordered_set<std::string> seen;
  std::string line;
  std::size_t line_no = 0;
  bool first_content_line = true;

  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    std::istringstream ss(line);

    if (first_content_line) {
      // "<count> <dim>" header: exactly two integer fields.
      first_content_line = false;
      std::string a, b, extra;
      std::istringstream probe(line);
      if (probe >> a >> b && !(probe >> extra)) {
        char* end_a = nullptr;
        char* end_b = nullptr;
        (void)std::strtol(a.c_str(), &end_a, 10);
        const long dim = std::strtol(b.c_str(), &end_b, 10);
        if (*end_a == '\0' && *end_b == '\0') {
          if (dim < 1) throw DataError(path + ":1: bad header dimension");
          table.dim = static_cast<std::size_t>(dim);
          continue;
        }
      }
    }

    std::string word;
    if (!(ss >> word)) continue;
    std::vector<double> vec;
    double v;
    while (ss >> v) vec.push_back(v);
    if (vec.empty()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": no vector values for '" + word + "'");
    }
    if (table.dim == 0) table.dim = vec.size();
    if (vec.size() != table.dim) {
      throw DataError(path + ":" + std::to_string(line_no) + ": inconsistent dimension (" +
                      std::to_string(vec.size()) + " vs " + std::to_string(table.dim) + ")");
    }
    if (!seen.insert(word).second) continue;  // first occurrence wins
    table.vocabulary.push_back(std::move(word));
    table.vectors.push_back(std::move(vec));
  }
  if (table.vocabulary.empty()) throw DataError("empty embeddings file: " + path);
  return table;
}

// ---------------------------------------------------------------------------
// Semantic domains (k-means)
// ---------------------------------------------------------------------------

namespace {

double sq_dist(const std::vector<double>& a, const std::vector<double>& b) {
  double s = 0.0;
  for (std::size_t i = 0; i < a.size(); ++i) {
    const double d = a[i] - b[i];
    s += d * d;
  }
  return s;
}

}  // namespace

DomainModel fit_domains(const EmbeddingTable& emb, const std::vector<std::string>& corpus_vocab,
                        std::uint64_t rng_seed) {
  // Covered vocabulary in sorted order so the fit is independent of the
  // caller's vocabulary ordering.
  std::vector<std::string> covered;
  for (const auto& w : corpus_vocab) {
    if (emb.find(w) != nullptr) covered.push_back(w);
  }
  std::sort(covered.begin(), covered.end());
  covered.erase(std::unique(covered.begin(), covered.end()), covered.end());
  if (covered.empty()) throw DataError("no corpus word is covered by the embedding table");

  std::vector<const std::vector<double>*> points;
  points.reserve(covered.size());
  for (const auto& w : covered) points.push_back(emb.find(w));

  DomainModel model;
  model.dim = emb.dim;
  int k = static_cast<int>((covered.size() + 999) / 1000);  // 1 cluster per 1000 types
  if (k < 1) k = 1;

  // Distinct vectors bound k.
  {
    std::vector<std::vector<double>> distinct;
    for (auto* p : points) {
      bool dup = false;
      for (const auto& q : distinct) {
        if (q == *p) {
          dup = true;
          break;
        }
      }
      if (dup) continue;
      distinct.push_back(*p);
      if (distinct.size() > static_cast<std::size_t>(k)) break;
    }
    if (distinct.size() < static_cast<std::size_t>(k)) {
      k = static_cast<int>(distinct.size());
      model.k_clamped = true;
    }
  }
  model.k = k;

  const std::size_t n = points.size();
  Rng rng(rng_seed);

  // k-means++ seeding.
  std::vector<std::vector<double>> centroids;
  centroids.reserve(k);
  centroids.push_back(*points[rng.below(n)]);
  std::vector<double> d2(n, 0.0);
  while (centroids.size() < static_cast<std::size_t>(k)) {
    double total = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      for (const auto& c : centroids) best = std::min(best, sq_dist(*points[i], c));
      d2[i] = best;
      total += best;
    }
    std::size_t pick = 0;
    if (total > 0.0) {
      const double r = rng.uniform() * total;
      double acc = 0.0;
      for (std::size_t i = 0; i < n; ++i) {
        acc += d2[i];
        if (acc >= r) {
          pick = i;
          break;
        }
      }
    } else {
      pick = rng.below(n);
    }
    centroids.push_back(*points[pick]);
  }

  // Lloyd iterations.
  std::vector<int32_t> assign(n, 0);
  constexpr int kMaxIter = 300;
  constexpr double kTol = 1e-6;
  for (int iter = 0; iter < kMaxIter; ++iter) {
    double wcss = 0.0;
    for (std::size_t i = 0; i < n; ++i) {
      double best = std::numeric_limits<double>::max();
      int32_t best_c = 0;
      for (int c = 0; c < k; ++c) {
        const double d = sq_dist(*points[i], centroids[c]);
        if (d < best) {
          best = d;
          best_c = c;
        }
      }
      assign[i] = best_c;
      wcss += best;
    }
    model.wcss_trace.push_back(wcss);

    std::vector<std::vector<double>> next(k, std::vector<double>(emb.dim, 0.0));
    std::vector<std::size_t> counts(k, 0);
    for (std::size_t i = 0; i < n; ++i) {
      const auto& p = *points[i];
      auto& c = next[assign[i]];
      for (std::size_t j = 0; j < emb.dim; ++j) c[j] += p[j];
      ++counts[assign[i]];
    }
    double movement = 0.0;
    for (int c = 0; c < k; ++c) {
      if (counts[c] == 0) {
        // Re-seed an empty cluster on the point farthest from its centroid.
        std::size_t far = 0;
        double far_d = -1.0;
        for (std::size_t i = 0; i < n; ++i) {
          const double d = sq_dist(*points[i], centroids[assign[i]]);
          if (d > far_d) {
            far_d = d;
            far = i;
          }
        }
        next[c] = *points[far];
      } else {
        for (std::size_t j = 0; j < emb.dim; ++j) next[c][j] /= static_cast<double>(counts[c]);
      }
      movement = std::max(movement, std::sqrt(sq_dist(next[c], centroids[c])));
    }
    centroids = std::move(next);
    if (movement < kTol) break;
  }

  // Final assignment against the converged centroids.
  model.centroids = centroids;
  for (std::size_t i = 0; i < n; ++i) {
    double best = std::numeric_limits<double>::max();
    int32_t best_c = 0;
    for (int c = 0; c < k; ++c) {
      const double d = sq_dist(*points[i], centroids[c]);
      if (d < best) {
        best = d;
        best_c = c;
      }
    }
    model.assignment.emplace(covered[i], best_c);
  }
  return model;
}

std::string DomainModel::to_json() const {
  nlohmann::ordered_json j;
  j["k"] = k;
  j["dim"] = dim;
  nlohmann::ordered_json a = nlohmann::ordered_json::object();
  for (const auto& [word, cluster] : assignment) a[word] = cluster;
  j["assignment"] = std::move(a);
  return j.dump(2) + "\n";
}

DomainModel DomainModel::from_json_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read domain model: " + path);
  nlohmann::json j = nlohmann::json::parse(in, nullptr, false);
  if (j.is_discarded() || !j.is_object()) throw DataError("malformed domain model: " + path);
  DomainModel m;
  m.k = j.value("k", 0);
  m.dim = j.value("dim", 0);
  if (j.contains("assignment")) {
    for (auto it = j["assignment"].begin(); it != j["assignment"].end(); ++it) {
      m.assignment.emplace(it.key(), it.value().get<int32_t>());
    }
  }
  return m;
}

// ---------------------------------------------------------------------------
// POS tagging
// ---------------------------------------------------------------------------

void TagLexicon::add_suffix_rule(const std::string& suffix, Upos tag) {
  suffix_rules_.emplace_back(suffix, tag);
  std::stable_sort(suffix_rules_.begin(), suffix_rules_.end(),
                   [](const auto& a, const auto& b) { return a.first.size() > b.first.size(); });
}

Upos TagLexicon::tag(const std::string& word) const {
  auto it = words_.find(word);
  if (it != words_.end()) return it->second;
  for (const auto& [suffix, t] : suffix_rules_) {
    if (word.size() >= suffix.size() &&
        word.compare(word.size() - suffix.size(), suffix.size(), suffix) == 0) {
      return t;
    }
  }
  return Upos::NOUN;
}

TagLexicon TagLexicon::build_from_tagged(const std::vector<Document>& docs) {
  std::unordered_map<std::string, std::unordered_map<Upos, std::size_t>> counts;
  for (const auto& d : docs) {
    const auto& toks = d.word_tokens();
    const auto& tags = d.word_tags();
    for (std::size_t i = 0; i < toks.size(); ++i) counts[toks[i]][tags[i]]++;
  }
  TagLexicon lex;
  for (const auto& [word, by_tag] : counts) {
    Upos best = Upos::X;
    std::size_t best_n = 0;
    std::string best_name;
    for (const auto& [tag, n] : by_tag) {
      const std::string name(to_string(tag));
      if (n > best_n || (n == best_n && name < best_name)) {
        best = tag;
        best_n = n;
        best_name = name;
      }
    }
    lex.add_word(word, best);
  }
  return lex;
}

TagLexicon TagLexicon::from_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read tag lexicon: " + path);
  TagLexicon lex;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected WORD<TAB>TAG");
    }
    const std::string word = line.substr(0, tab);
    const auto tag = upos_from_string(line.substr(tab + 1));
    if (!tag) {
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown UPOS tag");
    }
    if (!word.empty() && word[0] == '-') {
      lex.add_suffix_rule(word.substr(1), *tag);
    } else {
      lex.add_word(word, *tag);
    }
  }
  return lex;
}

TagLexicon TagLexicon::with_default_rules() {
  TagLexicon lex;
  const std::pair<const char*, Upos> words[] = {
      {"the", Upos::DET},   {"a", Upos::DET},      {"an", Upos::DET},   {"this", Upos::DET},
      {"that", Upos::DET},  {"of", Upos::ADP},     {"in", Upos::ADP},   {"on", Upos::ADP},
      {"to", Upos::PART},   {"at", Upos::ADP},     {"by", Upos::ADP},   {"for", Upos::ADP},
      {"with", Upos::ADP},  {"from", Upos::ADP},   {"and", Upos::CCONJ}, {"or", Upos::CCONJ},
      {"but", Upos::CCONJ}, {"not", Upos::PART},   {"is", Upos::AUX},   {"are", Upos::AUX},
      {"was", Upos::AUX},   {"were", Upos::AUX},   {"be", Upos::AUX},   {"been", Upos::AUX},
      {"has", Upos::AUX},   {"have", Upos::AUX},   {"had", Upos::AUX},  {"will", Upos::AUX},
      {"would", Upos::AUX}, {"can", Upos::AUX},    {"could", Upos::AUX}, {"it", Upos::PRON},
      {"he", Upos::PRON},   {"she", Upos::PRON},   {"they", Upos::PRON}, {"we", Upos::PRON},
      {"i", Upos::PRON},    {"you", Upos::PRON},   {"who", Upos::PRON}, {"which", Upos::PRON},
      {"if", Upos::SCONJ},  {"because", Upos::SCONJ}, {"while", Upos::SCONJ}, {"as", Upos::SCONJ},
      {"one", Upos::NUM},   {"two", Upos::NUM},    {"very", Upos::ADV}, {"also", Upos::ADV},
  };
  for (const auto& [w, t] : words) lex.add_word(w, t);
  const std::pair<const char*, Upos> suffixes[] = {
      {"ing", Upos::VERB}, {"ed", Upos::VERB},  {"ize", Upos::VERB},  {"ise", Upos::VERB},
      {"ly", Upos::ADV},   {"tion", Upos::NOUN}, {"sion", Upos::NOUN}, {"ment", Upos::NOUN},
      {"ness", Upos::NOUN}, {"ity", Upos::NOUN}, {"ous", Upos::ADJ},   {"ful", Upos::ADJ},
      {"able", Upos::ADJ}, {"ible", Upos::ADJ},  {"ical", Upos::ADJ},  {"ive", Upos::ADJ},
  };
  for (const auto& [s, t] : suffixes) lex.add_suffix_rule(s, t);
  return lex;
}

std::vector<Upos> tag_pos(const std::vector<std::string>& tokens, const TagLexicon& lexicon) {
  std::vector<Upos> tags;
  tags.reserve(tokens.size());
  for (const auto& t : tokens) tags.push_back(lexicon.tag(t));
  return tags;
}

// ---------------------------------------------------------------------------
// Increment annotation
// ---------------------------------------------------------------------------

AnnotatedText annotate_increment(const Increment& increment, const TagLexicon& lexicon,
                                 const DomainModel& domains) {
  AnnotatedText out;
  out.tokens.reserve(increment.tokens.size());

  std::vector<Upos> tags;
  if (increment.pretagged()) {
    tags = increment.tags;
  } else {
    tags = tag_pos(increment.tokens, lexicon);
  }

  for (std::size_t i = 0; i < increment.tokens.size(); ++i) {
    AnnotatedToken t;
    t.lex = increment.tokens[i];
    t.pos = tags[i];
    t.sem = is_open_class(t.pos) ? domains.domain_of(t.lex) : kNoDomain;
    out.tokens.push_back(std::move(t));
  }
  if (increment.spans.empty()) {
    if (!out.tokens.empty()) out.segments.emplace_back(0, out.tokens.size());
  } else {
    for (const auto& s : increment.spans) out.segments.emplace_back(s.begin, s.end);
  }
  return out;
}

}  // namespace cxg
