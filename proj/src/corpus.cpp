#include "cxg/corpus.hpp"

#include <algorithm>
#include <deque>
#include <fstream>
#include <map>
#include <sstream>
#include <unordered_map>
#include <unordered_set>

#include <nlohmann/json.hpp>

#include "cxg/errors.hpp"
#include "cxg/rng.hpp"

namespace cxg {

std::optional<CorpusFormat> corpus_format_from_string(const std::string& s) {
  if (s == "plain_lines") return CorpusFormat::kPlainLines;
  if (s == "jsonl_docs") return CorpusFormat::kJsonlDocs;
  if (s == "tagged_conllu_like") return CorpusFormat::kTaggedConlluLike;
  return std::nullopt;
}

std::string to_string(CorpusFormat f) {
  switch (f) {
    case CorpusFormat::kPlainLines:
      return "plain_lines";
    case CorpusFormat::kJsonlDocs:
      return "jsonl_docs";
    case CorpusFormat::kTaggedConlluLike:
      return "tagged_conllu_like";
  }
  return "?";
}

std::optional<Condition> condition_from_string(const std::string& s) {
  if (s == "production") return Condition::kProduction;
  if (s == "perception") return Condition::kPerception;
  if (s == "background") return Condition::kBackground;
  return std::nullopt;
}

std::string to_string(Condition c) {
  switch (c) {
    case Condition::kProduction:
      return "production";
    case Condition::kPerception:
      return "perception";
    case Condition::kBackground:
      return "background";
  }
  return "?";
}

// ---------------------------------------------------------------------------
// Tokenization
// ---------------------------------------------------------------------------

namespace {

// Decodes one UTF-8 codepoint starting at i; advances i. Invalid bytes decode
// as U+FFFD and consume one byte.
uint32_t decode_utf8(const std::string& s, std::size_t& i) {
  const unsigned char b0 = static_cast<unsigned char>(s[i]);
  if (b0 < 0x80) {
    ++i;
    return b0;
  }
  int len = 0;
  uint32_t cp = 0;
  if ((b0 & 0xE0) == 0xC0) {
    len = 2;
    cp = b0 & 0x1F;
  } else if ((b0 & 0xF0) == 0xE0) {
    len = 3;
    cp = b0 & 0x0F;
  } else if ((b0 & 0xF8) == 0xF0) {
    len = 4;
    cp = b0 & 0x07;
  } else {
    ++i;
    return 0xFFFD;
  }
  if (i + len > s.size()) {
    ++i;
    return 0xFFFD;
  }
  for (int k = 1; k < len; ++k) {
    const unsigned char b = static_cast<unsigned char>(s[i + k]);
    if ((b & 0xC0) != 0x80) {
      ++i;
      return 0xFFFD;
    }
    cp = (cp << 6) | (b & 0x3F);
  }
  i += len;
  return cp;
}

void encode_utf8(uint32_t cp, std::string& out) {
  if (cp < 0x80) {
    out.push_back(static_cast<char>(cp));
  } else if (cp < 0x800) {
    out.push_back(static_cast<char>(0xC0 | (cp >> 6)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else if (cp < 0x10000) {
    out.push_back(static_cast<char>(0xE0 | (cp >> 12)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  } else {
    out.push_back(static_cast<char>(0xF0 | (cp >> 18)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 12) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | ((cp >> 6) & 0x3F)));
    out.push_back(static_cast<char>(0x80 | (cp & 0x3F)));
  }
}

bool is_digit_cp(uint32_t cp) {
  if (cp >= '0' && cp <= '9') return true;
  if (cp >= 0x0660 && cp <= 0x0669) return true;  // Arabic-Indic
  if (cp >= 0x06F0 && cp <= 0x06F9) return true;  // Extended Arabic-Indic
  return false;
}

// Letter classification for the common bicameral and CJK scripts; unhandled
// high codepoints in letter-dominated blocks default to letter.
bool is_letter_cp(uint32_t cp) {
  if ((cp >= 'a' && cp <= 'z') || (cp >= 'A' && cp <= 'Z')) return true;
  if (cp < 0x80) return false;
  if (cp == 0x00D7 || cp == 0x00F7) return false;               // multiply, divide
  if (cp >= 0x00C0 && cp <= 0x024F) return true;                // Latin-1 .. Ext-B
  if (cp >= 0x0300 && cp <= 0x036F) return true;                // combining marks
  if (cp >= 0x0370 && cp <= 0x03FF) return cp != 0x037E && cp != 0x0387;  // Greek
  if (cp >= 0x0400 && cp <= 0x04FF) return true;                // Cyrillic
  if (cp >= 0x0530 && cp <= 0x058F) return cp != 0x0589;        // Armenian
  if (cp >= 0x0590 && cp <= 0x05FF) return cp >= 0x05D0;        // Hebrew letters
  if (cp >= 0x0620 && cp <= 0x064A) return true;                // Arabic letters
  if (cp >= 0x3040 && cp <= 0x30FF) return true;                // Hiragana/Katakana
  if (cp >= 0x4E00 && cp <= 0x9FFF) return true;                // CJK unified
  if (cp >= 0xAC00 && cp <= 0xD7A3) return true;                // Hangul
  if (cp >= 0x1E00 && cp <= 0x1FFF) return true;                // Latin/Greek ext
  return false;
}

// Lowercasing for ASCII, Latin-1, Latin Extended-A, Greek, Cyrillic.
uint32_t lower_cp(uint32_t cp) {
  if (cp >= 'A' && cp <= 'Z') return cp + 32;
  if (cp >= 0x00C0 && cp <= 0x00DE && cp != 0x00D7) return cp + 32;
  if (cp == 0x0130) return 'i';       // dotted capital I
  if (cp == 0x0178) return 0x00FF;    // Y with diaeresis
  // Latin Extended-A alternates upper/lower in blocks with two parity flips.
  if (cp >= 0x0100 && cp <= 0x0137) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0139 && cp <= 0x0148) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x014A && cp <= 0x0177) return (cp % 2 == 0) ? cp + 1 : cp;
  if (cp >= 0x0179 && cp <= 0x017E) return (cp % 2 == 1) ? cp + 1 : cp;
  if (cp >= 0x0391 && cp <= 0x03A9 && cp != 0x03A2) return cp + 32;  // Greek
  if (cp >= 0x0410 && cp <= 0x042F) return cp + 32;                  // Cyrillic
  if (cp >= 0x0400 && cp <= 0x040F) return cp + 80;                  // Cyrillic supplement
  return cp;
}

bool is_apostrophe(uint32_t cp) { return cp == 0x0027 || cp == 0x2019; }

}  // namespace

std::vector<std::string> tokenize(const std::string& text) {
  // One pass over decoded codepoints. A token is (core)+ with single joiner
  // codepoints allowed between cores: apostrophes between letters,
  // comma/period between digits.
  std::vector<uint32_t> cps;
  cps.reserve(text.size());
  for (std::size_t i = 0; i < text.size();) cps.push_back(decode_utf8(text, i));

  std::vector<std::string> out;
  std::string cur;
  const std::size_t n = cps.size();
  std::size_t i = 0;
  while (i < n) {
    const uint32_t cp = cps[i];
    if (is_letter_cp(cp) || is_digit_cp(cp)) {
      encode_utf8(lower_cp(cp), cur);
      ++i;
      // Word-internal joiner?
      if (i + 1 < n) {
        const uint32_t j = cps[i];
        const bool letter_join = is_apostrophe(j) && is_letter_cp(cps[i - 1]) && is_letter_cp(cps[i + 1]);
        const bool digit_join =
            (j == ',' || j == '.') && is_digit_cp(cps[i - 1]) && is_digit_cp(cps[i + 1]);
        if (letter_join || digit_join) {
          encode_utf8(j, cur);
          ++i;
        }
      }
    } else {
      if (!cur.empty()) {
        out.push_back(std::move(cur));
        cur.clear();
      }
      ++i;
    }
  }
  if (!cur.empty()) out.push_back(std::move(cur));
  return out;
}

// ---------------------------------------------------------------------------
// Document
// ---------------------------------------------------------------------------

void Document::materialize() const {
  if (materialized_) return;
  materialized_ = true;
  if (pretagged()) {
    tokens_.reserve(raw_tokens.size());
    tags_.reserve(raw_tokens.size());
    for (std::size_t i = 0; i < raw_tokens.size(); ++i) {
      // Same keep/drop and lowercasing rule as free-text tokenization; a
      // supplied token that segments into several words keeps the first so
      // the tag stays aligned.
      auto words = tokenize(raw_tokens[i]);
      if (words.empty()) continue;
      tokens_.push_back(std::move(words.front()));
      tags_.push_back(raw_tags[i]);
    }
  } else {
    tokens_ = tokenize(text);
  }
}

const std::vector<std::string>& Document::word_tokens() const {
  materialize();
  return tokens_;
}

const std::vector<Upos>& Document::word_tags() const {
  materialize();
  return tags_;
}

// ---------------------------------------------------------------------------
// Loaders
// ---------------------------------------------------------------------------

namespace {

bool blank_line(const std::string& s) {
  return std::all_of(s.begin(), s.end(), [](unsigned char c) { return std::isspace(c); });
}

std::vector<Document> load_plain_lines(std::istream& in) {
  std::vector<Document> docs;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;  // blank lines are noise
    Document d;
    d.doc_id = std::to_string(line_no);
    d.text = line;
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_jsonl(std::istream& in, const std::string& path) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;
    nlohmann::json j = nlohmann::json::parse(line, nullptr, false);
    if (j.is_discarded() || !j.is_object()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": malformed JSON record");
    }
    Document d;
    if (!j.contains("doc_id") || !j["doc_id"].is_string()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": missing doc_id");
    }
    d.doc_id = j["doc_id"].get<std::string>();
    if (!seen_ids.insert(d.doc_id).second) {
      throw DataError(path + ":" + std::to_string(line_no) + ": duplicate doc_id '" + d.doc_id + "'");
    }
    if (j.contains("author_id") && j["author_id"].is_string()) d.author_id = j["author_id"];
    if (j.contains("venue_id") && j["venue_id"].is_string()) d.venue_id = j["venue_id"];
    if (!j.contains("text") || !j["text"].is_string()) {
      throw DataError(path + ":" + std::to_string(line_no) + ": missing text");
    }
    d.text = j["text"].get<std::string>();
    if (blank_line(d.text)) {
      throw DataError(path + ":" + std::to_string(line_no) + ": empty text");
    }
    docs.push_back(std::move(d));
  }
  return docs;
}

std::vector<Document> load_tagged(std::istream& in, const std::string& path) {
  std::vector<Document> docs;
  std::unordered_set<std::string> seen_ids;
  Document cur;
  bool have_doc = false;
  std::string line;
  std::size_t line_no = 0;

  auto flush = [&]() {
    if (!have_doc) return;
    if (cur.raw_tokens.empty()) {
      throw DataError(path + ": document '" + cur.doc_id + "' has no tokens");
    }
    std::string text;
    for (const auto& t : cur.raw_tokens) {
      if (!text.empty()) text += ' ';
      text += t;
    }
    cur.text = std::move(text);
    docs.push_back(std::move(cur));
    cur = Document{};
  };

  while (std::getline(in, line)) {
    ++line_no;
    if (blank_line(line)) continue;  // sentence separator
    if (line.rfind("# newdoc id = ", 0) == 0) {
      flush();
      have_doc = true;
      cur.doc_id = line.substr(14);
      if (!seen_ids.insert(cur.doc_id).second) {
        throw DataError(path + ":" + std::to_string(line_no) + ": duplicate doc_id '" + cur.doc_id + "'");
      }
      continue;
    }
    if (line.rfind("# author = ", 0) == 0) {
      if (!have_doc) throw DataError(path + ":" + std::to_string(line_no) + ": metadata before # newdoc");
      cur.author_id = line.substr(11);
      continue;
    }
    if (line.rfind("# venue = ", 0) == 0) {
      if (!have_doc) throw DataError(path + ":" + std::to_string(line_no) + ": metadata before # newdoc");
      cur.venue_id = line.substr(10);
      continue;
    }
    if (line[0] == '#') continue;  // other comments ignored
    if (!have_doc) {
      throw DataError(path + ":" + std::to_string(line_no) + ": token line before # newdoc");
    }
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0 || tab + 1 >= line.size() ||
        line.find('\t', tab + 1) != std::string::npos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": expected TOKEN<TAB>UPOS");
    }
    const std::string tok = line.substr(0, tab);
    const std::string tag = line.substr(tab + 1);
    const auto upos = upos_from_string(tag);
    if (!upos) {
      throw DataError(path + ":" + std::to_string(line_no) + ": unknown UPOS tag '" + tag + "'");
    }
    cur.raw_tokens.push_back(tok);
    cur.raw_tags.push_back(*upos);
  }
  flush();
  return docs;
}

}  // namespace

std::vector<Document> load_corpus(const std::string& path, CorpusFormat format) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw DataError("cannot read corpus file: " + path);
  std::vector<Document> docs;
  switch (format) {
    case CorpusFormat::kPlainLines:
      docs = load_plain_lines(in);
      break;
    case CorpusFormat::kJsonlDocs:
      docs = load_jsonl(in, path);
      break;
    case CorpusFormat::kTaggedConlluLike:
      docs = load_tagged(in, path);
      break;
  }
  if (docs.empty()) throw DataError("empty corpus: " + path);
  return docs;
}

void write_tagged_corpus(const std::vector<Document>& docs, const std::string& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw DataError("cannot write: " + path);
  for (const auto& d : docs) {
    out << "# newdoc id = " << d.doc_id << '\n';
    if (!d.author_id.empty()) out << "# author = " << d.author_id << '\n';
    if (!d.venue_id.empty()) out << "# venue = " << d.venue_id << '\n';
    for (std::size_t i = 0; i < d.raw_tokens.size(); ++i) {
      out << d.raw_tokens[i] << '\t' << to_string(d.raw_tags[i]) << '\n';
    }
    out << '\n';
  }
}

// ---------------------------------------------------------------------------
// Partitioning
// ---------------------------------------------------------------------------

std::vector<std::string> Increment::source_docs() const {
  std::vector<std::string> ids;
  for (const auto& s : spans) {
    if (ids.empty() || ids.back() != s.doc_id) ids.push_back(s.doc_id);
  }
  return ids;
}

namespace {

// Pending slice of a document's token stream waiting to be placed.
struct WorkItem {
  std::size_t doc = 0;     // index into docs
  std::size_t offset = 0;  // token offset within the document
};

// Tags are carried only when the whole corpus is pretagged, so increment
// token and tag vectors always stay aligned.
void append_span(Increment& inc, const Document& d, std::size_t offset, std::size_t count,
                 bool with_tags) {
  const auto& toks = d.word_tokens();
  const std::size_t begin = inc.tokens.size();
  inc.tokens.insert(inc.tokens.end(), toks.begin() + offset, toks.begin() + offset + count);
  if (with_tags) {
    const auto& tags = d.word_tags();
    inc.tags.insert(inc.tags.end(), tags.begin() + offset, tags.begin() + offset + count);
  }
  inc.spans.push_back(DocSpan{d.doc_id, begin, begin + count, offset});
}

bool all_pretagged(const std::vector<Document>& docs) {
  return std::all_of(docs.begin(), docs.end(), [](const Document& d) { return d.pretagged(); });
}

PartitionResult partition_by_individual(const std::vector<Document>& docs,
                                        const PartitionPolicy& policy, Condition condition) {
  for (const auto& d : docs) {
    if (d.author_id.empty()) {
      throw DataError("by_individual partition requires author_id on all documents (doc '" +
                      d.doc_id + "' has none)");
    }
  }
  // Group docs per author, keeping corpus order.
  std::vector<std::string> author_order;
  std::unordered_map<std::string, std::vector<std::size_t>> by_author;
  for (std::size_t i = 0; i < docs.size(); ++i) {
    auto [it, fresh] = by_author.try_emplace(docs[i].author_id);
    if (fresh) author_order.push_back(docs[i].author_id);
    it->second.push_back(i);
  }

  PartitionResult res;
  for (const auto& d : docs) res.total_usable_tokens += static_cast<int64_t>(d.word_tokens().size());
  const bool with_tags = all_pretagged(docs);

  const int64_t size = policy.increment_size;
  for (const auto& author : author_order) {
    int64_t have = 0;
    for (auto di : by_author[author]) have += static_cast<int64_t>(docs[di].word_tokens().size());
    if (have < size) continue;

    Increment inc;
    inc.index = static_cast<int>(res.increments.size());
    inc.condition = condition;
    int64_t need = size;
    for (auto di : by_author[author]) {
      if (need == 0) break;
      const auto& toks = docs[di].word_tokens();
      const std::size_t take = static_cast<std::size_t>(
          std::min<int64_t>(need, static_cast<int64_t>(toks.size())));
      if (take > 0) append_span(inc, docs[di], 0, take, with_tags);
      need -= static_cast<int64_t>(take);
    }
    res.increments.push_back(std::move(inc));
  }
  int64_t placed = 0;
  for (const auto& inc : res.increments) placed += static_cast<int64_t>(inc.tokens.size());
  res.discarded_tokens = res.total_usable_tokens - placed;
  return res;
}

PartitionResult partition_aggregate(const std::vector<Document>& docs,
                                    const PartitionPolicy& policy, Condition condition,
                                    std::uint64_t rng_seed) {
  PartitionResult res;
  for (const auto& d : docs) res.total_usable_tokens += static_cast<int64_t>(d.word_tokens().size());
  const bool with_tags = all_pretagged(docs);

  std::vector<std::size_t> order(docs.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  Rng rng(rng_seed);
  rng.shuffle(order);

  std::deque<WorkItem> queue;
  for (auto i : order) {
    if (!docs[i].word_tokens().empty()) queue.push_back(WorkItem{i, 0});
  }

  const int64_t size = policy.increment_size;
  int64_t placed_total = 0;

  while (!queue.empty()) {
    Increment inc;
    inc.index = static_cast<int>(res.increments.size());
    inc.condition = condition;
    std::unordered_map<std::string, int64_t> author_tokens;
    std::unordered_map<std::string, int64_t> venue_docs;
    std::deque<WorkItem> deferred;
    int64_t space = size;

    while (space > 0 && !queue.empty()) {
      WorkItem item = queue.front();
      queue.pop_front();
      const Document& d = docs[item.doc];
      const int64_t doc_left = static_cast<int64_t>(d.word_tokens().size()) - item.offset;

      if (policy.per_venue_doc_cap && !d.venue_id.empty()) {
        auto it = venue_docs.find(d.venue_id);
        if (it != venue_docs.end() && it->second >= *policy.per_venue_doc_cap) {
          deferred.push_back(item);
          continue;
        }
      }
      int64_t author_left = doc_left;
      if (policy.per_author_word_cap && !d.author_id.empty()) {
        author_left = *policy.per_author_word_cap - author_tokens[d.author_id];
        if (author_left <= 0) {
          deferred.push_back(item);
          continue;
        }
      }

      const int64_t take = std::min({doc_left, author_left, space});
      append_span(inc, d, item.offset, static_cast<std::size_t>(take), with_tags);
      space -= take;
      placed_total += take;
      if (!d.author_id.empty()) author_tokens[d.author_id] += take;
      if (!d.venue_id.empty()) venue_docs[d.venue_id] += 1;

      if (take < doc_left) {
        WorkItem rest{item.doc, item.offset + static_cast<std::size_t>(take)};
        if (space == 0) {
          queue.push_front(rest);  // continues in the next increment
        } else {
          deferred.push_back(rest);  // author cap hit for this increment
        }
      }
    }

    // Re-queue deferrals ahead of the untouched tail.
    for (auto it = deferred.rbegin(); it != deferred.rend(); ++it) queue.push_front(*it);

    if (space == 0) {
      res.increments.push_back(std::move(inc));
    } else {
      // Could not fill this increment; its tokens count as discarded.
      placed_total -= static_cast<int64_t>(inc.tokens.size());
      break;
    }
  }

  res.discarded_tokens = res.total_usable_tokens - placed_total;
  return res;
}

}  // namespace

PartitionResult partition(const std::vector<Document>& docs, const PartitionPolicy& policy,
                          Condition condition, std::uint64_t rng_seed) {
  if (policy.increment_size < 1) throw ConfigError("increment_size must be >= 1");
  if (policy.per_author_word_cap && *policy.per_author_word_cap < 1) {
    throw ConfigError("per_author_word_cap must be >= 1");
  }
  if (policy.per_venue_doc_cap && *policy.per_venue_doc_cap < 1) {
    throw ConfigError("per_venue_doc_cap must be >= 1");
  }
  if (policy.mode == PartitionMode::kByIndividual) {
    return partition_by_individual(docs, policy, condition);
  }
  return partition_aggregate(docs, policy, condition, rng_seed);
}

std::vector<std::vector<std::size_t>> sample_orderings(std::size_t n_increments,
                                                       std::size_t n_samples,
                                                       std::uint64_t rng_seed) {
  if (n_samples < 1) throw ConfigError("n_samples must be >= 1");
  std::vector<std::size_t> identity(n_increments);
  for (std::size_t i = 0; i < n_increments; ++i) identity[i] = i;

  std::vector<std::vector<std::size_t>> out;
  out.reserve(n_samples);
  out.push_back(identity);
  Rng rng(rng_seed);
  for (std::size_t s = 1; s < n_samples; ++s) {
    auto perm = identity;
    rng.shuffle(perm);
    out.push_back(std::move(perm));
  }
  return out;
}

}  // namespace cxg
