#include <doctest.h>

#include <cstdio>
#include <fstream>
#include <set>
#include <sstream>

#include "cxg/annotate.hpp"
#include "cxg/errors.hpp"
#include "cxg/rng.hpp"
#include "testutil.hpp"

using namespace cxg;
using cxgtest::TempDir;

namespace {

std::string vec_line(const std::string& word, const std::vector<double>& v) {
  std::string line = word;
  char buf[32];
  for (double x : v) {
    std::snprintf(buf, sizeof(buf), " %.6f", x);
    line += buf;
  }
  return line + "\n";
}

Increment make_increment(const std::vector<std::string>& tokens,
                         const std::vector<Upos>& tags = {}) {
  Increment inc;
  inc.tokens = tokens;
  inc.tags = tags;
  return inc;
}

}  // namespace

TEST_CASE("load_embeddings: header file parses") {
  TempDir tmp("emb");
  std::ofstream(tmp.file("v.txt")) << "2 3\nalpha 0.1 0.2 0.3\nbeta 1.0 -1.0 0.5\n";
  const auto table = load_embeddings(tmp.file("v.txt"));
  CHECK(table.vocabulary.size() == 2);
  CHECK(table.dim == 3);
  REQUIRE(table.find("beta") != nullptr);
  CHECK((*table.find("beta"))[2] == doctest::Approx(0.5));
  CHECK(table.find("gamma") == nullptr);
}

TEST_CASE("load_embeddings: duplicates keep the first occurrence") {
  TempDir tmp("embdup");
  std::ofstream(tmp.file("v.txt")) << "one 1.0 0.0\ntwo 0.0 1.0\none 9.0 9.0\n";
  const auto table = load_embeddings(tmp.file("v.txt"));
  CHECK(table.vocabulary.size() == 2);
  CHECK((*table.find("one"))[0] == doctest::Approx(1.0));
}

TEST_CASE("load_embeddings: errors") {
  TempDir tmp("embe");
  CHECK_THROWS_AS(load_embeddings(tmp.file("missing.txt")), DataError);

  std::ofstream(tmp.file("incons.txt")) << "a 1.0 2.0\nb 1.0\n";
  CHECK_THROWS_WITH_AS(load_embeddings(tmp.file("incons.txt")), doctest::Contains(":2:"),
                       DataError);

  std::ofstream(tmp.file("empty.txt")) << "";
  CHECK_THROWS_AS(load_embeddings(tmp.file("empty.txt")), DataError);
}

TEST_CASE("load_embeddings: 10k-word file round-trips against the source") {
  TempDir tmp("embrt");
  // Sorted word order so the re-emission is directly comparable.
  std::vector<std::string> words;
  for (int i = 0; i < 10000; ++i) words.push_back("w" + std::to_string(i));
  std::sort(words.begin(), words.end());

  Rng rng(12);
  std::string source = std::to_string(words.size()) + " 8\n";
  for (const auto& w : words) {
    std::vector<double> v;
    for (int d = 0; d < 8; ++d) v.push_back(rng.normal());
    source += vec_line(w, v);
  }
  std::ofstream(tmp.file("v.txt"), std::ios::binary) << source;

  const auto table = load_embeddings(tmp.file("v.txt"));
  REQUIRE(table.vocabulary.size() == words.size());

  std::vector<std::size_t> order(table.vocabulary.size());
  for (std::size_t i = 0; i < order.size(); ++i) order[i] = i;
  std::sort(order.begin(), order.end(), [&](std::size_t a, std::size_t b) {
    return table.vocabulary[a] < table.vocabulary[b];
  });
  std::string emitted = std::to_string(table.vocabulary.size()) + " 8\n";
  for (auto i : order) emitted += vec_line(table.vocabulary[i], table.vectors[i]);
  CHECK(emitted == source);
}

TEST_CASE("fit_domains: one cluster per 1000 covered types") {
  TempDir tmp("dom1");
  std::string file;
  std::vector<std::string> vocab;
  Rng rng(5);
  for (int i = 0; i < 2500; ++i) {
    const std::string w = "t" + std::to_string(i);
    vocab.push_back(w);
    file += vec_line(w, {rng.normal(), rng.normal(), rng.normal()});
  }
  std::ofstream(tmp.file("v.txt")) << file;
  const auto emb = load_embeddings(tmp.file("v.txt"));
  const auto model = fit_domains(emb, vocab, 1);
  CHECK(model.k == 3);
  CHECK(model.assignment.size() == 2500);
  for (const auto& [word, cluster] : model.assignment) {
    CHECK(cluster >= 0);
    CHECK(cluster < 3);
  }
}

TEST_CASE("fit_domains: separated blobs land in distinct clusters") {
  TempDir tmp("dom2");
  std::string file;
  std::vector<std::string> vocab;
  Rng rng(9);
  for (int i = 0; i < 1200; ++i) {
    const std::string w = "b" + std::to_string(i);
    vocab.push_back(w);
    const double cx = i < 600 ? 0.0 : 50.0;
    file += vec_line(w, {cx + rng.normal() * 0.1, cx + rng.normal() * 0.1});
  }
  std::ofstream(tmp.file("v.txt")) << file;
  const auto emb = load_embeddings(tmp.file("v.txt"));
  const auto model = fit_domains(emb, vocab, 4);
  REQUIRE(model.k == 2);

  const int32_t first = model.assignment.at("b0");
  const int32_t second = model.assignment.at("b900");
  CHECK(first != second);
  for (int i = 0; i < 1200; ++i) {
    CHECK(model.assignment.at("b" + std::to_string(i)) == (i < 600 ? first : second));
  }
}

TEST_CASE("fit_domains: determinism, coverage errors, clamping") {
  TempDir tmp("dom3");
  std::string file;
  std::vector<std::string> vocab;
  Rng rng(2);
  for (int i = 0; i < 1500; ++i) {
    const std::string w = "c" + std::to_string(i);
    vocab.push_back(w);
    file += vec_line(w, {rng.normal(), rng.normal()});
  }
  std::ofstream(tmp.file("v.txt")) << file;
  const auto emb = load_embeddings(tmp.file("v.txt"));

  const auto m1 = fit_domains(emb, vocab, 33);
  const auto m2 = fit_domains(emb, vocab, 33);
  CHECK(m1.assignment == m2.assignment);

  CHECK_THROWS_AS(fit_domains(emb, {"nope", "nada"}, 1), DataError);

  // 1500 covered words but a single distinct vector: k clamps to 1.
  std::string flat;
  for (int i = 0; i < 1500; ++i) flat += vec_line("f" + std::to_string(i), {1.0, 2.0});
  std::ofstream(tmp.file("flat.txt")) << flat;
  const auto femb = load_embeddings(tmp.file("flat.txt"));
  std::vector<std::string> fvocab;
  for (int i = 0; i < 1500; ++i) fvocab.push_back("f" + std::to_string(i));
  const auto fm = fit_domains(femb, fvocab, 1);
  CHECK(fm.k == 1);
  CHECK(fm.k_clamped);
}

TEST_CASE("fit_domains: within-cluster sum of squares never increases") {
  TempDir tmp("dom4");
  std::string file;
  std::vector<std::string> vocab;
  Rng rng(77);
  for (int i = 0; i < 3000; ++i) {
    const std::string w = "m" + std::to_string(i);
    vocab.push_back(w);
    file += vec_line(w, {rng.normal() * 3, rng.normal() * 3, rng.normal() * 3});
  }
  std::ofstream(tmp.file("v.txt")) << file;
  const auto model = fit_domains(load_embeddings(tmp.file("v.txt")), vocab, 8);
  REQUIRE(model.wcss_trace.size() >= 2);
  for (std::size_t i = 1; i < model.wcss_trace.size(); ++i) {
    CHECK(model.wcss_trace[i] <= model.wcss_trace[i - 1] + 1e-9);
  }
}

TEST_CASE("domain model JSON persists the assignment") {
  TempDir tmp("domjson");
  DomainModel m;
  m.k = 2;
  m.dim = 3;
  m.assignment = {{"cat", 0}, {"dog", 1}};
  std::ofstream(tmp.file("d.json")) << m.to_json();
  const auto loaded = DomainModel::from_json_file(tmp.file("d.json"));
  CHECK(loaded.k == 2);
  CHECK(loaded.assignment == m.assignment);
}

TEST_CASE("tag_pos: lexicon, suffix fallback, default") {
  TagLexicon lex;
  lex.add_word("the", Upos::DET);
  lex.add_word("cat", Upos::NOUN);
  lex.add_suffix_rule("ing", Upos::VERB);
  lex.add_suffix_rule("thing", Upos::NOUN);  // longer rule wins

  CHECK(tag_pos({"the", "cat"}, lex) == std::vector<Upos>{Upos::DET, Upos::NOUN});
  CHECK(lex.tag("blorping") == Upos::VERB);
  CHECK(lex.tag("something") == Upos::NOUN);
  CHECK(lex.tag("zzz") == Upos::NOUN);  // default
}

TEST_CASE("tag_pos: lexicon built from a gold file tags it back at >= 0.95") {
  // 1k tokens over a vocabulary where one word in ten is ambiguous.
  Rng rng(3);
  std::vector<Document> docs(1);
  docs[0].doc_id = "gold";
  const Upos tags[] = {Upos::NOUN, Upos::VERB, Upos::ADJ, Upos::DET, Upos::ADV};
  std::vector<std::string> words;
  std::vector<Upos> gold;
  for (int i = 0; i < 1000; ++i) {
    const int w = static_cast<int>(rng.below(120));
    words.push_back("g" + std::to_string(w));
    Upos t = tags[w % 5];
    if (w % 10 == 0 && rng.uniform() < 0.3) t = tags[(w + 1) % 5];  // minority sense
    gold.push_back(t);
  }
  docs[0].raw_tokens = words;
  docs[0].raw_tags = gold;

  const TagLexicon lex = TagLexicon::build_from_tagged(docs);
  const auto predicted = tag_pos(docs[0].word_tokens(), lex);
  REQUIRE(predicted.size() == gold.size());
  std::size_t hits = 0;
  for (std::size_t i = 0; i < gold.size(); ++i) {
    if (predicted[i] == gold[i]) ++hits;
  }
  CHECK(static_cast<double>(hits) / static_cast<double>(gold.size()) >= 0.95);
}

TEST_CASE("annotate_increment: three levels with the open-class gate") {
  TempDir tmp("ann");
  std::ofstream(tmp.file("v.txt")) << "developing 1.0 0.0\ncountries 0.0 1.0\n";
  const auto emb = load_embeddings(tmp.file("v.txt"));
  const auto domains = fit_domains(emb, {"developing", "countries"}, 1);

  TagLexicon lex;
  lex.add_word("the", Upos::DET);
  lex.add_word("developing", Upos::ADJ);
  lex.add_word("countries", Upos::NOUN);

  const auto annotated =
      annotate_increment(make_increment({"the", "developing", "countries"}), lex, domains);
  REQUIRE(annotated.tokens.size() == 3);
  CHECK(annotated.tokens[0].pos == Upos::DET);
  CHECK(annotated.tokens[0].sem == kNoDomain);  // closed class
  CHECK(annotated.tokens[1].pos == Upos::ADJ);
  CHECK(annotated.tokens[1].sem >= 0);
  CHECK(annotated.tokens[2].pos == Upos::NOUN);
  CHECK(annotated.tokens[2].sem >= 0);

  SUBCASE("closed-class-only input gets no domains") {
    const auto closed = annotate_increment(make_increment({"the", "the", "the"}), lex, domains);
    for (const auto& t : closed.tokens) CHECK(t.sem == kNoDomain);
  }
  SUBCASE("open-class word missing from the model keeps its tag, loses the domain") {
    TagLexicon lex2 = lex;
    lex2.add_word("zebras", Upos::NOUN);
    const auto out = annotate_increment(make_increment({"zebras"}), lex2, domains);
    CHECK(out.tokens[0].pos == Upos::NOUN);
    CHECK(out.tokens[0].sem == kNoDomain);
  }
}

TEST_CASE("annotate_increment: pretagged increments bypass the tagger") {
  TagLexicon empty_lex;  // would tag everything NOUN
  DomainModel no_domains;
  const auto annotated = annotate_increment(
      make_increment({"run", "fast"}, {Upos::VERB, Upos::ADV}), empty_lex, no_domains);
  CHECK(annotated.tokens[0].pos == Upos::VERB);
  CHECK(annotated.tokens[1].pos == Upos::ADV);
}

TEST_CASE("annotate_increment: properties over random input") {
  Rng rng(21);
  TagLexicon lex = TagLexicon::with_default_rules();
  TempDir tmp("annp");
  std::string file;
  std::vector<std::string> vocab;
  for (int i = 0; i < 50; ++i) {
    const std::string w = "r" + std::to_string(i);
    vocab.push_back(w);
    file += vec_line(w, {rng.normal(), rng.normal()});
  }
  std::ofstream(tmp.file("v.txt")) << file;
  const auto domains = fit_domains(load_embeddings(tmp.file("v.txt")), vocab, 8);

  for (int trial = 0; trial < 20; ++trial) {
    std::vector<std::string> tokens;
    const auto n = 1 + rng.below(200);
    for (std::size_t i = 0; i < n; ++i) tokens.push_back("r" + std::to_string(rng.below(80)));
    const auto annotated = annotate_increment(make_increment(tokens), lex, domains);

    CHECK(annotated.tokens.size() == tokens.size());  // length preservation
    for (const auto& t : annotated.tokens) {
      if (t.sem != kNoDomain) CHECK(is_open_class(t.pos));  // open-class gate
    }
  }

  // Global-domain stability: the same word annotates identically across
  // increments sharing the model.
  const auto a = annotate_increment(make_increment({"r1", "r2", "r3"}), lex, domains);
  const auto b = annotate_increment(make_increment({"r3", "r1"}), lex, domains);
  CHECK(a.tokens[0].sem == b.tokens[1].sem);
  CHECK(a.tokens[2].sem == b.tokens[0].sem);
}
