#include <doctest.h>

#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <sstream>

#include "cxg/errors.hpp"
#include "cxg/harness.hpp"
#include "testutil.hpp"

using namespace cxg;
using cxgtest::TempDir;

namespace fs = std::filesystem;

namespace {

std::string read_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

std::size_t count_lines(const std::string& path) {
  std::ifstream in(path);
  std::string line;
  std::size_t n = 0;
  while (std::getline(in, line)) ++n;
  return n;
}

cxgtest::PopulationParams small_population() {
  cxgtest::PopulationParams p;
  p.n_authors = 6;
  p.pool_size = 20;
  p.shared_per_author = 12;
  p.unique_per_author = 5;
  p.tokens_per_author = 3000;
  p.doc_tokens = 250;
  p.background_vocab = 2000;
  return p;
}

// A compact two-condition experiment over one generated population.
ExperimentConfig small_config(const std::string& corpus_path, const std::string& out_dir) {
  ExperimentConfig cfg;
  cfg.increment_size = 1500;
  cfg.n_increments = 4;
  cfg.n_orderings = 10;
  cfg.n_pairs = 12;
  cfg.seed = 31;
  cfg.output_dir = out_dir;
  cfg.tagger = "pretagged";
  cfg.induction.threshold_grid = {0.1, 0.3, 0.6};
  cfg.induction.min_count = 4;

  CorpusSpec prod;
  prod.id = "pop-ind";
  prod.register_id = "pop";
  prod.path = corpus_path;
  prod.format = CorpusFormat::kTaggedConlluLike;
  prod.condition = Condition::kProduction;
  prod.mode = PartitionMode::kByIndividual;
  cfg.corpora.push_back(prod);

  CorpusSpec perc;
  perc.id = "pop-agg";
  perc.register_id = "pop";
  perc.path = corpus_path;
  perc.format = CorpusFormat::kTaggedConlluLike;
  perc.condition = Condition::kPerception;
  perc.mode = PartitionMode::kAggregate;
  perc.per_author_word_cap = 250;
  cfg.corpora.push_back(perc);
  return cfg;
}

}  // namespace

TEST_CASE("config: JSON loading with defaults and validation") {
  TempDir tmp("cfg");
  std::ofstream(tmp.file("corpus.txt")) << "a b c d e f\n";
  std::ofstream(tmp.file("cfg.json")) << R"({
    "seed": 5,
    "corpora": [{"id": "x", "path": "corpus.txt", "format": "plain_lines",
                 "condition": "background"}]
  })";
  const auto cfg = ExperimentConfig::from_json_file(tmp.file("cfg.json"));
  CHECK(cfg.increment_size == 100000);
  CHECK(cfg.n_increments == 20);
  CHECK(cfg.n_orderings == 100);
  CHECK(cfg.n_pairs == 200);
  CHECK(cfg.induction.threshold_grid.size() == 19);
  CHECK(cfg.induction.beam_width == 10);
  CHECK(cfg.induction.max_len == 6);
  CHECK(cfg.induction.min_count == 5);
  CHECK(cfg.seed == 5);
  cfg.validate();

  auto broken = cfg;
  broken.corpora[0].path = tmp.file("missing.txt");
  CHECK_THROWS_AS(broken.validate(), ConfigError);

  auto dup = cfg;
  dup.corpora.push_back(cfg.corpora[0]);
  CHECK_THROWS_AS(dup.validate(), ConfigError);

  auto badgrid = cfg;
  badgrid.induction.threshold_grid = {1.5};
  CHECK_THROWS_AS(badgrid.validate(), ConfigError);

  CHECK_THROWS_AS(ExperimentConfig::from_json_file(tmp.file("nope.json")), ConfigError);
}

TEST_CASE("harness: end-to-end run emits a consistent report") {
  TempDir tmp("run");
  const auto pop = cxgtest::make_population(tmp.path().string(), 99, small_population());
  auto cfg = small_config(pop.corpus_path, tmp.file("out"));

  const RunOutputs outputs = run_full(cfg);
  REQUIRE(outputs.growth.has_value());
  REQUIRE(outputs.distance.has_value());
  REQUIRE(outputs.corpora.size() == 2);
  for (const auto& corpus : outputs.corpora) {
    CHECK(corpus.increments.size() == 4);
    CHECK(corpus.grammars.size() == 4);
    for (const auto& g : corpus.grammars) CHECK(!g.constructions.empty());
  }

  const std::string manifest_path = emit_report(outputs, cfg.output_dir);
  CHECK(fs::exists(manifest_path));

  SUBCASE("curves CSV row count is conditions x kinds x increments") {
    CHECK(count_lines(tmp.file("out/curves.csv")) == 1 + 2 * 2 * 4);
  }

  SUBCASE("fits CSV carries one row per condition and kind") {
    CHECK(count_lines(tmp.file("out/fits.csv")) == 1 + 2 * 2);
    const std::string fits = read_file(tmp.file("out/fits.csv"));
    CHECK(fits.find("NA") == std::string::npos);
  }

  SUBCASE("max types equals the final mean-curve point") {
    for (const auto& row : outputs.growth->fits) {
      for (const auto& curve : outputs.growth->mean_curves) {
        if (curve.condition == row.corpus_id && curve.kind == row.kind) {
          CHECK(row.max_types == curve.points.back().second);
        }
      }
    }
  }

  SUBCASE("estimate rows are exactly 100x the raw estimates") {
    std::ifstream in(tmp.file("out/estimates.csv"));
    std::string header, line;
    std::getline(in, header);
    std::size_t row = 0;
    while (std::getline(in, line)) {
      std::stringstream ss(line);
      std::string id, mean_s, var_s;
      std::getline(ss, id, ',');
      std::getline(ss, mean_s, ',');
      std::getline(ss, var_s, ',');
      const auto& est = outputs.distance->estimates[row].estimate;
      CHECK(std::stod(mean_s) == doctest::Approx(100.0 * est.mean).epsilon(1e-9));
      CHECK(std::stod(var_s) == doctest::Approx(100.0 * est.variance).epsilon(1e-9));
      ++row;
    }
    CHECK(row == 2);
  }

  SUBCASE("distance samples stay within the corpus and in range") {
    CHECK(outputs.distance->samples.size() == 2 * 12);
    for (const auto& s : outputs.distance->samples) {
      CHECK(s.distance >= 0.0);
      CHECK(s.distance <= 1.0);
      CHECK(s.i != s.j);
      CHECK(s.register_id == "pop");
    }
  }

  SUBCASE("welch rows include split-half and cross-condition comparisons") {
    bool split = false, cross = false;
    for (const auto& w : outputs.growth->welch) {
      if (w.comparison.find("split-half") != std::string::npos) split = true;
      if (w.comparison.find("production-vs-perception") != std::string::npos) cross = true;
      CHECK(w.result.p >= 0.0);
      CHECK(w.result.p <= 1.0);
    }
    CHECK(split);
    CHECK(cross);
  }

  SUBCASE("manifest lists every emitted file with its hash") {
    const std::string manifest = read_file(manifest_path);
    CHECK(manifest.find("config.json") != std::string::npos);
    CHECK(manifest.find("curves.csv") != std::string::npos);
    CHECK(manifest.find("grammars/grammar_pop-ind_0.json") != std::string::npos);
    CHECK(manifest.find("\"seed\": 31") != std::string::npos);
  }
}

TEST_CASE("harness: identical config and seed reproduce every byte") {
  TempDir tmp("det");
  const auto pop = cxgtest::make_population(tmp.path().string(), 5, small_population());

  auto cfg1 = small_config(pop.corpus_path, tmp.file("out1"));
  auto cfg2 = small_config(pop.corpus_path, tmp.file("out2"));
  cfg2.jobs = 2;  // execution knob must not affect the output

  emit_report(run_full(cfg1), cfg1.output_dir);
  emit_report(run_full(cfg2), cfg2.output_dir);

  for (const auto& entry : fs::recursive_directory_iterator(tmp.file("out1"))) {
    if (!entry.is_regular_file()) continue;
    const auto rel = fs::relative(entry.path(), tmp.file("out1"));
    CHECK(read_file(entry.path().string()) == read_file((tmp.file("out2") / rel).string()));
  }
}

TEST_CASE("harness: removing one corpus leaves the other's outputs intact") {
  TempDir tmp("iso");
  const auto pop = cxgtest::make_population(tmp.path().string(), 13, small_population());

  auto both = small_config(pop.corpus_path, tmp.file("both"));
  auto solo = both;
  solo.corpora.erase(solo.corpora.begin() + 1);  // drop pop-agg
  solo.output_dir = tmp.file("solo");

  emit_report(run_full(both), both.output_dir);
  emit_report(run_full(solo), solo.output_dir);

  for (int k = 0; k < 4; ++k) {
    const std::string name = "grammars/grammar_pop-ind_" + std::to_string(k) + ".json";
    CHECK(read_file(tmp.file("both/" + name)) == read_file(tmp.file("solo/" + name)));
  }
}

TEST_CASE("harness: insufficient increments is a data error naming the shortfall") {
  TempDir tmp("short");
  const auto pop = cxgtest::make_population(tmp.path().string(), 7, small_population());
  auto cfg = small_config(pop.corpus_path, tmp.file("out"));
  cfg.n_increments = 50;
  CHECK_THROWS_WITH_AS(run_full(cfg), doctest::Contains("shortfall"), DataError);
}

TEST_CASE("harness: a single increment reports sizes but no fit") {
  TempDir tmp("one");
  auto params = small_population();
  params.n_authors = 2;
  const auto pop = cxgtest::make_population(tmp.path().string(), 3, params);
  auto cfg = small_config(pop.corpus_path, tmp.file("out"));
  cfg.n_increments = 1;
  cfg.corpora.pop_back();  // growth only; distances need >= 2 increments

  RunOutputs outputs;
  outputs.config = cfg;
  outputs.models = prepare_models(cfg);
  outputs.corpora.push_back(induce_corpus(cfg, cfg.corpora[0], outputs.models));
  outputs.growth = growth_report_from(outputs.corpora, cfg);
  emit_report(outputs, cfg.output_dir);

  for (const auto& row : outputs.growth->fits) {
    CHECK(!row.fitted);
    CHECK(row.max_types > 0.0);
  }
  const std::string fits = read_file(tmp.file("out/fits.csv"));
  CHECK(fits.find("NA") != std::string::npos);
}

TEST_CASE("harness: output directory handling") {
  TempDir tmp("dirs");
  const auto pop = cxgtest::make_population(tmp.path().string(), 11, small_population());
  auto cfg = small_config(pop.corpus_path, tmp.file("fresh"));
  cfg.corpora.pop_back();
  cfg.n_increments = 2;
  cfg.n_orderings = 3;

  RunOutputs outputs;
  outputs.config = cfg;
  outputs.models = prepare_models(cfg);
  outputs.corpora.push_back(induce_corpus(cfg, cfg.corpora[0], outputs.models));
  outputs.growth = growth_report_from(outputs.corpora, cfg);

  // Missing directory with an existing parent is created.
  emit_report(outputs, cfg.output_dir);
  CHECK(fs::exists(tmp.file("fresh/config.json")));

  // Missing parent is an error.
  CHECK_THROWS_AS(emit_report(outputs, tmp.file("no/such/parent")), ConfigError);
}

TEST_CASE("fit_curves_csv: groups are fitted independently") {
  TempDir tmp("fitcsv");
  std::ofstream out(tmp.file("curves.csv"));
  out << "condition,kind,tokens,types\n";
  for (int k = 1; k <= 10; ++k) {
    out << "c1,lexicon," << 1000 * k << ',' << 10.0 * std::pow(1000.0 * k, 0.8) << "\n";
  }
  for (int k = 1; k <= 10; ++k) {
    out << "c1,grammar," << 1000 * k << ',' << 5.0 * std::pow(1000.0 * k, 0.5) << "\n";
  }
  out.close();

  const auto fits = fit_curves_csv(tmp.file("curves.csv"));
  REQUIRE(fits.size() == 2);
  CHECK(fits[0].first == "c1,lexicon");
  CHECK(fits[0].second.alpha == doctest::Approx(0.8));
  CHECK(fits[1].second.alpha == doctest::Approx(0.5));
}
