#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "peoplegaz/diag.h"
#include "peoplegaz/gazetteer.h"
#include "peoplegaz/pipeline.h"
#include "synthetic.h"

namespace pg = peoplegaz;
namespace fs = std::filesystem;

namespace {

pg::PipelineConfig small_config(const fs::path& root, std::uint64_t seed = 404) {
  const auto fx = pg::testing::write_newspaper_fixture(root / "fixture", 30, seed);
  pg::PipelineConfig c;
  c.corpus_dir = fx.corpus_dir;
  c.general_lexicon = fx.general_lexicon;
  c.names_lexicon = fx.names_lexicon;
  c.out_dir = root / "out";
  c.lda.topics = 4;
  c.lda.iterations = 20;
  c.lda.seed = 3;
  c.fold_in_iterations = 5;
  c.bucket_size = 5;
  return c;
}

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

// Runs `f` and returns the stage named by the UpstreamError it throws.
template <typename F>
std::optional<pg::Stage> blamed(F&& f, std::string* message = nullptr) {
  try {
    f();
  } catch (const pg::UpstreamError& e) {
    if (message) *message = e.what();
    return e.missing();
  }
  return std::nullopt;
}

struct Quiet {
  pg::ScopedWarningSink sink{[](const std::string&) {}};
};

}  // namespace

TEST_SUITE("pipeline") {
  TEST_CASE("stage names") {
    for (auto s : {pg::Stage::kIngest, pg::Stage::kCorrect, pg::Stage::kNer, pg::Stage::kTopics, pg::Stage::kCoref,
                   pg::Stage::kGazetteer, pg::Stage::kRank, pg::Stage::kStats, pg::Stage::kCompare})
      CHECK(pg::parse_stage(pg::stage_name(s)) == s);
    CHECK_FALSE(pg::parse_stage("nonsense").has_value());
  }

  TEST_CASE("config JSON round trip and validation") {
    pg::PipelineConfig c;
    c.corpus_dir = "/data/sun1894";
    c.lda.topics = 100;
    c.lda.alpha = 0.3;
    c.weights = {2, 1, 0.5};
    c.top_n = 3;
    c.spell_correction = false;
    c.manifest = "/data/manifest";
    const std::string json = pg::config_to_json(c);
    CHECK(pg::config_to_json(pg::config_from_json(json)) == json);
    CHECK_THROWS_AS(pg::config_from_json(R"({"topcs": 3})"), pg::Error);
    CHECK_THROWS_AS(pg::config_from_json("{not json"), pg::Error);
    const auto w = pg::config_from_json(R"({"weights": "1,2,3"})");
    CHECK(w.weights.similarity == 2.0);
    // Keys not mentioned keep the base value.
    CHECK(pg::config_from_json(R"({"seed": 9})", c).lda.topics == 100);
  }

  TEST_CASE("config file paths are relative to the file") {
    const auto dir = pg::testing::scratch_dir("pipeline-config");
    fs::create_directories(dir / "conf");
    std::ofstream(dir / "conf" / "run.json") << R"({"corpus_dir": "../articles", "out_dir": "out", "topics": 7})";
    const auto c = pg::load_config(dir / "conf" / "run.json");
    CHECK(fs::weakly_canonical(c.corpus_dir) == fs::weakly_canonical(dir / "articles"));
    CHECK(fs::weakly_canonical(c.out_dir) == fs::weakly_canonical(dir / "conf" / "out"));
    CHECK(c.lda.topics == 7);
  }

  TEST_CASE("stage hashes follow the dependency graph") {
    Quiet quiet;
    const auto root = pg::testing::scratch_dir("pipeline-hash");
    const auto base = small_config(root);
    auto more_topics = base;
    more_topics.lda.topics = 5;
    CHECK(pg::stage_hash(pg::Stage::kIngest, base) == pg::stage_hash(pg::Stage::kIngest, more_topics));
    CHECK(pg::stage_hash(pg::Stage::kCoref, base) == pg::stage_hash(pg::Stage::kCoref, more_topics));
    CHECK(pg::stage_hash(pg::Stage::kTopics, base) != pg::stage_hash(pg::Stage::kTopics, more_topics));
    CHECK(pg::stage_hash(pg::Stage::kRank, base) != pg::stage_hash(pg::Stage::kRank, more_topics));

    auto no_spell = base;
    no_spell.spell_correction = false;
    CHECK(pg::stage_hash(pg::Stage::kIngest, base) == pg::stage_hash(pg::Stage::kIngest, no_spell));
    CHECK(pg::stage_hash(pg::Stage::kNer, base) != pg::stage_hash(pg::Stage::kNer, no_spell));

    auto elsewhere = base;
    elsewhere.jobs = 4;
    elsewhere.out_dir = root / "other";
    for (auto s : {pg::Stage::kIngest, pg::Stage::kTopics, pg::Stage::kRank})
      CHECK(pg::stage_hash(s, base) == pg::stage_hash(s, elsewhere));

    // Changing a lexicon file's content changes the hash of the stages that read it.
    const auto correct_before = pg::stage_hash(pg::Stage::kCorrect, base);
    const auto ingest_before = pg::stage_hash(pg::Stage::kIngest, base);
    std::ofstream(*base.names_lexicon, std::ios::app) << "zebedee\n";
    CHECK(pg::stage_hash(pg::Stage::kCorrect, base) != correct_before);
    CHECK(pg::stage_hash(pg::Stage::kIngest, base) == ingest_before);
  }

  TEST_CASE("missing upstream stages are named") {
    Quiet quiet;
    const auto root = pg::testing::scratch_dir("pipeline-missing");
    const auto c = small_config(root);
    std::string message;
    CHECK(blamed([&] { pg::run_stage(pg::Stage::kRank, c); }, &message) == pg::Stage::kGazetteer);
    CHECK(message.find("'gazetteer'") != std::string::npos);
    CHECK(blamed([&] { pg::run_stage(pg::Stage::kCorrect, c); }) == pg::Stage::kIngest);
    pg::run_stage(pg::Stage::kIngest, c);
    pg::run_stage(pg::Stage::kCorrect, c);
    CHECK(blamed([&] { pg::run_stage(pg::Stage::kGazetteer, c); }) == pg::Stage::kCoref);
  }

  TEST_CASE("full run: outputs, determinism and thread independence") {
    Quiet quiet;
    const auto root = pg::testing::scratch_dir("pipeline-run");
    auto a = small_config(root);
    auto b = a;
    b.out_dir = root / "out-b";
    b.jobs = 3;
    b.workers = 1;
    const auto ra = pg::run_pipeline(a);
    const auto rb = pg::run_pipeline(b);
    REQUIRE(ra.size() == rb.size());
    for (std::size_t i = 0; i < ra.size(); ++i) {
      REQUIRE(ra[i].outputs.size() == rb[i].outputs.size());
      for (std::size_t j = 0; j < ra[i].outputs.size(); ++j) {
        CAPTURE(ra[i].outputs[j]);
        CHECK(pg::digest_file(ra[i].outputs[j]) == pg::digest_file(rb[i].outputs[j]));
      }
    }
    CHECK(fs::exists(a.out_dir / "rank" / "ranking.csv"));
    CHECK(fs::exists(a.out_dir / "rank" / "ranking.json"));
    CHECK(fs::exists(a.out_dir / "stats" / "category_stats.csv"));
    CHECK(fs::exists(a.out_dir / "topics" / "perplexity.json"));
    const auto record = nlohmann::json::parse(slurp(a.out_dir / "rank" / "stage.json"));
    CHECK(record["stage"] == "rank");
    CHECK(record.contains("config"));

    // Running again in place reproduces the same bytes.
    const std::string before = slurp(a.out_dir / "rank" / "ranking.csv");
    pg::run_pipeline(a);
    CHECK(slurp(a.out_dir / "rank" / "ranking.csv") == before);
  }

  TEST_CASE("stale and modified inputs are refused") {
    Quiet quiet;
    const auto root = pg::testing::scratch_dir("pipeline-stale");
    auto c = small_config(root);
    pg::run_pipeline(c);

    SUBCASE("different topic settings") {
      auto changed = c;
      changed.lda.topics = 6;
      CHECK(blamed([&] { pg::run_stage(pg::Stage::kRank, changed); }) == pg::Stage::kTopics);
    }
    SUBCASE("edited artifact") {
      std::ofstream(c.out_dir / "ner" / "entities.tsv", std::ios::app) << "x y\tz:1\n";
      std::string message;
      CHECK(blamed([&] { pg::run_stage(pg::Stage::kRank, c); }, &message) == pg::Stage::kNer);
      CHECK(message.find("modified") != std::string::npos);
    }
    SUBCASE("rerun upstream with new settings") {
      auto changed = c;
      changed.spell.max_edit_distance = 1;
      pg::run_stage(pg::Stage::kCorrect, changed);
      std::string message;
      CHECK(blamed([&] { pg::run_stage(pg::Stage::kGazetteer, changed); }, &message) == pg::Stage::kNer);
      CHECK(message.find("stale") != std::string::npos);
    }
    SUBCASE("corpus changed on disk") {
      std::ofstream(c.corpus_dir / "zz-new.txt") << "a late arrival\n";
      CHECK(blamed([&] { pg::run_stage(pg::Stage::kCorrect, c); }) == pg::Stage::kIngest);
    }
  }

  TEST_CASE("gazetteer export and import") {
    Quiet quiet;
    const auto root = pg::testing::scratch_dir("pipeline-gazetteer");
    auto c = small_config(root);
    pg::run_pipeline(c);
    pg::export_gazetteer_stage(root / "exported.tsv", c);
    const auto g = pg::import_gazetteer(root / "exported.tsv");
    CHECK(g == pg::import_gazetteer(c.out_dir / "gazetteer" / "gazetteer.tsv"));

    // A fresh workspace ranks from the imported file plus document lengths.
    auto fresh = c;
    fresh.out_dir = root / "fresh";
    pg::run_stage(pg::Stage::kIngest, fresh);
    pg::run_stage(pg::Stage::kCorrect, fresh);
    pg::import_gazetteer_stage(root / "exported.tsv", fresh);
    pg::run_stage(pg::Stage::kRank, fresh);
    CHECK(slurp(fresh.out_dir / "rank" / "ranking.csv").rfind("position,rank,person", 0) == 0);

    std::ofstream(root / "broken.tsv") << "# peoplegaz-gazetteer v1 topics=2\nann lee\ta:7\n";
    CHECK_THROWS_AS(pg::import_gazetteer_stage(root / "broken.tsv", fresh), pg::ParseError);
  }

  TEST_CASE("compare stage over two topic settings") {
    Quiet quiet;
    const auto root = pg::testing::scratch_dir("pipeline-compare");
    auto small = small_config(root);
    pg::run_pipeline(small);
    auto large = small;
    large.out_dir = root / "out-large";
    large.lda.topics = 8;
    pg::run_pipeline(large);

    auto cmp = small;
    cmp.out_dir = root / "cmp";
    cmp.compare_l1 = small.out_dir / "rank" / "ranking.csv";
    cmp.compare_l2 = large.out_dir / "rank" / "ranking.csv";
    const auto r = pg::run_stage(pg::Stage::kCompare, cmp);
    const auto report = nlohmann::json::parse(slurp(cmp.out_dir / "compare" / "report.json"));
    CHECK(report.contains("wilcoxon"));
    CHECK(fs::exists(cmp.out_dir / "compare" / "buckets.csv"));

    auto missing = cmp;
    missing.compare_l2.reset();
    CHECK_THROWS_AS(pg::run_stage(pg::Stage::kCompare, missing), pg::Error);
  }
}
