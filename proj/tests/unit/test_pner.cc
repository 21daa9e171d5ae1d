#include <algorithm>
#include <fstream>
#include <stdexcept>

#include "doctest.h"
#include "peoplegaz/diag.h"
#include "peoplegaz/error.h"
#include "peoplegaz/pner.h"
#include "synthetic.h"

namespace pg = peoplegaz;

namespace {

pg::PersonMention mention(const std::string& article, std::size_t start, std::size_t end, const std::string& surface) {
  return pg::PersonMention{surface, article, start, end};
}

std::vector<std::string> surfaces(const std::vector<pg::PersonMention>& ms) {
  std::vector<std::string> out;
  for (const auto& m : ms) out.push_back(m.surface);
  return out;
}

class ThrowingTagger final : public pg::PersonTagger {
 public:
  std::vector<pg::PersonMention> tag(const pg::Article&) const override { throw std::runtime_error("tagger crashed"); }
};

}  // namespace

TEST_SUITE("pner") {
  TEST_CASE("heuristic tagger on the Kelly obituary opening") {
    const pg::Lexicon names(pg::LexiconKind::kPersonNames);
    const pg::HeuristicTagger tagger(names);
    const auto ms = pg::tag_persons(pg::make_article("61720", "Mr Eugene Kelly bead of the banking house"), tagger);
    REQUIRE(ms.size() == 1);
    CHECK(ms[0].surface == "Eugene Kelly");
    CHECK(ms[0].start == 1);
    CHECK(ms[0].end == 3);
  }

  TEST_CASE("lower-case text has no mentions") {
    const pg::Lexicon names(pg::LexiconKind::kPersonNames, {"eugene", "kelly"});
    const pg::HeuristicTagger tagger(names);
    CHECK(pg::tag_persons(pg::make_article("1", "eugene kelly was here with mr smith"), tagger).empty());
  }

  TEST_CASE("three planted names are found exactly") {
    const pg::Lexicon names(pg::LexiconKind::kPersonNames, {"jacob", "mary"});
    const pg::HeuristicTagger tagger(names);
    // Planted spans: [2,4) "Jacob Schaefer", [10,12) "Mary Ward" after "Mrs", [16,18) "Walter Bragg" after "Dr".
    const std::string text =
        "yesterday evening Jacob Schaefer won the match and then Mrs Mary Ward spoke while the "
        "Dr Walter Bragg listened";
    const auto ms = pg::tag_persons(pg::make_article("a", text), tagger);
    REQUIRE(ms.size() == 3);
    CHECK(ms[0] == mention("a", 2, 4, "Jacob Schaefer"));
    CHECK(ms[1] == mention("a", 10, 12, "Mary Ward"));
    CHECK(ms[2] == mention("a", 16, 18, "Walter Bragg"));
  }

  TEST_CASE("capitalized runs without a known name or honorific are ignored") {
    const pg::Lexicon names(pg::LexiconKind::kPersonNames, {"john"});
    const pg::HeuristicTagger tagger(names);
    CHECK(pg::tag_persons(pg::make_article("1", "the West Fiftyfirst Street house"), tagger).empty());
    CHECK(surfaces(pg::tag_persons(pg::make_article("1", "said John Smith today"), tagger)) ==
          std::vector<std::string>{"John Smith"});
  }

  TEST_CASE("honorific with a single name keeps the honorific") {
    const pg::Lexicon names(pg::LexiconKind::kPersonNames);
    const pg::HeuristicTagger tagger(names);
    CHECK(surfaces(pg::tag_persons(pg::make_article("1", "when Capt Creeten arrived"), tagger)) ==
          std::vector<std::string>{"Capt Creeten"});
  }

  TEST_CASE("organisation markers end a name") {
    const pg::Lexicon names(pg::LexiconKind::kPersonNames, {"eugene"});
    const pg::HeuristicTagger tagger(names);
    CHECK(surfaces(pg::tag_persons(pg::make_article("1", "house of Eugene Kelly A Co Is dying"), tagger)) ==
          std::vector<std::string>{"Eugene Kelly"});
  }

  TEST_CASE("canonicalize merges partial names within an article") {
    const auto entities = pg::canonicalize({mention("1", 0, 1, "John"), mention("1", 3, 5, "John Smith"),
                                            mention("1", 9, 10, "Smith")});
    REQUIRE(entities.size() == 1);
    CHECK(entities[0].canonical_name == "john smith");
    CHECK(entities[0].occurrences == std::map<std::string, int>{{"1", 3}});
  }

  TEST_CASE("single-token names are discarded") {
    CHECK(pg::canonicalize({mention("1", 0, 1, "John")}).empty());
    CHECK(pg::canonicalize({}).empty());
  }

  TEST_CASE("identity across articles is the lower-cased name") {
    const auto entities = pg::canonicalize({mention("a", 0, 2, "Jacob Schaefer"), mention("b", 4, 6, "JACOB SCHAEFER"),
                                            mention("b", 9, 10, "Jacob")});
    REQUIRE(entities.size() == 1);
    CHECK(entities[0].occurrences == std::map<std::string, int>{{"a", 1}, {"b", 2}});
  }

  TEST_CASE("partial names never merge across articles") {
    const auto entities = pg::canonicalize({mention("a", 0, 2, "John Smith"), mention("b", 0, 1, "Smith")});
    REQUIRE(entities.size() == 1);
    CHECK(entities[0].occurrences == std::map<std::string, int>{{"a", 1}});
  }

  TEST_CASE("canonical_form") {
    CHECK(pg::canonical_form("  Eugene   KELLY ") == "eugene kelly");
    CHECK(pg::canonical_form("Capt Creeten") == "capt creeten");
  }

  TEST_CASE("canonicalize is independent of mention order") {
    pg::testing::TestRng rng(9);
    const std::vector<std::string> pool = {"John", "Smith", "John Smith", "Mary Ward", "Ward", "Mary",
                                           "Eugene Kelly", "Kelly", "Jacob Schaefer Jr"};
    std::vector<pg::PersonMention> ms;
    for (int i = 0; i < 200; ++i) {
      const std::string& s = pool[rng.below(pool.size())];
      ms.push_back(mention("d" + std::to_string(rng.below(6)), static_cast<std::size_t>(i) * 4,
                           static_cast<std::size_t>(i) * 4 + pg::tokenize(s).size(), s));
    }
    const auto reference = pg::canonicalize(ms);
    REQUIRE(!reference.empty());
    for (int trial = 0; trial < 20; ++trial) {
      for (std::size_t i = ms.size(); i > 1; --i) std::swap(ms[i - 1], ms[rng.below(i)]);
      CHECK(pg::canonicalize(ms) == reference);
    }
    for (const auto& e : reference) {
      CHECK(pg::tokenize(e.canonical_name).size() >= 2);
      for (const auto& [id, pnf] : e.occurrences) CHECK(pnf >= 1);
    }
    CHECK(std::is_sorted(reference.begin(), reference.end(),
                         [](const auto& a, const auto& b) { return a.canonical_name < b.canonical_name; }));
  }

  TEST_CASE("categories") {
    CHECK(pg::categorize(1) == pg::PersonCategory::kNotInfluential);
    CHECK(pg::categorize(3) == pg::PersonCategory::kNotInfluential);
    CHECK(pg::categorize(4) == pg::PersonCategory::kPopular);
    CHECK(pg::categorize(15) == pg::PersonCategory::kPopular);
    CHECK(pg::categorize(16) == pg::PersonCategory::kElite);
    CHECK(pg::categorize(3, {2, 3}) == pg::PersonCategory::kElite);
    for (std::size_t n = 1; n < 40; ++n) {
      const auto c = pg::categorize(n);
      CHECK((c == pg::PersonCategory::kNotInfluential) == (n < 4));
      CHECK((c == pg::PersonCategory::kElite) == (n >= 16));
    }
    CHECK(pg::category_name(pg::PersonCategory::kPopular) != pg::category_name(pg::PersonCategory::kElite));
  }

  TEST_CASE("external tagger replays mentions and drops bad spans") {
    const auto dir = pg::testing::scratch_dir("pner-external");
    std::ofstream(dir / "mentions.tsv") << "a\t1\t3\tEugene Kelly\na\t5\t99\tOut Of Range\nb\t0\t2\tMary Ward\n";
    const auto tagger = pg::ExternalMentionTagger::load(dir / "mentions.tsv");
    const pg::Corpus c({pg::make_article("a", "Mr Eugene Kelly of the house"), pg::make_article("b", "Mary Ward x")});
    const auto ms = pg::tag_corpus(c, tagger);
    CHECK(surfaces(ms) == std::vector<std::string>{"Eugene Kelly", "Mary Ward"});
  }

  TEST_CASE("a failing tagger yields no mentions and a warning") {
    std::vector<std::string> warnings;
    pg::ScopedWarningSink sink([&](const std::string& w) { warnings.push_back(w); });
    CHECK(pg::tag_persons(pg::make_article("x", "Mr John Smith"), ThrowingTagger()).empty());
    CHECK(warnings.size() == 1);
  }

  TEST_CASE("tag_corpus is independent of the thread count") {
    const auto root = pg::testing::scratch_dir("pner-jobs");
    const auto fx = pg::testing::write_newspaper_fixture(root, 40, 77);
    const auto corpus = pg::load_corpus(fx.corpus_dir).corpus;
    const auto names = pg::Lexicon::load(fx.names_lexicon, pg::LexiconKind::kPersonNames);
    const pg::HeuristicTagger tagger(names);
    CHECK(pg::tag_corpus(corpus, tagger, 1) == pg::tag_corpus(corpus, tagger, 4));
  }

  TEST_CASE("mention and entity files round trip") {
    const auto dir = pg::testing::scratch_dir("pner-io");
    const std::vector<pg::PersonMention> ms = {mention("a", 1, 3, "Eugene Kelly"), mention("b", 0, 2, "Mary Ward")};
    pg::write_mentions(ms, dir / "m.tsv");
    CHECK(pg::read_mentions(dir / "m.tsv") == ms);
    const auto entities = pg::canonicalize(ms);
    pg::write_entities(entities, dir / "e.tsv");
    CHECK(pg::read_entities(dir / "e.tsv") == entities);
    std::ofstream(dir / "bad.tsv") << "a\tx\t3\tName\n";
    CHECK_THROWS_AS(pg::read_mentions(dir / "bad.tsv"), pg::ParseError);
  }
}
