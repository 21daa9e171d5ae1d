#include <fstream>
#include <set>

#include "doctest.h"
#include "peoplegaz/coref.h"
#include "synthetic.h"

namespace pg = peoplegaz;

namespace {

const char* kKellyText =
    "Mr Eugene Kelly bead of the banking house of Eugene Kelly A Co Is dying at his home\n"
    "33 West Fiftyfirst street He became ill on Dee 4 and was forced to lake to his bed\n";

struct Resolved {
  pg::Article article;
  std::vector<pg::PersonMention> person_mentions;
  std::vector<pg::Mention> mentions;
  std::vector<pg::CoreferenceChain> chains;
};

Resolved resolve(const std::string& text, const std::vector<std::string>& first_names = {}) {
  const pg::Lexicon names(pg::LexiconKind::kPersonNames, first_names);
  Resolved r{pg::make_article("a", text), {}, {}, {}};
  r.person_mentions = pg::tag_persons(r.article, pg::HeuristicTagger(names));
  r.mentions = pg::detect_mentions(r.article, r.person_mentions);
  r.chains = pg::resolve_chains(r.mentions);
  return r;
}

std::vector<std::string> surfaces(const pg::CoreferenceChain& c) {
  std::vector<std::string> out;
  for (const auto& m : c.mentions) out.push_back(m.surface);
  return out;
}

pg::CoreferenceChain chain_of(const std::string& head, std::size_t extra_pronouns) {
  pg::CoreferenceChain c;
  c.mentions.push_back({head, 0, pg::tokenize(head).size(), pg::MentionKind::kName, pg::Gender::kUnknown});
  for (std::size_t i = 0; i < extra_pronouns; ++i)
    c.mentions.push_back({"he", 10 + i, 11 + i, pg::MentionKind::kPronoun, pg::Gender::kMale});
  return c;
}

}  // namespace

TEST_SUITE("coref") {
  TEST_CASE("pronoun table") {
    CHECK(pg::is_pronoun("He"));
    CHECK(pg::is_pronoun("herself"));
    CHECK_FALSE(pg::is_pronoun("Helen"));
    CHECK(pg::pronoun_gender("his") == pg::Gender::kMale);
    CHECK(pg::pronoun_gender("Her") == pg::Gender::kFemale);
    CHECK(pg::honorific_gender("Mrs") == pg::Gender::kFemale);
    CHECK(pg::honorific_gender("Capt") == pg::Gender::kMale);
    CHECK(pg::honorific_gender("Dr") == pg::Gender::kUnknown);
  }

  TEST_CASE("Kelly obituary: mentions and the five-mention chain") {
    const auto r = resolve(kKellyText, {"eugene", "kelly"});
    std::size_t names = 0, pronouns = 0;
    for (const auto& m : r.mentions) {
      if (m.kind == pg::MentionKind::kPronoun) ++pronouns;
      if (m.surface == "Eugene Kelly") ++names;
    }
    CHECK(names == 2);
    CHECK(pronouns == 3);  // his, He, his
    REQUIRE(!r.chains.empty());
    const auto& c = r.chains.front();
    CHECK(c.head().surface == "Eugene Kelly");
    CHECK(surfaces(c) == std::vector<std::string>{"Eugene Kelly", "Eugene Kelly", "his", "He", "his"});
  }

  TEST_CASE("no names and no pronouns give no mentions") {
    const auto r = resolve("the market was quiet all morning");
    CHECK(r.mentions.empty());
    CHECK(r.chains.empty());
  }

  TEST_CASE("two names and three pronouns are exactly five mentions") {
    const auto r = resolve("Jacob Schaefer met Mary Ward and he told her that she had won", {"jacob", "mary"});
    CHECK(r.mentions.size() == 5);
  }

  TEST_CASE("two distinct names make two singleton chains") {
    const auto r = resolve("Jacob Schaefer met Walter Bragg at the hall", {"jacob", "walter"});
    REQUIRE(r.chains.size() == 2);
    CHECK(r.chains[0].size() == 1);
    CHECK(r.chains[1].size() == 1);
    CHECK(pg::drop_singletons(r.chains).size() == 2);  // name singletons survive
  }

  TEST_CASE("Captain Williams ... Williams ... he") {
    const auto r = resolve("Captain Williams took command and Williams said that he would sail");
    REQUIRE(r.chains.size() == 1);
    CHECK(r.chains[0].size() == 3);
    CHECK(r.chains[0].head().surface == "Captain Williams");
  }

  TEST_CASE("gender mismatch blocks pronoun attachment") {
    const auto r = resolve("Mrs Mary Ward spoke and he left", {"mary"});
    REQUIRE(r.chains.size() == 2);
    CHECK(r.chains[0].size() == 1);
    CHECK(r.chains[1].head().surface == "he");
    CHECK(pg::drop_singletons(r.chains).size() == 1);  // pronoun-only singleton removed
  }

  TEST_CASE("pronouns beyond the window stay unattached") {
    std::string text = "Mr John Smith arrived";
    for (int i = 0; i < 60; ++i) text += " word";
    text += " he";
    const auto far = resolve(text);
    CHECK(far.chains.front().size() == 1);
    pg::CorefOptions wide;
    wide.pronoun_window = 100;
    const auto chains = pg::resolve_chains(far.mentions, wide);
    CHECK(chains.front().size() == 2);
  }

  TEST_CASE("chains partition the mentions") {
    const auto root = pg::testing::scratch_dir("coref-partition");
    const auto fx = pg::testing::write_newspaper_fixture(root, 25, 31);
    const auto corpus = pg::load_corpus(fx.corpus_dir).corpus;
    const auto names = pg::Lexicon::load(fx.names_lexicon, pg::LexiconKind::kPersonNames);
    const pg::HeuristicTagger tagger(names);
    for (const auto& article : corpus.articles()) {
      const auto mentions = pg::detect_mentions(article, pg::tag_persons(article, tagger));
      const auto chains = pg::resolve_chains(mentions);
      std::multiset<std::pair<std::size_t, std::size_t>> seen;
      for (const auto& c : chains) {
        REQUIRE(c.representative < c.size());
        for (const auto& m : c.mentions) seen.insert({m.start, m.end});
        // The head is a name whenever the chain has one.
        bool has_name = false;
        for (const auto& m : c.mentions) has_name = has_name || m.kind == pg::MentionKind::kName;
        if (has_name) CHECK(c.head().kind == pg::MentionKind::kName);
      }
      std::multiset<std::pair<std::size_t, std::size_t>> expected;
      for (const auto& m : mentions) expected.insert({m.start, m.end});
      CHECK(seen == expected);
    }
  }

  TEST_CASE("adjusted PNF") {
    pg::PersonEntity kelly{"eugene kelly", {{"61720", 2}, {"other", 4}}};
    SUBCASE("a matching chain raises the count") {
      const auto out = pg::adjusted_pnf(kelly, {{"61720", {chain_of("Eugene Kelly", 4)}}});
      CHECK(out == std::map<std::string, int>{{"61720", 5}, {"other", 4}});
    }
    SUBCASE("a shorter chain never lowers it") {
      const auto out = pg::adjusted_pnf(kelly, {{"other", {chain_of("Eugene Kelly", 1)}}});
      CHECK(out == kelly.occurrences);
    }
    SUBCASE("no chains: unchanged") { CHECK(pg::adjusted_pnf(kelly, {}) == kelly.occurrences); }
    SUBCASE("a non-person representative is ignored") {
      const auto out = pg::adjusted_pnf(kelly, {{"61720", {chain_of("Dee 4", 6)}}});
      CHECK(out == kelly.occurrences);
    }
  }

  TEST_CASE("apply_coreference end to end and across thread counts") {
    const auto root = pg::testing::scratch_dir("coref-apply");
    const auto fx = pg::testing::write_newspaper_fixture(root, 40, 32);
    const auto corpus = pg::load_corpus(fx.corpus_dir).corpus;
    const auto names = pg::Lexicon::load(fx.names_lexicon, pg::LexiconKind::kPersonNames);
    const auto mentions = pg::tag_corpus(corpus, pg::HeuristicTagger(names));
    const auto entities = pg::canonicalize(mentions);
    const auto one = pg::apply_coreference(corpus, mentions, entities, {}, 1);
    const auto four = pg::apply_coreference(corpus, mentions, entities, {}, 4);
    CHECK(one == four);
    REQUIRE(one.size() == entities.size());
    bool any_raised = false;
    for (std::size_t i = 0; i < one.size(); ++i) {
      CHECK(one[i].canonical_name == entities[i].canonical_name);
      for (const auto& [id, pnf] : entities[i].occurrences) {
        CHECK(one[i].occurrences.at(id) >= pnf);
        any_raised = any_raised || one[i].occurrences.at(id) > pnf;
      }
    }
    CHECK(any_raised);
  }

  TEST_CASE("chain dump") {
    const auto dir = pg::testing::scratch_dir("coref-dump");
    pg::write_chain_dump({chain_of("Eugene Kelly", 4), chain_of("Dee 4", 0)}, dir / "chains.tsv");
    std::ifstream in(dir / "chains.tsv");
    const std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
    CHECK(text == "0\tEugene Kelly\t5\n1\tDee 4\t1\n");
  }
}
