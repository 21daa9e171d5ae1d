#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <memory>
#include <set>
#include <string>
#include <string_view>
#include <vector>

#include "peoplegaz/corpus.h"
#include "peoplegaz/spellcorrect.h"

namespace peoplegaz {

// A tagged person name in one article. Tokens [start, end) of the article.
struct PersonMention {
  std::string surface;
  std::string article_id;
  std::size_t start = 0;
  std::size_t end = 0;

  bool operator==(const PersonMention&) const = default;
};

// Canonical multi-token person name with per-article name frequency (PNF).
struct PersonEntity {
  std::string canonical_name;
  std::map<std::string, int> occurrences;  // article id -> PNF

  std::size_t article_count() const { return occurrences.size(); }
  bool operator==(const PersonEntity&) const = default;
};

enum class PersonCategory { kNotInfluential, kPopular, kElite };

struct CategoryThresholds {
  std::size_t lo = 4;   // fewer articles -> not influential
  std::size_t hi = 16;  // at least this many -> elite
};

std::string_view category_name(PersonCategory c);
PersonCategory categorize(std::size_t article_count, const CategoryThresholds& t = {});
PersonCategory categorize(const PersonEntity& entity, const CategoryThresholds& t = {});

// Default honorifics recognised in front of names (case-sensitive, as printed).
const std::set<std::string>& default_honorifics();
std::set<std::string> load_honorifics(const std::filesystem::path& path);

class PersonTagger {
 public:
  virtual ~PersonTagger() = default;
  virtual std::vector<PersonMention> tag(const Article& article) const = 0;
};

// Capitalisation-run baseline.
//
// A candidate is a maximal run of capitalised tokens. Runs stop at capitalised
// function words ("The", "He", ...) and at organisation markers ("Co",
// "Company", ...); dangling single-letter initials at the end of a run are
// dropped. A leading honorific is consumed: when two or more name tokens
// follow it, the surface is the bare name ("Mr Eugene Kelly" -> "Eugene
// Kelly"); with a single name token the honorific stays part of the name
// ("Capt Creeten"). A run without an honorific needs at least two tokens, one
// of which must be in the person-name lexicon.
class HeuristicTagger final : public PersonTagger {
 public:
  HeuristicTagger(const Lexicon& person_names, std::set<std::string> honorifics = default_honorifics());

  std::vector<PersonMention> tag(const Article& article) const override;
  const std::set<std::string>& honorifics() const { return honorifics_; }

 private:
  const Lexicon& names_;
  std::set<std::string> honorifics_;
};

// Replays mentions produced by an outside tool. Line format:
// `article_id<TAB>start<TAB>end<TAB>surface`.
class ExternalMentionTagger final : public PersonTagger {
 public:
  explicit ExternalMentionTagger(std::vector<PersonMention> mentions);
  static ExternalMentionTagger load(const std::filesystem::path& path);

  std::vector<PersonMention> tag(const Article& article) const override;

 private:
  std::map<std::string, std::vector<PersonMention>, std::less<>> by_article_;
};

void write_mentions(const std::vector<PersonMention>& mentions, const std::filesystem::path& path);
std::vector<PersonMention> read_mentions(const std::filesystem::path& path);

// Runs the tagger on one article. Invalid spans are discarded; a tagger
// exception yields no mentions and a warning.
std::vector<PersonMention> tag_persons(const Article& article, const PersonTagger& tagger);

std::vector<PersonMention> tag_corpus(const Corpus& corpus, const PersonTagger& tagger, unsigned jobs = 1);

// Collapses raw mentions into entities. Within one article each mention is
// mapped to the unique maximal mention whose token set contains its own
// (mentions with several maximal supersets are ambiguous and dropped);
// single-token targets are discarded. Identity across articles is the
// lower-cased name. Output is sorted by canonical name.
std::vector<PersonEntity> canonicalize(const std::vector<PersonMention>& mentions);

std::string canonical_form(std::string_view surface);

void write_entities(const std::vector<PersonEntity>& entities, const std::filesystem::path& path);
std::vector<PersonEntity> read_entities(const std::filesystem::path& path);

}  // namespace peoplegaz
