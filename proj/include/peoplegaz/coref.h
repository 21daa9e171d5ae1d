#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <set>
#include <string>
#include <vector>

#include "peoplegaz/corpus.h"
#include "peoplegaz/pner.h"

namespace peoplegaz {

enum class MentionKind { kName, kPronoun, kNominal };
enum class Gender { kUnknown, kMale, kFemale };

struct Mention {
  std::string surface;
  std::size_t start = 0;  // token span [start, end)
  std::size_t end = 0;
  MentionKind kind = MentionKind::kName;
  Gender gender = Gender::kUnknown;
};

struct CoreferenceChain {
  std::vector<Mention> mentions;  // ordered by span
  std::size_t representative = 0;  // index into mentions

  const Mention& head() const { return mentions[representative]; }
  std::size_t size() const { return mentions.size(); }
};

struct CorefOptions {
  std::set<std::string> honorifics = default_honorifics();
  std::size_t pronoun_window = 50;  // tokens between a pronoun and the chain's previous mention
};

bool is_pronoun(const std::string& token);
Gender pronoun_gender(const std::string& token);
Gender honorific_gender(const std::string& honorific);

// Person mentions from the tagger, gendered pronouns, honorific + surname
// nominals, and bare repeats of a detected surname. Sorted by span.
std::vector<Mention> detect_mentions(const Article& article, const std::vector<PersonMention>& person_mentions,
                                     const CorefOptions& options = {});

// Three precision-ordered sieves: exact name match, relaxed head match, and
// pronoun attachment. Returns a partition of `mentions`, chains ordered by
// their first mention.
std::vector<CoreferenceChain> resolve_chains(const std::vector<Mention>& mentions, const CorefOptions& options = {});

// Post-processing: drops singleton chains that contain no name.
std::vector<CoreferenceChain> drop_singletons(std::vector<CoreferenceChain> chains);

// Per-article PNF from chains whose representative is the entity's name;
// max(original, chain size). Other articles unchanged.
std::map<std::string, int> adjusted_pnf(const PersonEntity& entity,
                                        const std::map<std::string, std::vector<CoreferenceChain>>& chains_by_article);

// Applies adjusted_pnf to every entity, resolving chains per article.
std::vector<PersonEntity> apply_coreference(const Corpus& corpus, const std::vector<PersonMention>& mentions,
                                            const std::vector<PersonEntity>& entities,
                                            const CorefOptions& options = {}, unsigned jobs = 1,
                                            std::map<std::string, std::vector<CoreferenceChain>>* chains_out = nullptr);

// `chain_id<TAB>representative<TAB>mention_count` per chain.
void write_chain_dump(const std::vector<CoreferenceChain>& chains, const std::filesystem::path& path);

}  // namespace peoplegaz
