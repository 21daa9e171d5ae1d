#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <mutex>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "peoplegaz/corpus.h"

namespace peoplegaz {

// Levenshtein distance over Unicode code points (unit-cost insert, delete,
// substitute).
std::size_t edit_distance(std::string_view a, std::string_view b);

// Same distance, but gives up early: returns `limit + 1` as soon as the
// distance is known to exceed `limit`.
std::size_t bounded_edit_distance(std::string_view a, std::string_view b, std::size_t limit);

enum class LexiconKind { kGeneral, kPersonNames };

class Lexicon {
 public:
  Lexicon(LexiconKind kind = LexiconKind::kGeneral) : kind_(kind) {}
  Lexicon(LexiconKind kind, const std::vector<std::string>& words);

  // Lower-cases and trims each line; blank lines and lines containing inner
  // whitespace are skipped.
  static Lexicon load(const std::filesystem::path& path, LexiconKind kind);

  void add(std::string_view word);
  bool contains(std::string_view lower_word) const { return words_.count(std::string(lower_word)) > 0; }
  std::size_t size() const { return words_.size(); }
  bool empty() const { return words_.empty(); }
  LexiconKind kind() const { return kind_; }
  const std::unordered_set<std::string>& words() const { return words_; }

 private:
  LexiconKind kind_;
  std::unordered_set<std::string> words_;
};

struct CorrectionPolicy {
  std::size_t max_edit_distance = 2;
  bool prefer_person_lexicon = true;
  std::size_t min_token_length = 3;
};

// Joins line-break hyphenations ("ex-" + "ceptionally") when the fused word is
// attested in one of the lexicons. A trailing hyphen at the end of the stream
// is stripped.
std::vector<std::string> join_hyphenated(const std::vector<std::string>& tokens,
                                         const std::vector<const Lexicon*>& lexicons);

// Lexicon-driven corrector. Candidate lookup is bucketed by code-point length
// and memoized per distinct token, so it is safe and cheap to call from
// several threads.
class SpellCorrector {
 public:
  SpellCorrector(std::vector<const Lexicon*> lexicons, CorrectionPolicy policy,
                 std::map<std::string, std::size_t> frequencies = {});

  std::string correct(const std::string& token) const;
  bool in_lexicon(std::string_view lower_word) const;

  const CorrectionPolicy& policy() const { return policy_; }
  const std::vector<const Lexicon*>& lexicons() const { return lexicons_; }

 private:
  struct Entry {
    std::string word;
    std::u32string chars;
    bool person;
    std::size_t frequency;
  };

  std::string lookup(const std::string& lower) const;

  std::vector<const Lexicon*> lexicons_;
  CorrectionPolicy policy_;
  std::vector<std::vector<Entry>> by_length_;
  mutable std::mutex cache_mutex_;
  mutable std::unordered_map<std::string, std::string> cache_;
};

std::string correct_token(const std::string& token, const std::vector<const Lexicon*>& lexicons,
                          const CorrectionPolicy& policy);

// Hyphen joins followed by per-token correction, repeated until the article no
// longer changes. Ids and order are preserved. Lower-cased corpus frequencies
// break ties between equidistant candidates.
Corpus correct_corpus(const Corpus& corpus, const std::vector<const Lexicon*>& lexicons,
                      const CorrectionPolicy& policy, unsigned jobs = 1);

}  // namespace peoplegaz
