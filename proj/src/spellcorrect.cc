#include "peoplegaz/spellcorrect.h"

#include <algorithm>
#include <fstream>
#include <tuple>

#include "parallel.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace {

std::size_t levenshtein(const std::u32string& a, const std::u32string& b, std::size_t limit) {
  const std::size_t n = a.size(), m = b.size();
  if ((n > m ? n - m : m - n) > limit) return limit + 1;
  if (n == 0) return m;
  if (m == 0) return n;
  std::vector<std::size_t> prev(m + 1), cur(m + 1);
  for (std::size_t j = 0; j <= m; ++j) prev[j] = j;
  for (std::size_t i = 1; i <= n; ++i) {
    cur[0] = i;
    std::size_t row_min = cur[0];
    for (std::size_t j = 1; j <= m; ++j) {
      const std::size_t sub = prev[j - 1] + (a[i - 1] == b[j - 1] ? 0 : 1);
      cur[j] = std::min({prev[j] + 1, cur[j - 1] + 1, sub});
      row_min = std::min(row_min, cur[j]);
    }
    if (row_min > limit) return limit + 1;
    std::swap(prev, cur);
  }
  return std::min(prev[m], limit + 1);
}

bool correctable_shape(std::string_view token) {
  for (char c : token) {
    const auto u = static_cast<unsigned char>(c);
    const bool letter = (c >= 'a' && c <= 'z') || (c >= 'A' && c <= 'Z') || u >= 0x80;
    if (!letter) return false;
  }
  return true;
}

bool any_contains(const std::vector<const Lexicon*>& lexicons, const std::string& lower) {
  return std::any_of(lexicons.begin(), lexicons.end(), [&](const Lexicon* l) { return l->contains(lower); });
}

}  // namespace

std::size_t edit_distance(std::string_view a, std::string_view b) {
  const auto ua = decode_utf8(a), ub = decode_utf8(b);
  return levenshtein(ua, ub, std::max(ua.size(), ub.size()));
}

std::size_t bounded_edit_distance(std::string_view a, std::string_view b, std::size_t limit) {
  return levenshtein(decode_utf8(a), decode_utf8(b), limit);
}

Lexicon::Lexicon(LexiconKind kind, const std::vector<std::string>& words) : kind_(kind) {
  for (const auto& w : words) add(w);
}

void Lexicon::add(std::string_view word) {
  std::string w = to_lower(trim(word));
  if (w.empty()) return;
  if (std::any_of(w.begin(), w.end(), is_ascii_space)) return;
  words_.insert(std::move(w));
}

Lexicon Lexicon::load(const std::filesystem::path& path, LexiconKind kind) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read lexicon " + path.string());
  Lexicon lex(kind);
  std::string line;
  while (std::getline(in, line)) lex.add(line);
  return lex;
}

std::vector<std::string> join_hyphenated(const std::vector<std::string>& tokens,
                                         const std::vector<const Lexicon*>& lexicons) {
  std::vector<std::string> out;
  out.reserve(tokens.size());
  std::size_t i = 0;
  while (i < tokens.size()) {
    std::string cur = tokens[i];
    while (cur.size() > 1 && cur.back() == '-' && i + 1 < tokens.size()) {
      std::string fused = cur.substr(0, cur.size() - 1) + tokens[i + 1];
      if (!any_contains(lexicons, to_lower(fused))) break;
      cur = std::move(fused);
      ++i;
    }
    if (i + 1 == tokens.size() && !cur.empty() && cur.back() == '-') cur.pop_back();
    if (!cur.empty()) out.push_back(std::move(cur));
    ++i;
  }
  return out;
}

SpellCorrector::SpellCorrector(std::vector<const Lexicon*> lexicons, CorrectionPolicy policy,
                               std::map<std::string, std::size_t> frequencies)
    : lexicons_(std::move(lexicons)), policy_(policy) {
  std::map<std::string, bool> merged;  // word -> in a person lexicon
  for (const Lexicon* lex : lexicons_) {
    for (const auto& w : lex->words()) merged[w] |= lex->kind() == LexiconKind::kPersonNames;
  }
  for (const auto& [word, person] : merged) {
    std::u32string chars = decode_utf8(word);
    const std::size_t len = chars.size();
    if (by_length_.size() <= len) by_length_.resize(len + 1);
    auto f = frequencies.find(word);
    by_length_[len].push_back({word, std::move(chars), person, f == frequencies.end() ? 0 : f->second});
  }
}

bool SpellCorrector::in_lexicon(std::string_view lower_word) const {
  return any_contains(lexicons_, std::string(lower_word));
}

std::string SpellCorrector::lookup(const std::string& lower) const {
  {
    std::lock_guard<std::mutex> lock(cache_mutex_);
    auto it = cache_.find(lower);
    if (it != cache_.end()) return it->second;
  }
  const std::u32string target = decode_utf8(lower);
  const std::size_t len = target.size();
  const std::size_t limit = policy_.max_edit_distance;
  const Entry* best = nullptr;
  std::size_t best_dist = limit + 1;
  auto better = [&](const Entry& e, std::size_t d) {
    if (!best) return true;
    if (d != best_dist) return d < best_dist;
    if (policy_.prefer_person_lexicon && e.person != best->person) return e.person;
    if (e.frequency != best->frequency) return e.frequency > best->frequency;
    return e.word < best->word;
  };
  const std::size_t lo = len > limit ? len - limit : 0;
  const std::size_t hi = std::min(len + limit, by_length_.empty() ? 0 : by_length_.size() - 1);
  for (std::size_t l = lo; l <= hi && !by_length_.empty(); ++l) {
    for (const Entry& e : by_length_[l]) {
      const std::size_t d = levenshtein(target, e.chars, best ? best_dist : limit);
      if (d <= limit && better(e, d)) {
        best = &e;
        best_dist = d;
      }
    }
  }
  std::string result = best ? best->word : std::string();
  std::lock_guard<std::mutex> lock(cache_mutex_);
  cache_.emplace(lower, result);
  return result;
}

std::string SpellCorrector::correct(const std::string& token) const {
  if (decode_utf8(token).size() < policy_.min_token_length) return token;
  if (has_digit(token) || !correctable_shape(token)) return token;
  const std::string lower = to_lower(token);
  if (in_lexicon(lower)) return token;
  const std::string candidate = lookup(lower);
  if (candidate.empty()) return token;
  return match_leading_case(candidate, token);
}

std::string correct_token(const std::string& token, const std::vector<const Lexicon*>& lexicons,
                          const CorrectionPolicy& policy) {
  if (lexicons.empty() || std::all_of(lexicons.begin(), lexicons.end(), [](const Lexicon* l) { return l->empty(); }))
    throw Error("spelling correction needs a non-empty lexicon");
  return SpellCorrector(lexicons, policy).correct(token);
}

Corpus correct_corpus(const Corpus& corpus, const std::vector<const Lexicon*>& lexicons,
                      const CorrectionPolicy& policy, unsigned jobs) {
  if (lexicons.empty() || std::all_of(lexicons.begin(), lexicons.end(), [](const Lexicon* l) { return l->empty(); }))
    throw Error("spelling correction needs a non-empty lexicon");

  std::map<std::string, std::size_t> frequencies;
  for (const auto& [token, count] : corpus.vocabulary()) frequencies[to_lower(token)] += count;
  const SpellCorrector corrector(lexicons, policy, std::move(frequencies));

  std::vector<Article> out(corpus.size());
  detail::parallel_for(corpus.size(), jobs, [&](std::size_t i) {
    const Article& src = corpus[i];
    std::vector<std::string> tokens = src.tokens;
    // Joins and corrections can enable each other; iterate to a fixed point.
    // Every pass either shortens the stream or moves a token into the lexicon.
    for (;;) {
      std::vector<std::string> next = join_hyphenated(tokens, lexicons);
      for (auto& t : next) t = corrector.correct(t);
      if (next == tokens) break;
      tokens = std::move(next);
    }
    out[i].id = src.id;
    out[i].raw_text = src.raw_text;
    out[i].tokens = std::move(tokens);
  });
  return Corpus(std::move(out));
}

}  // namespace peoplegaz
