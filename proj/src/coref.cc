#include "peoplegaz/coref.h"

#include <algorithm>
#include <fstream>
#include <numeric>

#include "parallel.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace fs = std::filesystem;

namespace {

const std::map<std::string, Gender>& pronoun_table() {
  static const std::map<std::string, Gender> t = {
      {"he", Gender::kMale},       {"him", Gender::kMale},      {"his", Gender::kMale},
      {"himself", Gender::kMale},  {"she", Gender::kFemale},    {"her", Gender::kFemale},
      {"hers", Gender::kFemale},   {"herself", Gender::kFemale}};
  return t;
}

std::string strip_period(const std::string& t) {
  return !t.empty() && t.back() == '.' ? t.substr(0, t.size() - 1) : t;
}

bool compatible(Gender a, Gender b) { return a == Gender::kUnknown || b == Gender::kUnknown || a == b; }

// Lower-cased name tokens with any leading honorifics removed.
std::vector<std::string> name_tokens(const std::string& surface, const std::set<std::string>& honorifics) {
  auto toks = tokenize(surface);
  std::size_t b = 0;
  while (b + 1 < toks.size() && honorifics.count(strip_period(toks[b]))) ++b;
  std::vector<std::string> out;
  for (std::size_t i = b; i < toks.size(); ++i) out.push_back(to_lower(toks[i]));
  return out;
}

class DisjointSets {
 public:
  explicit DisjointSets(std::size_t n) : parent_(n) { std::iota(parent_.begin(), parent_.end(), 0); }
  std::size_t find(std::size_t x) {
    while (parent_[x] != x) x = parent_[x] = parent_[parent_[x]];
    return x;
  }
  // The smaller root wins so cluster ids follow mention order.
  void unite(std::size_t a, std::size_t b) {
    a = find(a);
    b = find(b);
    if (a == b) return;
    if (b < a) std::swap(a, b);
    parent_[b] = a;
  }

 private:
  std::vector<std::size_t> parent_;
};

}  // namespace

bool is_pronoun(const std::string& token) { return pronoun_table().count(to_lower(token)) > 0; }

Gender pronoun_gender(const std::string& token) {
  auto it = pronoun_table().find(to_lower(token));
  return it == pronoun_table().end() ? Gender::kUnknown : it->second;
}

Gender honorific_gender(const std::string& honorific) {
  static const std::set<std::string> male = {"Mr", "Capt", "Captain", "Sir", "Gen", "Col", "Lord"};
  static const std::set<std::string> female = {"Mrs", "Miss", "Dame", "Ms", "Mme", "Lady"};
  const std::string h = strip_period(honorific);
  if (male.count(h)) return Gender::kMale;
  if (female.count(h)) return Gender::kFemale;
  return Gender::kUnknown;
}

std::vector<Mention> detect_mentions(const Article& article, const std::vector<PersonMention>& person_mentions,
                                     const CorefOptions& options) {
  const auto& tok = article.tokens;
  const std::size_t n = tok.size();
  std::vector<bool> covered(n, false);
  std::vector<Mention> out;
  std::set<std::string> surnames;

  auto is_honorific = [&](std::size_t i) { return options.honorifics.count(strip_period(tok[i])) > 0; };

  for (const auto& pm : person_mentions) {
    if (pm.article_id != article.id || pm.start >= pm.end || pm.end > n) continue;
    Mention m{pm.surface, pm.start, pm.end, MentionKind::kName, Gender::kUnknown};
    if (is_honorific(pm.start)) {
      m.gender = honorific_gender(tok[pm.start]);
    } else if (pm.start > 0 && is_honorific(pm.start - 1)) {
      m.gender = honorific_gender(tok[pm.start - 1]);
    }
    for (std::size_t i = pm.start; i < pm.end; ++i) covered[i] = true;
    if (!is_honorific(pm.end - 1)) surnames.insert(tok[pm.end - 1]);
    out.push_back(std::move(m));
  }

  // Honorific + capitalised surname that the tagger missed.
  for (std::size_t i = 0; i + 1 < n; ++i) {
    if (covered[i] || covered[i + 1] || !is_honorific(i) || !is_capitalized(tok[i + 1]) || is_pronoun(tok[i + 1]))
      continue;
    out.push_back({tok[i] + " " + tok[i + 1], i, i + 2, MentionKind::kNominal, honorific_gender(tok[i])});
    covered[i] = covered[i + 1] = true;
    surnames.insert(tok[i + 1]);
  }

  for (std::size_t i = 0; i < n; ++i) {
    if (covered[i]) continue;
    if (is_pronoun(tok[i])) {
      out.push_back({tok[i], i, i + 1, MentionKind::kPronoun, pronoun_gender(tok[i])});
    } else if (surnames.count(tok[i])) {
      out.push_back({tok[i], i, i + 1, MentionKind::kNominal, Gender::kUnknown});
    }
  }

  std::sort(out.begin(), out.end(), [](const Mention& a, const Mention& b) {
    return std::tie(a.start, a.end) < std::tie(b.start, b.end);
  });
  return out;
}

std::vector<CoreferenceChain> resolve_chains(const std::vector<Mention>& mentions, const CorefOptions& options) {
  const std::size_t n = mentions.size();
  DisjointSets sets(n);
  std::vector<std::vector<std::string>> toks(n);
  std::vector<std::string> key(n);
  for (std::size_t i = 0; i < n; ++i) {
    if (mentions[i].kind == MentionKind::kPronoun) continue;
    toks[i] = name_tokens(mentions[i].surface, options.honorifics);
    key[i] = join(toks[i], " ");
  }

  // Sieve 1: exact match of the lower-cased name.
  {
    std::map<std::string, std::size_t> first;
    for (std::size_t i = 0; i < n; ++i) {
      if (key[i].empty()) continue;
      auto [it, fresh] = first.emplace(key[i], i);
      if (!fresh) sets.unite(it->second, i);
    }
  }

  // Sieve 2: relaxed head match. A shorter name whose tokens all occur in a
  // longer name with the same last token joins that name's cluster; the
  // nearest preceding candidate wins, then the nearest following one.
  for (std::size_t i = 0; i < n; ++i) {
    if (toks[i].empty()) continue;
    auto matches = [&](std::size_t j) {
      if (toks[j].size() <= toks[i].size() || toks[j].back() != toks[i].back()) return false;
      return std::all_of(toks[i].begin(), toks[i].end(), [&](const std::string& t) {
        return std::find(toks[j].begin(), toks[j].end(), t) != toks[j].end();
      });
    };
    std::size_t target = n;
    for (std::size_t j = i; j-- > 0;) {
      if (matches(j)) {
        target = j;
        break;
      }
    }
    if (target == n) {
      for (std::size_t j = i + 1; j < n; ++j) {
        if (matches(j)) {
          target = j;
          break;
        }
      }
    }
    if (target != n) sets.unite(target, i);
  }

  // Cluster gender: the first known gender among its non-pronoun mentions.
  auto cluster_gender = [&](std::size_t root) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mentions[j].kind != MentionKind::kPronoun && mentions[j].gender != Gender::kUnknown && sets.find(j) == root)
        return mentions[j].gender;
    }
    return Gender::kUnknown;
  };
  auto has_name = [&](std::size_t root) {
    for (std::size_t j = 0; j < n; ++j) {
      if (mentions[j].kind != MentionKind::kPronoun && sets.find(j) == root) return true;
    }
    return false;
  };

  // Sieve 3: a pronoun joins the nearest preceding compatible name cluster.
  for (std::size_t i = 0; i < n; ++i) {
    const Mention& p = mentions[i];
    if (p.kind != MentionKind::kPronoun) continue;
    for (std::size_t j = i; j-- > 0;) {
      const Mention& prev = mentions[j];
      if (prev.end > p.start) continue;
      if (p.start - prev.end > options.pronoun_window) break;
      const std::size_t root = sets.find(j);
      if (!has_name(root) || !compatible(cluster_gender(root), p.gender)) continue;
      sets.unite(root, i);
      break;
    }
  }

  std::map<std::size_t, CoreferenceChain> by_root;
  for (std::size_t i = 0; i < n; ++i) by_root[sets.find(i)].mentions.push_back(mentions[i]);
  std::vector<CoreferenceChain> chains;
  for (auto& [root, chain] : by_root) {
    std::size_t best = 0;
    bool found = false;
    for (std::size_t j = 0; j < chain.mentions.size(); ++j) {
      const Mention& m = chain.mentions[j];
      if (m.kind == MentionKind::kPronoun) continue;
      const std::size_t len = m.end - m.start;
      const Mention& cur = chain.mentions[best];
      const bool better =
          !found || (m.kind == MentionKind::kName && cur.kind != MentionKind::kName) ||
          (m.kind == cur.kind && len > cur.end - cur.start);
      if (better) {
        best = j;
        found = true;
      }
    }
    chain.representative = best;
    chains.push_back(std::move(chain));
  }
  return chains;
}

std::vector<CoreferenceChain> drop_singletons(std::vector<CoreferenceChain> chains) {
  std::erase_if(chains, [](const CoreferenceChain& c) {
    return c.size() < 2 && (c.mentions.empty() || c.mentions[0].kind == MentionKind::kPronoun);
  });
  return chains;
}

std::map<std::string, int> adjusted_pnf(const PersonEntity& entity,
                                        const std::map<std::string, std::vector<CoreferenceChain>>& chains_by_article) {
  std::map<std::string, int> out = entity.occurrences;
  for (auto& [article, pnf] : out) {
    auto it = chains_by_article.find(article);
    if (it == chains_by_article.end()) continue;
    for (const auto& chain : it->second) {
      if (chain.mentions.empty() || chain.head().kind == MentionKind::kPronoun) continue;
      if (canonical_form(chain.head().surface) == entity.canonical_name)
        pnf = std::max(pnf, static_cast<int>(chain.size()));
    }
  }
  return out;
}

std::vector<PersonEntity> apply_coreference(const Corpus& corpus, const std::vector<PersonMention>& mentions,
                                            const std::vector<PersonEntity>& entities, const CorefOptions& options,
                                            unsigned jobs,
                                            std::map<std::string, std::vector<CoreferenceChain>>* chains_out) {
  std::set<std::string> wanted;
  for (const auto& e : entities) {
    for (const auto& [id, pnf] : e.occurrences) wanted.insert(id);
  }
  std::map<std::string, std::vector<PersonMention>> by_article;
  for (const auto& m : mentions) by_article[m.article_id].push_back(m);

  std::vector<std::string> ids(wanted.begin(), wanted.end());
  std::vector<std::vector<CoreferenceChain>> results(ids.size());
  detail::parallel_for(ids.size(), jobs, [&](std::size_t i) {
    const Article* a = corpus.find(ids[i]);
    if (!a) return;
    static const std::vector<PersonMention> none;
    auto it = by_article.find(ids[i]);
    const auto detected = detect_mentions(*a, it == by_article.end() ? none : it->second, options);
    results[i] = drop_singletons(resolve_chains(detected, options));
  });

  std::map<std::string, std::vector<CoreferenceChain>> chains;
  for (std::size_t i = 0; i < ids.size(); ++i) chains.emplace(ids[i], std::move(results[i]));

  std::vector<PersonEntity> out;
  out.reserve(entities.size());
  for (const auto& e : entities) out.push_back({e.canonical_name, adjusted_pnf(e, chains)});
  if (chains_out) *chains_out = std::move(chains);
  return out;
}

void write_chain_dump(const std::vector<CoreferenceChain>& chains, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (std::size_t i = 0; i < chains.size(); ++i) {
    out << i << '\t' << chains[i].head().surface << '\t' << chains[i].size() << '\n';
  }
}

}  // namespace peoplegaz
