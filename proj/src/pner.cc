#include "peoplegaz/pner.h"

#include <algorithm>
#include <fstream>
#include <iterator>
#include <tuple>

#include "parallel.h"
#include "peoplegaz/diag.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace fs = std::filesystem;

std::string_view category_name(PersonCategory c) {
  switch (c) {
    case PersonCategory::kNotInfluential:
      return "NotInfluential";
    case PersonCategory::kPopular:
      return "Popular";
    case PersonCategory::kElite:
      return "Elite";
  }
  return "?";
}

PersonCategory categorize(std::size_t article_count, const CategoryThresholds& t) {
  if (article_count < t.lo) return PersonCategory::kNotInfluential;
  if (article_count < t.hi) return PersonCategory::kPopular;
  return PersonCategory::kElite;
}

PersonCategory categorize(const PersonEntity& entity, const CategoryThresholds& t) {
  return categorize(entity.article_count(), t);
}

const std::set<std::string>& default_honorifics() {
  static const std::set<std::string> h = {"Mr",   "Mrs",  "Miss",  "Ms", "Dr",  "Capt", "Captain",
                                          "Sir",  "Dame", "Gen",   "Col", "Rev", "Judge", "Mme"};
  return h;
}

std::set<std::string> load_honorifics(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read honorifics " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string h = trim(line);
    if (!h.empty() && h[0] != '#') out.insert(std::move(h));
  }
  return out;
}

namespace {

// Capitalised words that never start or continue a name.
const std::set<std::string>& run_breakers() {
  static const std::set<std::string> s = {
      "The",  "An",   "He",   "She",  "It",   "His",  "Her",  "Him",  "In",    "On",  "At",
      "Is",   "Was",  "Of",   "To",   "For",  "By",   "With", "From", "And",   "But", "Or",
      "This", "That", "They", "We",   "Who",  "When", "As",   "If",   "There", "Its", "Their"};
  return s;
}

// Organisation suffixes; a name run ends before them.
const std::set<std::string>& org_markers() {
  static const std::set<std::string> s = {"Co", "Company", "Bros", "Brothers", "Corporation", "Inc", "Sons"};
  return s;
}

std::string strip_period(const std::string& t) {
  return !t.empty() && t.back() == '.' ? t.substr(0, t.size() - 1) : t;
}

bool is_initial(const std::string& t) { return t.size() == 1 && is_ascii_upper(t[0]); }

}  // namespace

HeuristicTagger::HeuristicTagger(const Lexicon& person_names, std::set<std::string> honorifics)
    : names_(person_names), honorifics_(std::move(honorifics)) {}

std::vector<PersonMention> HeuristicTagger::tag(const Article& article) const {
  const auto& tok = article.tokens;
  const std::size_t n = tok.size();
  auto is_honorific = [&](std::size_t i) { return honorifics_.count(strip_period(tok[i])) > 0; };
  auto is_name_token = [&](std::size_t i) {
    return is_capitalized(tok[i]) && !run_breakers().count(tok[i]) && !org_markers().count(tok[i]) &&
           !is_honorific(i);
  };
  // [b, e) is the raw run; returns the run end after dropping trailing initials.
  auto run_from = [&](std::size_t b, std::size_t& raw_end) {
    std::size_t e = b;
    while (e < n && is_name_token(e)) ++e;
    raw_end = e;
    while (e > b && is_initial(tok[e - 1])) --e;
    return e;
  };
  auto make = [&](std::size_t b, std::size_t e) {
    std::vector<std::string> parts(tok.begin() + static_cast<std::ptrdiff_t>(b),
                                   tok.begin() + static_cast<std::ptrdiff_t>(e));
    return PersonMention{join(parts, " "), article.id, b, e};
  };

  std::vector<PersonMention> out;
  std::size_t i = 0;
  while (i < n) {
    if (is_honorific(i)) {
      std::size_t raw_end = 0;
      const std::size_t e = run_from(i + 1, raw_end);
      const std::size_t name_len = e - (i + 1);
      if (name_len >= 2) {
        out.push_back(make(i + 1, e));
      } else if (name_len == 1) {
        out.push_back(make(i, e));
      }
      i = std::max(raw_end, i + 1);
      continue;
    }
    if (is_name_token(i)) {
      std::size_t raw_end = 0;
      const std::size_t e = run_from(i, raw_end);
      if (e - i >= 2) {
        bool known = false;
        for (std::size_t j = i; j < e && !known; ++j) known = names_.contains(to_lower(tok[j]));
        if (known) out.push_back(make(i, e));
      }
      i = std::max(raw_end, i + 1);
      continue;
    }
    ++i;
  }
  return out;
}

ExternalMentionTagger::ExternalMentionTagger(std::vector<PersonMention> mentions) {
  for (auto& m : mentions) by_article_[m.article_id].push_back(std::move(m));
}

ExternalMentionTagger ExternalMentionTagger::load(const fs::path& path) {
  return ExternalMentionTagger(read_mentions(path));
}

std::vector<PersonMention> ExternalMentionTagger::tag(const Article& article) const {
  auto it = by_article_.find(article.id);
  return it == by_article_.end() ? std::vector<PersonMention>{} : it->second;
}

void write_mentions(const std::vector<PersonMention>& mentions, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& m : mentions) out << m.article_id << '\t' << m.start << '\t' << m.end << '\t' << m.surface << '\n';
}

std::vector<PersonMention> read_mentions(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<PersonMention> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty() || line[0] == '#') continue;
    const auto f = split(line, '\t');
    if (f.size() != 4) throw ParseError(path.string(), line_no, "expected 4 tab-separated fields");
    PersonMention m;
    m.article_id = f[0];
    try {
      m.start = std::stoul(f[1]);
      m.end = std::stoul(f[2]);
    } catch (const std::exception&) {
      throw ParseError(path.string(), line_no, "bad span");
    }
    m.surface = f[3];
    out.push_back(std::move(m));
  }
  return out;
}

std::vector<PersonMention> tag_persons(const Article& article, const PersonTagger& tagger) {
  std::vector<PersonMention> raw;
  try {
    raw = tagger.tag(article);
  } catch (const std::exception& e) {
    warn("tagger failed on article " + article.id + ": " + e.what());
    return {};
  }
  std::vector<PersonMention> out;
  out.reserve(raw.size());
  for (auto& m : raw) {
    if (m.end <= m.start || m.end > article.length()) {
      warn("dropping mention with invalid span in article " + article.id);
      continue;
    }
    m.article_id = article.id;
    out.push_back(std::move(m));
  }
  std::sort(out.begin(), out.end(),
            [](const PersonMention& a, const PersonMention& b) { return std::tie(a.start, a.end) < std::tie(b.start, b.end); });
  return out;
}

std::vector<PersonMention> tag_corpus(const Corpus& corpus, const PersonTagger& tagger, unsigned jobs) {
  std::vector<std::vector<PersonMention>> per_article(corpus.size());
  detail::parallel_for(corpus.size(), jobs, [&](std::size_t i) { per_article[i] = tag_persons(corpus[i], tagger); });
  std::vector<PersonMention> out;
  for (auto& v : per_article) std::move(v.begin(), v.end(), std::back_inserter(out));
  return out;
}

std::string canonical_form(std::string_view surface) { return to_lower(join(tokenize(surface), " ")); }

std::vector<PersonEntity> canonicalize(const std::vector<PersonMention>& mentions) {
  std::map<std::string, std::vector<const PersonMention*>> by_article;
  for (const auto& m : mentions) by_article[m.article_id].push_back(&m);

  std::map<std::string, PersonEntity> entities;
  for (const auto& [article, ms] : by_article) {
    std::map<std::string, std::set<std::string>> forms;  // canonical -> token set
    std::vector<std::string> canon_of;
    canon_of.reserve(ms.size());
    for (const PersonMention* m : ms) {
      std::string c = canonical_form(m->surface);
      if (c.empty()) {
        canon_of.emplace_back();
        continue;
      }
      const auto toks = tokenize(c);
      forms.emplace(c, std::set<std::string>(toks.begin(), toks.end()));
      canon_of.push_back(std::move(c));
    }
    auto strict_subset = [](const std::set<std::string>& a, const std::set<std::string>& b) {
      return a.size() < b.size() && std::includes(b.begin(), b.end(), a.begin(), a.end());
    };
    // canonical -> the unique maximal superset form, or empty when ambiguous.
    std::map<std::string, std::string> target;
    for (const auto& [c, set] : forms) {
      std::vector<std::string> supers;
      bool maximal = true;
      for (const auto& [d, other] : forms) {
        if (strict_subset(set, other)) maximal = false;
      }
      if (maximal) {
        target[c] = c;
        continue;
      }
      for (const auto& [d, other] : forms) {
        if (!strict_subset(set, other)) continue;
        bool other_maximal = true;
        for (const auto& [e, third] : forms) {
          if (strict_subset(other, third)) other_maximal = false;
        }
        if (other_maximal) supers.push_back(d);
      }
      target[c] = supers.size() == 1 ? supers.front() : std::string();
    }
    for (const auto& c : canon_of) {
      if (c.empty()) continue;
      const std::string& t = target[c];
      if (t.empty() || forms[t].size() < 2) continue;
      auto& e = entities[t];
      e.canonical_name = t;
      ++e.occurrences[article];
    }
  }
  std::vector<PersonEntity> out;
  out.reserve(entities.size());
  for (auto& [name, e] : entities) out.push_back(std::move(e));
  return out;
}

namespace {

void check_id(const std::string& id) {
  if (id.find_first_of("\t:;\n") != std::string::npos) throw Error("article id not representable: " + id);
}

}  // namespace

void write_entities(const std::vector<PersonEntity>& entities, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& e : entities) {
    out << e.canonical_name << '\t';
    bool first = true;
    for (const auto& [id, pnf] : e.occurrences) {
      check_id(id);
      out << (first ? "" : ";") << id << ':' << pnf;
      first = false;
    }
    out << '\n';
  }
}

std::vector<PersonEntity> read_entities(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<PersonEntity> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 2 || f[0].empty()) throw ParseError(path.string(), line_no, "expected name<TAB>occurrences");
    PersonEntity e;
    e.canonical_name = f[0];
    for (const auto& item : split(f[1], ';')) {
      const auto kv = split(item, ':');
      if (kv.size() != 2 || kv[0].empty()) throw ParseError(path.string(), line_no, "bad occurrence '" + item + "'");
      int pnf = 0;
      try {
        pnf = std::stoi(kv[1]);
      } catch (const std::exception&) {
        throw ParseError(path.string(), line_no, "bad PNF '" + kv[1] + "'");
      }
      if (pnf < 1) throw ParseError(path.string(), line_no, "PNF must be >= 1");
      e.occurrences[kv[0]] = pnf;
    }
    out.push_back(std::move(e));
  }
  return out;
}

}  // namespace peoplegaz
