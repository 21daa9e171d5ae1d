#include "peoplegaz/influence.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include "json.hpp"
#include <set>
#include <sstream>

#include "peoplegaz/diag.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace fs = std::filesystem;

Weights parse_weights(std::string_view spec) {
  const auto parts = split(std::string(spec), ',');
  if (parts.size() != 3) throw Error("weights must be three comma-separated numbers, got '" + std::string(spec) + "'");
  double v[3];
  for (int i = 0; i < 3; ++i) {
    const std::string p = trim(parts[static_cast<std::size_t>(i)]);
    auto res = std::from_chars(p.data(), p.data() + p.size(), v[i]);
    if (p.empty() || res.ec != std::errc() || res.ptr != p.data() + p.size() || !std::isfinite(v[i]) || v[i] < 0.0)
      throw Error("bad weight '" + p + "' (weights must be non-negative numbers)");
  }
  return {v[0], v[1], v[2]};
}

DocumentStats DocumentStats::from_corpus(const Corpus& corpus) {
  DocumentStats s;
  for (const auto& a : corpus.articles()) s.lengths[a.id] = a.length();
  s.max_doc_length = corpus.max_doc_length();
  return s;
}

std::size_t DocumentStats::length_of(const std::string& article_id) const {
  auto it = lengths.find(article_id);
  if (it == lengths.end()) throw Error("no document length for article " + article_id);
  return it->second;
}

void write_document_stats(const DocumentStats& stats, const fs::path& path) {
  std::vector<std::pair<std::string, std::size_t>> rows(stats.lengths.begin(), stats.lengths.end());
  std::sort(rows.begin(), rows.end());
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& [id, len] : rows) out << id << '\t' << len << '\n';
  if (!out) throw Error("write failed: " + path.string());
}

DocumentStats read_document_stats(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  DocumentStats s;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    std::size_t len = 0;
    if (f.size() != 2 || f[0].empty() ||
        std::from_chars(f[1].data(), f[1].data() + f[1].size(), len).ptr != f[1].data() + f[1].size())
      throw ParseError(path.string(), line_no, "expected article_id<TAB>length");
    if (!s.lengths.emplace(f[0], len).second) throw ParseError(path.string(), line_no, "duplicate article " + f[0]);
    s.max_doc_length = std::max(s.max_doc_length, len);
  }
  return s;
}

double ndl(std::size_t doc_length, std::size_t max_doc_length) {
  if (max_doc_length == 0) throw Error("maximum document length is zero");
  if (doc_length > max_doc_length) throw Error("document longer than the maximum document length");
  if (doc_length == 0) {
    warn("zero-length document contributes NDL 0");
    return 0.0;
  }
  return static_cast<double>(doc_length) / static_cast<double>(max_doc_length);
}

double ndl(const Article& article, const Corpus& corpus) { return ndl(article.length(), corpus.max_doc_length()); }

double npnf(int pnf) {
  if (pnf < 1) throw Error("person name frequency must be >= 1, got " + std::to_string(pnf));
  return 1.0 + std::log10(static_cast<double>(pnf));
}

double nsim(std::size_t doc, const std::vector<int>& doc_topics) {
  if (doc >= doc_topics.size()) throw Error("document index out of range");
  std::size_t same = 0;
  for (std::size_t j = 0; j < doc_topics.size(); ++j) {
    if (j != doc && doc_topics[j] == doc_topics[doc]) ++same;
  }
  return static_cast<double>(same) / static_cast<double>(doc_topics.size());
}

double nsim_topn(std::size_t doc, const std::vector<std::vector<int>>& doc_top_topics, std::size_t n_topics,
                 int num_topics) {
  if (n_topics < 1) throw Error("top-N must be >= 1");
  if (num_topics < 1 || n_topics > static_cast<std::size_t>(num_topics))
    throw Error("top-N (" + std::to_string(n_topics) + ") exceeds the number of topics (" +
                std::to_string(num_topics) + ")");
  if (doc >= doc_top_topics.size()) throw Error("document index out of range");
  std::vector<std::set<int>> sets;
  sets.reserve(doc_top_topics.size());
  for (const auto& topics : doc_top_topics) {
    if (topics.size() < n_topics) throw Error("document carries fewer than N topics");
    sets.emplace_back(topics.begin(), topics.begin() + static_cast<std::ptrdiff_t>(n_topics));
  }
  std::size_t shared = 0;
  for (int t : sets[doc]) {
    for (std::size_t j = 0; j < sets.size(); ++j) {
      if (j != doc && sets[j].count(t)) ++shared;
    }
  }
  return static_cast<double>(shared) / static_cast<double>(n_topics * doc_top_topics.size());
}

double uniqt(const std::vector<int>& doc_topics, int num_topics) {
  if (num_topics < 1) throw Error("number of topics must be >= 1");
  const std::set<int> distinct(doc_topics.begin(), doc_topics.end());
  return static_cast<double>(distinct.size()) / num_topics;
}

DocumentIndexRecord di(const std::string& article_id, double ndl_value, double nsim_value, double npnf_value,
                       const Weights& w) {
  return {article_id, ndl_value, npnf_value, nsim_value,
          w.length * ndl_value + w.similarity * nsim_value + w.frequency * npnf_value};
}

InfluenceRecord ipi(const GazetteerEntry& entry, const DocumentStats& stats, int num_topics,
                    const RankOptions& options) {
  if (entry.docs.empty()) throw Error("person '" + entry.person + "' has no documents");
  InfluenceRecord r;
  r.person = entry.person;
  r.category = entry.category;
  std::vector<int> topics;
  topics.reserve(entry.docs.size());
  for (const auto& d : entry.docs) topics.push_back(d.topic);

  std::vector<std::vector<int>> top;
  if (options.top_n) {
    if (!options.ranked_topics) throw Error("top-N similarity needs ranked topics per document");
    for (const auto& d : entry.docs) {
      auto it = options.ranked_topics->find(d.article_id);
      if (it == options.ranked_topics->end()) throw Error("no ranked topics for article " + d.article_id);
      top.push_back(it->second);
    }
  }

  for (std::size_t i = 0; i < entry.docs.size(); ++i) {
    const auto& d = entry.docs[i];
    const double s = options.top_n ? nsim_topn(i, top, *options.top_n, num_topics) : nsim(i, topics);
    r.di_records.push_back(di(d.article_id, ndl(stats.length_of(d.article_id), stats.max_doc_length), s,
                              npnf(d.pnf), options.weights));
    if (i == 0 || r.di_records[i].di > r.di_records[r.argmax].di) r.argmax = i;
  }
  r.max_di = r.di_records[r.argmax].di;
  r.uniqt = uniqt(topics, num_topics);
  r.ipi = r.max_di + r.uniqt;
  return r;
}

std::vector<InfluenceRecord> rank_all(const Gazetteer& g, const DocumentStats& stats, const RankOptions& options) {
  std::vector<InfluenceRecord> out;
  out.reserve(g.entries.size());
  for (const auto& [name, entry] : g.entries) out.push_back(ipi(entry, stats, g.num_topics, options));
  std::sort(out.begin(), out.end(), [](const InfluenceRecord& a, const InfluenceRecord& b) {
    if (a.ipi != b.ipi) return a.ipi > b.ipi;
    return a.person < b.person;
  });
  for (std::size_t i = 0; i < out.size(); ++i) {
    out[i].position = i + 1;
    out[i].rank = (i > 0 && out[i].ipi == out[i - 1].ipi) ? out[i - 1].rank : i + 1;
  }
  return out;
}

std::vector<CategoryStats> category_stats(const Gazetteer& g, const DocumentStats& stats) {
  const PersonCategory order[] = {PersonCategory::kNotInfluential, PersonCategory::kPopular, PersonCategory::kElite};
  std::vector<CategoryStats> rows;
  for (PersonCategory c : order) {
    CategoryStats row{c};
    std::size_t pairs = 0;
    double docs = 0.0, length = 0.0, pnf = 0.0;
    for (const auto& [name, entry] : g.entries) {
      if (entry.category != c) continue;
      ++row.people;
      docs += static_cast<double>(entry.docs.size());
      for (const auto& d : entry.docs) {
        ++pairs;
        length += static_cast<double>(stats.length_of(d.article_id));
        pnf += d.pnf;
      }
    }
    if (row.people > 0) {
      row.empty = false;
      row.avg_documents = docs / static_cast<double>(row.people);
      row.avg_doc_length = length / static_cast<double>(pairs);
      row.avg_pnf = pnf / static_cast<double>(pairs);
    }
    rows.push_back(row);
  }
  return rows;
}

double truncate_decimals(double value, int decimals) {
  const double scale = std::pow(10.0, decimals);
  return std::floor(value * scale + 1e-9) / scale;
}

namespace {

std::string num(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

std::string csv_field(const std::string& s) {
  if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
  std::string out = "\"";
  for (char c : s) {
    if (c == '"') out += '"';
    out += c;
  }
  return out + '"';
}

const GazetteerDoc& best_doc(const InfluenceRecord& r, const Gazetteer& g) {
  const auto& entry = g.entries.at(r.person);
  return entry.docs.at(r.argmax);
}

std::string words_for(const std::map<int, std::string>& topic_words, int topic) {
  auto it = topic_words.find(topic);
  return it == topic_words.end() ? std::string() : it->second;
}

}  // namespace

std::string ranking_csv(const std::vector<InfluenceRecord>& records, const Gazetteer& g,
                        const std::map<int, std::string>& topic_words) {
  std::ostringstream out;
  out << "position,rank,person,ipi,n_articles,category,ndl,npnf,nsim,uniqt,max_di,article_id,topic,topic_words\n";
  for (const auto& r : records) {
    const auto& d = best_doc(r, g);
    const auto& b = r.best();
    out << r.position << ',' << r.rank << ',' << csv_field(r.person) << ',' << num(r.ipi) << ','
        << r.di_records.size() << ',' << category_name(r.category) << ',' << num(b.ndl) << ',' << num(b.npnf) << ','
        << num(b.nsim) << ',' << num(r.uniqt) << ',' << num(r.max_di) << ',' << csv_field(b.article_id) << ','
        << d.topic << ',' << csv_field(words_for(topic_words, d.topic)) << '\n';
  }
  return out.str();
}

std::string ranking_json(const std::vector<InfluenceRecord>& records, const Gazetteer& g,
                         const std::map<int, std::string>& topic_words) {
  nlohmann::ordered_json people = nlohmann::ordered_json::array();
  for (const auto& r : records) {
    const auto& entry = g.entries.at(r.person);
    nlohmann::ordered_json docs = nlohmann::ordered_json::array();
    for (std::size_t i = 0; i < r.di_records.size(); ++i) {
      const auto& rec = r.di_records[i];
      docs.push_back({{"article_id", rec.article_id},
                      {"topic", entry.docs[i].topic},
                      {"pnf", entry.docs[i].pnf},
                      {"ndl", rec.ndl},
                      {"npnf", rec.npnf},
                      {"nsim", rec.nsim},
                      {"di", rec.di}});
    }
    const auto& d = best_doc(r, g);
    people.push_back({{"position", r.position},
                      {"rank", r.rank},
                      {"person", r.person},
                      {"ipi", r.ipi},
                      {"n_articles", r.di_records.size()},
                      {"category", category_name(r.category)},
                      {"max_di", r.max_di},
                      {"uniqt", r.uniqt},
                      {"argmax_article", r.best().article_id},
                      {"topic", d.topic},
                      {"topic_words", words_for(topic_words, d.topic)},
                      {"documents", std::move(docs)}});
  }
  nlohmann::ordered_json root = {{"num_topics", g.num_topics}, {"people", std::move(people)}};
  return root.dump(2) + "\n";
}

std::string category_stats_csv(const std::vector<CategoryStats>& rows) {
  std::ostringstream out;
  out << "category,people,avg_documents,avg_doc_length,avg_pnf,empty\n";
  for (const auto& r : rows) {
    out << category_name(r.category) << ',' << r.people << ',' << num(r.avg_documents) << ','
        << num(r.avg_doc_length) << ',' << num(r.avg_pnf) << ',' << (r.empty ? "true" : "false") << '\n';
  }
  return out.str();
}

}  // namespace peoplegaz
