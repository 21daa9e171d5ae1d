#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

#include "peoplegaz/corpus.h"
#include "peoplegaz/gazetteer.h"
#include "peoplegaz/topics.h"

namespace peoplegaz {

struct Weights {
  double length = 1.0;      // w_a, on NDL
  double similarity = 1.0;  // w_b, on NSIM
  double frequency = 1.0;   // w_c, on NPNF
};

Weights parse_weights(std::string_view spec);  // "a,b,c"

// Article lengths and the corpus maximum, the only corpus facts ranking needs.
struct DocumentStats {
  std::unordered_map<std::string, std::size_t> lengths;
  std::size_t max_doc_length = 0;

  static DocumentStats from_corpus(const Corpus& corpus);
  std::size_t length_of(const std::string& article_id) const;
};

void write_document_stats(const DocumentStats& stats, const std::filesystem::path& path);
DocumentStats read_document_stats(const std::filesystem::path& path);

double ndl(std::size_t doc_length, std::size_t max_doc_length);
double ndl(const Article& article, const Corpus& corpus);

// 1 + log10(pnf).
double npnf(int pnf);

// Share of the OTHER documents in the list that have the topic of document
// `doc`, over the list size.
double nsim(std::size_t doc, const std::vector<int>& doc_topics);

// Top-N variant: each document carries its N best topics; sums the per-topic
// sharing counts (other documents only) and divides by N * n.
double nsim_topn(std::size_t doc, const std::vector<std::vector<int>>& doc_top_topics, std::size_t n_topics,
                 int num_topics);

double uniqt(const std::vector<int>& doc_topics, int num_topics);

struct DocumentIndexRecord {
  std::string article_id;
  double ndl = 0.0;
  double npnf = 0.0;
  double nsim = 0.0;
  double di = 0.0;
};

DocumentIndexRecord di(const std::string& article_id, double ndl_value, double nsim_value, double npnf_value,
                       const Weights& weights);

struct InfluenceRecord {
  std::string person;
  std::vector<DocumentIndexRecord> di_records;
  std::size_t argmax = 0;  // index into di_records, first maximum
  double max_di = 0.0;
  double uniqt = 0.0;
  double ipi = 0.0;
  PersonCategory category = PersonCategory::kNotInfluential;
  std::size_t position = 0;  // strict 1-based order after ranking
  std::size_t rank = 0;      // competition rank (ties share a rank)

  const DocumentIndexRecord& best() const { return di_records[argmax]; }
};

struct RankOptions {
  Weights weights;
  // When set, NSIM uses each document's top-N topics.
  std::optional<std::size_t> top_n;
  const RankedTopics* ranked_topics = nullptr;
};

InfluenceRecord ipi(const GazetteerEntry& entry, const DocumentStats& stats, int num_topics,
                    const RankOptions& options = {});

// IPI descending, ties by person name.
std::vector<InfluenceRecord> rank_all(const Gazetteer& g, const DocumentStats& stats, const RankOptions& options = {});

struct CategoryStats {
  PersonCategory category;
  std::size_t people = 0;
  double avg_documents = 0.0;
  double avg_doc_length = 0.0;
  double avg_pnf = 0.0;
  bool empty = true;
};

// One row per category, in NotInfluential, Popular, Elite order.
std::vector<CategoryStats> category_stats(const Gazetteer& g, const DocumentStats& stats);

// Truncates to `decimals` places, tolerating representation error (0.07 stays 0.07).
double truncate_decimals(double value, int decimals);

// Report writers. `topic_words` maps topic id to its report line.
std::string ranking_csv(const std::vector<InfluenceRecord>& records, const Gazetteer& g,
                        const std::map<int, std::string>& topic_words = {});
std::string ranking_json(const std::vector<InfluenceRecord>& records, const Gazetteer& g,
                         const std::map<int, std::string>& topic_words = {});
std::string category_stats_csv(const std::vector<CategoryStats>& rows);

}  // namespace peoplegaz
