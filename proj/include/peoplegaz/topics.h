#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <utility>
#include <vector>

#include "peoplegaz/corpus.h"

namespace peoplegaz {

// The minimal English function-word list applied before topic training.
const std::set<std::string>& default_stopwords();
std::set<std::string> load_stopwords(const std::filesystem::path& path);

// Documents as word-id sequences over a fixed vocabulary.
struct BagOfWords {
  std::vector<std::string> vocab;
  std::unordered_map<std::string, int> word_index;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<int>> docs;
  std::size_t dropped_tokens = 0;  // stopwords or out-of-vocabulary tokens

  std::size_t total_tokens() const;
};

// Lower-cases tokens and drops stopwords; the vocabulary is sorted.
BagOfWords build_bag_of_words(const Corpus& corpus, const std::set<std::string>& stopwords);

// Maps a corpus onto an existing vocabulary, dropping unknown tokens.
BagOfWords project_onto_vocabulary(const Corpus& corpus, const std::vector<std::string>& vocab);

struct LdaParams {
  int topics = 30;
  double alpha = 0.0;  // <= 0 selects 50 / topics
  double beta = 0.01;
  int iterations = 200;
  std::uint64_t seed = 1;

  double effective_alpha() const { return alpha > 0.0 ? alpha : 50.0 / topics; }
};

// Collapsed-Gibbs LDA state. Row-major count matrices:
//   word_topic[w * K + k], doc_topic[d * K + k].
struct TopicModel {
  int num_topics = 0;
  double alpha = 0.0;
  double beta = 0.0;
  int iterations = 0;
  std::uint64_t seed = 0;
  std::vector<std::string> vocab;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<int>> assignments;  // z, per document per token
  std::vector<std::int32_t> word_topic;
  std::vector<std::int32_t> doc_topic;
  std::vector<std::int64_t> topic_totals;

  int vocab_size() const { return static_cast<int>(vocab.size()); }
  int num_docs() const { return static_cast<int>(doc_ids.size()); }

  std::int32_t nwk(int w, int k) const { return word_topic[static_cast<std::size_t>(w) * num_topics + k]; }
  std::int32_t ndk(int d, int k) const { return doc_topic[static_cast<std::size_t>(d) * num_topics + k]; }

  // Smoothed topic-word probability (K x W convention).
  double phi(int k, int w) const;
  // Smoothed document-topic proportion (D x K convention).
  double theta(int d, int k) const;

  // Top `n` word ids of topic `k` by phi, ties to the lower id.
  std::vector<int> top_words(int k, std::size_t n) const;

  // Throws Error if any count invariant is broken.
  void check_consistency() const;

  bool operator==(const TopicModel&) const = default;
};

// Zero-count model over `vocab`; its phi is uniform.
TopicModel make_untrained_model(std::vector<std::string> vocab, int num_topics, double alpha, double beta);

using SweepObserver = std::function<void(int sweep, const TopicModel& state)>;

// Sequential collapsed Gibbs sampler.
TopicModel train_lda(const BagOfWords& bow, const LdaParams& params, const SweepObserver& observer = {});
TopicModel train_lda(const Corpus& corpus, const LdaParams& params,
                     const std::set<std::string>& stopwords = default_stopwords());

// Approximate distributed LDA: documents split into `workers` contiguous
// near-equal blocks, one local copy of the word-topic counts per worker, and a
// global merge after every sweep. `jobs` caps the number of OS threads used to
// run the workers; it never changes the result.
TopicModel train_adlda(const BagOfWords& bow, const LdaParams& params, int workers, unsigned jobs = 1,
                       const SweepObserver& observer = {});
TopicModel train_adlda(const Corpus& corpus, const LdaParams& params, int workers, unsigned jobs = 1,
                       const std::set<std::string>& stopwords = default_stopwords());

// Document-topic counts for unseen documents, estimated by Gibbs sampling with
// the model's topic-word distributions held fixed.
struct FoldIn {
  int num_topics = 0;
  double alpha = 0.0;
  std::vector<std::string> doc_ids;
  std::vector<std::vector<int>> doc_topic;  // per doc, K counts
  std::vector<std::size_t> doc_lengths;

  double theta(std::size_t d, int k) const;
};

FoldIn fold_in(const TopicModel& model, const BagOfWords& docs, int iterations, std::uint64_t seed);

struct PerplexityOptions {
  int fold_in_iterations = 50;
  std::uint64_t seed = 7;
};

struct PerplexityResult {
  double perplexity = 0.0;
  double log_likelihood = 0.0;
  std::size_t tokens = 0;
  std::size_t oov_dropped = 0;
};

// exp(-sum log p(w|d) / N) with p(w|d) = sum_k theta_dk phi_kw.
PerplexityResult perplexity(const TopicModel& model, const Corpus& heldout, const PerplexityOptions& options = {});
PerplexityResult perplexity(const TopicModel& model, const BagOfWords& heldout, const PerplexityOptions& options = {});

// Seeded document-level split; returns (train, heldout).
std::pair<Corpus, Corpus> split_heldout(const Corpus& corpus, double heldout_fraction, std::uint64_t seed);

// article id -> dominant topic.
using TopicAssignment = std::map<std::string, int>;
// article id -> topics ordered by decreasing proportion.
using RankedTopics = std::map<std::string, std::vector<int>>;

// argmax_k (ndk + alpha); ties go to the lowest topic id.
TopicAssignment assign_topics(const TopicModel& model);
TopicAssignment assign_topics(const FoldIn& folded);
RankedTopics assign_top_topics(const TopicModel& model, std::size_t n);

// Versioned text dump of the full state.
void save_model(const TopicModel& model, const std::filesystem::path& path);
TopicModel load_model(const std::filesystem::path& path);

// `topic_id<TAB>w1 w2 ... wn` per topic.
void write_topic_report(const TopicModel& model, const std::filesystem::path& path, std::size_t words = 10);
std::map<int, std::string> read_topic_report(const std::filesystem::path& path);

void write_doc_topics(const TopicModel& model, const std::filesystem::path& path);
RankedTopics read_doc_topics(const std::filesystem::path& path);

namespace detail {
// Independent reproducible stream per (seed, stream index).
std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream);
double uniform01(std::mt19937_64& rng);
}  // namespace detail

}  // namespace peoplegaz
