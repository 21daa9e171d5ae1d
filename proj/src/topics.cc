#include "peoplegaz/topics.h"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <fstream>
#include <numeric>
#include <sstream>

#include "parallel.h"
#include "peoplegaz/diag.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace fs = std::filesystem;

const std::set<std::string>& default_stopwords() {
  static const std::set<std::string> s = {
      "the", "of",  "and",  "to",   "a",    "in",   "is",   "that", "for",  "it",
      "as",  "was", "with", "be",   "by",   "on",   "not",  "he",   "i",    "this",
      "are", "or",  "his",  "from", "at",   "which", "but", "have", "an",   "had",
      "they", "you", "were", "their", "one", "all", "we",   "can",  "her",  "has",
      "there", "been", "if", "more", "when", "will", "would", "who", "so",  "no"};
  return s;
}

std::set<std::string> load_stopwords(const fs::path& path) {
  std::ifstream in(path);
  if (!in) throw Error("cannot read stopwords " + path.string());
  std::set<std::string> out;
  std::string line;
  while (std::getline(in, line)) {
    std::string w = to_lower(trim(line));
    if (!w.empty() && w[0] != '#') out.insert(std::move(w));
  }
  return out;
}

std::size_t BagOfWords::total_tokens() const {
  std::size_t n = 0;
  for (const auto& d : docs) n += d.size();
  return n;
}

BagOfWords build_bag_of_words(const Corpus& corpus, const std::set<std::string>& stopwords) {
  std::set<std::string> words;
  for (const auto& a : corpus.articles()) {
    for (const auto& t : a.tokens) {
      std::string w = to_lower(t);
      if (!stopwords.count(w)) words.insert(std::move(w));
    }
  }
  BagOfWords bow;
  bow.vocab.assign(words.begin(), words.end());
  for (std::size_t i = 0; i < bow.vocab.size(); ++i) bow.word_index.emplace(bow.vocab[i], static_cast<int>(i));
  for (const auto& a : corpus.articles()) {
    bow.doc_ids.push_back(a.id);
    auto& doc = bow.docs.emplace_back();
    doc.reserve(a.tokens.size());
    for (const auto& t : a.tokens) {
      auto it = bow.word_index.find(to_lower(t));
      if (it == bow.word_index.end()) {
        ++bow.dropped_tokens;
      } else {
        doc.push_back(it->second);
      }
    }
  }
  return bow;
}

BagOfWords project_onto_vocabulary(const Corpus& corpus, const std::vector<std::string>& vocab) {
  BagOfWords bow;
  bow.vocab = vocab;
  for (std::size_t i = 0; i < vocab.size(); ++i) bow.word_index.emplace(vocab[i], static_cast<int>(i));
  for (const auto& a : corpus.articles()) {
    bow.doc_ids.push_back(a.id);
    auto& doc = bow.docs.emplace_back();
    for (const auto& t : a.tokens) {
      auto it = bow.word_index.find(to_lower(t));
      if (it == bow.word_index.end()) {
        ++bow.dropped_tokens;
      } else {
        doc.push_back(it->second);
      }
    }
  }
  return bow;
}

namespace detail {

std::mt19937_64 make_stream(std::uint64_t seed, std::uint64_t stream) {
  std::seed_seq seq{static_cast<std::uint32_t>(seed), static_cast<std::uint32_t>(seed >> 32),
                    static_cast<std::uint32_t>(stream), static_cast<std::uint32_t>(stream >> 32)};
  return std::mt19937_64(seq);
}

double uniform01(std::mt19937_64& rng) { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

}  // namespace detail

double TopicModel::phi(int k, int w) const {
  return (nwk(w, k) + beta) / (static_cast<double>(topic_totals[k]) + vocab_size() * beta);
}

double TopicModel::theta(int d, int k) const {
  std::int64_t len = 0;
  for (int j = 0; j < num_topics; ++j) len += ndk(d, j);
  return (ndk(d, k) + alpha) / (static_cast<double>(len) + num_topics * alpha);
}

std::vector<int> TopicModel::top_words(int k, std::size_t n) const {
  std::vector<int> ids(vocab.size());
  std::iota(ids.begin(), ids.end(), 0);
  n = std::min(n, ids.size());
  std::partial_sort(ids.begin(), ids.begin() + static_cast<std::ptrdiff_t>(n), ids.end(), [&](int a, int b) {
    if (nwk(a, k) != nwk(b, k)) return nwk(a, k) > nwk(b, k);
    return a < b;
  });
  ids.resize(n);
  return ids;
}

void TopicModel::check_consistency() const {
  const std::size_t K = static_cast<std::size_t>(num_topics);
  if (num_topics < 1) throw Error("model has no topics");
  if (word_topic.size() != vocab.size() * K) throw Error("word-topic matrix has wrong shape");
  if (doc_topic.size() != doc_ids.size() * K) throw Error("doc-topic matrix has wrong shape");
  if (topic_totals.size() != K) throw Error("topic totals have wrong shape");
  std::vector<std::int64_t> totals(K, 0);
  for (std::size_t w = 0; w < vocab.size(); ++w) {
    for (std::size_t k = 0; k < K; ++k) {
      const auto c = word_topic[w * K + k];
      if (c < 0) throw Error("negative word-topic count");
      totals[k] += c;
    }
  }
  if (totals != topic_totals) throw Error("topic totals disagree with word-topic counts");
  for (auto c : doc_topic) {
    if (c < 0) throw Error("negative doc-topic count");
  }
  if (assignments.empty()) return;
  if (assignments.size() != doc_ids.size()) throw Error("assignment list has wrong length");
  std::vector<std::int64_t> per_topic(K, 0);
  for (std::size_t d = 0; d < assignments.size(); ++d) {
    std::vector<std::int64_t> row(K, 0);
    for (int z : assignments[d]) {
      if (z < 0 || z >= num_topics) throw Error("topic assignment out of range");
      ++row[static_cast<std::size_t>(z)];
      ++per_topic[static_cast<std::size_t>(z)];
    }
    for (std::size_t k = 0; k < K; ++k) {
      if (row[k] != doc_topic[d * K + k]) throw Error("doc-topic counts disagree with assignments in " + doc_ids[d]);
    }
  }
  if (per_topic != topic_totals) throw Error("topic totals disagree with assignments");
}

TopicModel make_untrained_model(std::vector<std::string> vocab, int num_topics, double alpha, double beta) {
  if (num_topics < 1) throw Error("need at least one topic");
  TopicModel m;
  m.num_topics = num_topics;
  m.alpha = alpha;
  m.beta = beta;
  m.vocab = std::move(vocab);
  m.word_topic.assign(m.vocab.size() * static_cast<std::size_t>(num_topics), 0);
  m.topic_totals.assign(static_cast<std::size_t>(num_topics), 0);
  return m;
}

namespace {

struct SamplerShape {
  int K;
  double alpha;
  double beta;
  double vocab_beta;
};

// One Gibbs pass over a document against the given word-topic counts.
void sample_document(const std::vector<int>& words, std::vector<int>& z, std::int32_t* doc_row,
                     std::int32_t* word_topic, std::int64_t* topic_totals, const SamplerShape& s,
                     std::mt19937_64& rng, std::vector<double>& cumulative) {
  const int K = s.K;
  for (std::size_t i = 0; i < words.size(); ++i) {
    std::int32_t* wrow = word_topic + static_cast<std::size_t>(words[i]) * K;
    int k = z[i];
    --wrow[k];
    --topic_totals[k];
    --doc_row[k];
    double total = 0.0;
    for (int j = 0; j < K; ++j) {
      total += (wrow[j] + s.beta) / (static_cast<double>(topic_totals[j]) + s.vocab_beta) * (doc_row[j] + s.alpha);
      cumulative[static_cast<std::size_t>(j)] = total;
    }
    const double u = detail::uniform01(rng) * total;
    k = 0;
    while (k < K - 1 && cumulative[static_cast<std::size_t>(k)] <= u) ++k;
    z[i] = k;
    ++wrow[k];
    ++topic_totals[k];
    ++doc_row[k];
  }
}

TopicModel initial_model(const BagOfWords& bow, const LdaParams& params) {
  if (params.topics < 1) throw Error("number of topics must be >= 1");
  if (bow.docs.empty()) throw Error("cannot train a topic model on an empty corpus");
  if (bow.vocab.empty() || bow.total_tokens() == 0) throw Error("cannot train a topic model on an empty vocabulary");
  if (params.iterations < 0) throw Error("iterations must be >= 0");
  if (params.beta <= 0.0) throw Error("beta must be positive");
  if (static_cast<std::size_t>(params.topics) > bow.docs.size())
    warn("more topics (" + std::to_string(params.topics) + ") than documents (" + std::to_string(bow.docs.size()) +
         ")");
  TopicModel m = make_untrained_model(bow.vocab, params.topics, params.effective_alpha(), params.beta);
  m.doc_ids = bow.doc_ids;
  m.iterations = params.iterations;
  m.seed = params.seed;
  m.doc_topic.assign(bow.docs.size() * static_cast<std::size_t>(params.topics), 0);
  m.assignments.resize(bow.docs.size());
  return m;
}

void init_block(const BagOfWords& bow, TopicModel& m, std::size_t begin, std::size_t end, std::mt19937_64& rng) {
  const auto K = static_cast<std::uint64_t>(m.num_topics);
  for (std::size_t d = begin; d < end; ++d) {
    auto& z = m.assignments[d];
    z.resize(bow.docs[d].size());
    for (auto& t : z) t = static_cast<int>(rng() % K);
  }
}

void count_all(const BagOfWords& bow, TopicModel& m) {
  const std::size_t K = static_cast<std::size_t>(m.num_topics);
  for (std::size_t d = 0; d < bow.docs.size(); ++d) {
    for (std::size_t i = 0; i < bow.docs[d].size(); ++i) {
      const auto k = static_cast<std::size_t>(m.assignments[d][i]);
      ++m.word_topic[static_cast<std::size_t>(bow.docs[d][i]) * K + k];
      ++m.doc_topic[d * K + k];
      ++m.topic_totals[k];
    }
  }
}

}  // namespace

TopicModel train_lda(const BagOfWords& bow, const LdaParams& params, const SweepObserver& observer) {
  TopicModel m = initial_model(bow, params);
  auto rng = detail::make_stream(params.seed, 0);
  init_block(bow, m, 0, bow.docs.size(), rng);
  count_all(bow, m);

  const std::size_t K = static_cast<std::size_t>(m.num_topics);
  const SamplerShape shape{m.num_topics, m.alpha, m.beta, m.vocab_size() * m.beta};
  std::vector<double> cumulative(K);
  for (int sweep = 0; sweep < params.iterations; ++sweep) {
    for (std::size_t d = 0; d < bow.docs.size(); ++d) {
      sample_document(bow.docs[d], m.assignments[d], &m.doc_topic[d * K], m.word_topic.data(), m.topic_totals.data(),
                      shape, rng, cumulative);
    }
    if (observer) observer(sweep, m);
  }
  return m;
}

TopicModel train_lda(const Corpus& corpus, const LdaParams& params, const std::set<std::string>& stopwords) {
  return train_lda(build_bag_of_words(corpus, stopwords), params);
}

TopicModel train_adlda(const BagOfWords& bow, const LdaParams& params, int workers, unsigned jobs,
                       const SweepObserver& observer) {
  if (workers < 1) throw Error("worker count must be >= 1");
  if (static_cast<std::size_t>(workers) > bow.docs.size())
    throw Error("worker count (" + std::to_string(workers) + ") exceeds document count (" +
                std::to_string(bow.docs.size()) + ")");
  TopicModel m = initial_model(bow, params);
  const std::size_t P = static_cast<std::size_t>(workers);
  const std::size_t D = bow.docs.size();
  std::vector<std::size_t> bounds(P + 1);
  for (std::size_t p = 0; p <= P; ++p) bounds[p] = p * D / P;

  std::vector<std::mt19937_64> rngs;
  rngs.reserve(P);
  for (std::size_t p = 0; p < P; ++p) {
    rngs.push_back(detail::make_stream(params.seed, p));
    init_block(bow, m, bounds[p], bounds[p + 1], rngs[p]);
  }
  count_all(bow, m);

  const std::size_t K = static_cast<std::size_t>(m.num_topics);
  const SamplerShape shape{m.num_topics, m.alpha, m.beta, m.vocab_size() * m.beta};
  std::vector<std::vector<std::int32_t>> local_wt(P);
  std::vector<std::vector<std::int64_t>> local_tt(P);
  std::vector<std::vector<double>> scratch(P, std::vector<double>(K));

  for (int sweep = 0; sweep < params.iterations; ++sweep) {
    detail::parallel_for(P, jobs, [&](std::size_t p) {
      local_wt[p] = m.word_topic;
      local_tt[p] = m.topic_totals;
      for (std::size_t d = bounds[p]; d < bounds[p + 1]; ++d) {
        sample_document(bow.docs[d], m.assignments[d], &m.doc_topic[d * K], local_wt[p].data(), local_tt[p].data(),
                        shape, rngs[p], scratch[p]);
      }
    });
    // Global merge: old + sum_p (local_p - old).
    for (std::size_t i = 0; i < m.word_topic.size(); ++i) {
      std::int64_t v = m.word_topic[i];
      const std::int64_t old = v;
      for (std::size_t p = 0; p < P; ++p) v += local_wt[p][i] - old;
      m.word_topic[i] = static_cast<std::int32_t>(v);
    }
    for (std::size_t k = 0; k < K; ++k) {
      std::int64_t v = m.topic_totals[k];
      const std::int64_t old = v;
      for (std::size_t p = 0; p < P; ++p) v += local_tt[p][k] - old;
      m.topic_totals[k] = v;
    }
    if (observer) observer(sweep, m);
  }
  return m;
}

TopicModel train_adlda(const Corpus& corpus, const LdaParams& params, int workers, unsigned jobs,
                       const std::set<std::string>& stopwords) {
  return train_adlda(build_bag_of_words(corpus, stopwords), params, workers, jobs);
}

double FoldIn::theta(std::size_t d, int k) const {
  return (doc_topic[d][static_cast<std::size_t>(k)] + alpha) /
         (static_cast<double>(doc_lengths[d]) + num_topics * alpha);
}

FoldIn fold_in(const TopicModel& model, const BagOfWords& docs, int iterations, std::uint64_t seed) {
  const int K = model.num_topics;
  const std::size_t W = model.vocab.size();
  std::vector<double> phi(W * static_cast<std::size_t>(K));
  for (std::size_t w = 0; w < W; ++w) {
    for (int k = 0; k < K; ++k) phi[w * K + k] = model.phi(k, static_cast<int>(w));
  }
  FoldIn out;
  out.num_topics = K;
  out.alpha = model.alpha;
  out.doc_ids = docs.doc_ids;
  out.doc_topic.assign(docs.docs.size(), std::vector<int>(static_cast<std::size_t>(K), 0));
  out.doc_lengths.resize(docs.docs.size());
  auto rng = detail::make_stream(seed, 0);
  std::vector<double> cumulative(static_cast<std::size_t>(K));
  for (std::size_t d = 0; d < docs.docs.size(); ++d) {
    const auto& words = docs.docs[d];
    auto& row = out.doc_topic[d];
    out.doc_lengths[d] = words.size();
    std::vector<int> z(words.size());
    for (auto& t : z) {
      t = static_cast<int>(rng() % static_cast<std::uint64_t>(K));
      ++row[static_cast<std::size_t>(t)];
    }
    for (int it = 0; it < iterations; ++it) {
      for (std::size_t i = 0; i < words.size(); ++i) {
        --row[static_cast<std::size_t>(z[i])];
        const double* prow = &phi[static_cast<std::size_t>(words[i]) * K];
        double total = 0.0;
        for (int k = 0; k < K; ++k) {
          total += prow[k] * (row[static_cast<std::size_t>(k)] + model.alpha);
          cumulative[static_cast<std::size_t>(k)] = total;
        }
        const double u = detail::uniform01(rng) * total;
        int k = 0;
        while (k < K - 1 && cumulative[static_cast<std::size_t>(k)] <= u) ++k;
        z[i] = k;
        ++row[static_cast<std::size_t>(k)];
      }
    }
  }
  return out;
}

PerplexityResult perplexity(const TopicModel& model, const BagOfWords& heldout, const PerplexityOptions& options) {
  PerplexityResult r;
  r.oov_dropped = heldout.dropped_tokens;
  r.tokens = heldout.total_tokens();
  if (r.tokens == 0) throw Error("held-out set is empty after dropping out-of-vocabulary tokens");
  const FoldIn folded = fold_in(model, heldout, options.fold_in_iterations, options.seed);
  const int K = model.num_topics;
  for (std::size_t d = 0; d < heldout.docs.size(); ++d) {
    std::vector<double> theta(static_cast<std::size_t>(K));
    for (int k = 0; k < K; ++k) theta[static_cast<std::size_t>(k)] = folded.theta(d, k);
    for (int w : heldout.docs[d]) {
      double p = 0.0;
      for (int k = 0; k < K; ++k) p += theta[static_cast<std::size_t>(k)] * model.phi(k, w);
      r.log_likelihood += std::log(p);
    }
  }
  r.perplexity = std::exp(-r.log_likelihood / static_cast<double>(r.tokens));
  return r;
}

PerplexityResult perplexity(const TopicModel& model, const Corpus& heldout, const PerplexityOptions& options) {
  return perplexity(model, project_onto_vocabulary(heldout, model.vocab), options);
}

std::pair<Corpus, Corpus> split_heldout(const Corpus& corpus, double heldout_fraction, std::uint64_t seed) {
  if (heldout_fraction < 0.0 || heldout_fraction >= 1.0) throw Error("held-out fraction must be in [0, 1)");
  const std::size_t D = corpus.size();
  std::size_t n_heldout = static_cast<std::size_t>(std::llround(heldout_fraction * static_cast<double>(D)));
  if (heldout_fraction > 0.0 && D >= 2) n_heldout = std::clamp<std::size_t>(n_heldout, 1, D - 1);
  std::vector<std::size_t> order(D);
  std::iota(order.begin(), order.end(), 0);
  auto rng = detail::make_stream(seed, 0x68656c64);  // "held"
  for (std::size_t i = D; i > 1; --i) std::swap(order[i - 1], order[rng() % i]);
  std::vector<bool> held(D, false);
  for (std::size_t i = 0; i < n_heldout; ++i) held[order[i]] = true;
  std::vector<Article> train, test;
  for (std::size_t i = 0; i < D; ++i) (held[i] ? test : train).push_back(corpus[i]);
  return {Corpus(std::move(train)), Corpus(std::move(test))};
}

namespace {

template <typename Row>
int argmax_topic(const Row& counts, int K, double alpha) {
  int best = 0;
  double best_v = counts[0] + alpha;
  for (int k = 1; k < K; ++k) {
    const double v = counts[static_cast<std::size_t>(k)] + alpha;
    if (v > best_v) {
      best = k;
      best_v = v;
    }
  }
  return best;
}

}  // namespace

TopicAssignment assign_topics(const TopicModel& model) {
  TopicAssignment out;
  const std::size_t K = static_cast<std::size_t>(model.num_topics);
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    out[model.doc_ids[d]] = argmax_topic(&model.doc_topic[d * K], model.num_topics, model.alpha);
  }
  return out;
}

TopicAssignment assign_topics(const FoldIn& folded) {
  TopicAssignment out;
  for (std::size_t d = 0; d < folded.doc_ids.size(); ++d) {
    out[folded.doc_ids[d]] = argmax_topic(folded.doc_topic[d], folded.num_topics, folded.alpha);
  }
  return out;
}

RankedTopics assign_top_topics(const TopicModel& model, std::size_t n) {
  if (n < 1 || n > static_cast<std::size_t>(model.num_topics))
    throw Error("top-N must be between 1 and the number of topics");
  RankedTopics out;
  const std::size_t K = static_cast<std::size_t>(model.num_topics);
  for (std::size_t d = 0; d < model.doc_ids.size(); ++d) {
    std::vector<int> ks(K);
    std::iota(ks.begin(), ks.end(), 0);
    const std::int32_t* row = &model.doc_topic[d * K];
    std::stable_sort(ks.begin(), ks.end(), [&](int a, int b) { return row[a] > row[b]; });
    ks.resize(n);
    out[model.doc_ids[d]] = std::move(ks);
  }
  return out;
}

namespace {

constexpr std::string_view kModelMagic = "peoplegaz-topic-model 1";

std::string format_double(double v) {
  char buf[64];
  auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

double parse_double(const std::string& s, const std::string& file, std::size_t line) {
  double v = 0.0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError(file, line, "bad number '" + s + "'");
  return v;
}

template <typename Int>
Int parse_int(const std::string& s, const std::string& file, std::size_t line) {
  Int v = 0;
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  if (res.ec != std::errc() || res.ptr != s.data() + s.size()) throw ParseError(file, line, "bad integer '" + s + "'");
  return v;
}

template <typename Int>
std::vector<Int> parse_ints(const std::string& s, const std::string& file, std::size_t line) {
  std::vector<Int> out;
  for (const auto& t : tokenize(s)) out.push_back(parse_int<Int>(t, file, line));
  return out;
}

}  // namespace

void save_model(const TopicModel& m, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const std::size_t K = static_cast<std::size_t>(m.num_topics);
  out << kModelMagic << '\n';
  out << "topics " << m.num_topics << '\n';
  out << "vocab_size " << m.vocab.size() << '\n';
  out << "docs " << m.doc_ids.size() << '\n';
  out << "alpha " << format_double(m.alpha) << '\n';
  out << "beta " << format_double(m.beta) << '\n';
  out << "iterations " << m.iterations << '\n';
  out << "seed " << m.seed << '\n';
  out << "vocab\n";
  for (const auto& w : m.vocab) out << w << '\n';
  out << "word_topic\n";
  for (std::size_t w = 0; w < m.vocab.size(); ++w) {
    for (std::size_t k = 0; k < K; ++k) out << (k ? " " : "") << m.word_topic[w * K + k];
    out << '\n';
  }
  out << "doc_topic\n";
  for (std::size_t d = 0; d < m.doc_ids.size(); ++d) {
    out << m.doc_ids[d] << '\t';
    for (std::size_t k = 0; k < K; ++k) out << (k ? " " : "") << m.doc_topic[d * K + k];
    out << '\t';
    if (d < m.assignments.size()) {
      for (std::size_t i = 0; i < m.assignments[d].size(); ++i) out << (i ? " " : "") << m.assignments[d][i];
    }
    out << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

TopicModel load_model(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  const std::string file = path.string();
  std::string line;
  std::size_t line_no = 0;
  auto next = [&]() {
    if (!std::getline(in, line)) throw ParseError(file, line_no, "unexpected end of file");
    ++line_no;
    return line;
  };
  auto field = [&](std::string_view key) {
    const std::string l = next();
    if (l.rfind(std::string(key) + " ", 0) != 0) throw ParseError(file, line_no, "expected '" + std::string(key) + "'");
    return l.substr(key.size() + 1);
  };
  if (next() != kModelMagic) throw ParseError(file, line_no, "not a topic model file (or unsupported version)");
  TopicModel m;
  m.num_topics = parse_int<int>(field("topics"), file, line_no);
  const auto W = parse_int<std::size_t>(field("vocab_size"), file, line_no);
  const auto D = parse_int<std::size_t>(field("docs"), file, line_no);
  m.alpha = parse_double(field("alpha"), file, line_no);
  m.beta = parse_double(field("beta"), file, line_no);
  m.iterations = parse_int<int>(field("iterations"), file, line_no);
  m.seed = parse_int<std::uint64_t>(field("seed"), file, line_no);
  if (m.num_topics < 1) throw ParseError(file, line_no, "topics must be >= 1");
  const std::size_t K = static_cast<std::size_t>(m.num_topics);
  if (next() != "vocab") throw ParseError(file, line_no, "expected 'vocab'");
  for (std::size_t w = 0; w < W; ++w) m.vocab.push_back(next());
  if (next() != "word_topic") throw ParseError(file, line_no, "expected 'word_topic'");
  m.topic_totals.assign(K, 0);
  for (std::size_t w = 0; w < W; ++w) {
    auto row = parse_ints<std::int32_t>(next(), file, line_no);
    if (row.size() != K) throw ParseError(file, line_no, "expected " + std::to_string(K) + " counts");
    for (std::size_t k = 0; k < K; ++k) m.topic_totals[k] += row[k];
    m.word_topic.insert(m.word_topic.end(), row.begin(), row.end());
  }
  if (next() != "doc_topic") throw ParseError(file, line_no, "expected 'doc_topic'");
  bool have_z = true;
  std::vector<std::vector<int>> z;
  for (std::size_t d = 0; d < D; ++d) {
    const auto f = split(next(), '\t');
    if (f.size() != 3) throw ParseError(file, line_no, "expected id<TAB>counts<TAB>assignments");
    m.doc_ids.push_back(f[0]);
    auto row = parse_ints<std::int32_t>(f[1], file, line_no);
    if (row.size() != K) throw ParseError(file, line_no, "expected " + std::to_string(K) + " counts");
    m.doc_topic.insert(m.doc_topic.end(), row.begin(), row.end());
    z.push_back(parse_ints<int>(f[2], file, line_no));
    const std::int64_t len = std::accumulate(row.begin(), row.end(), std::int64_t{0});
    if (static_cast<std::int64_t>(z.back().size()) != len) have_z = false;
  }
  if (have_z) m.assignments = std::move(z);
  try {
    m.check_consistency();
  } catch (const Error& e) {
    throw ParseError(file, 0, e.what());
  }
  return m;
}

void write_topic_report(const TopicModel& model, const fs::path& path, std::size_t words) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (int k = 0; k < model.num_topics; ++k) {
    out << k << '\t';
    const auto top = model.top_words(k, words);
    for (std::size_t i = 0; i < top.size(); ++i) out << (i ? " " : "") << model.vocab[static_cast<std::size_t>(top[i])];
    out << '\n';
  }
}

std::map<int, std::string> read_topic_report(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::map<int, std::string> out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos) throw ParseError(path.string(), line_no, "expected topic<TAB>words");
    out[parse_int<int>(line.substr(0, tab), path.string(), line_no)] = line.substr(tab + 1);
  }
  return out;
}

void write_doc_topics(const TopicModel& model, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  const auto ranked = assign_top_topics(model, static_cast<std::size_t>(model.num_topics));
  for (const auto& id : model.doc_ids) {
    const auto& ks = ranked.at(id);
    out << id << '\t';
    for (std::size_t i = 0; i < ks.size(); ++i) out << (i ? " " : "") << ks[i];
    out << '\n';
  }
}

RankedTopics read_doc_topics(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  RankedTopics out;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto f = split(line, '\t');
    if (f.size() != 2) throw ParseError(path.string(), line_no, "expected id<TAB>topics");
    out[f[0]] = parse_ints<int>(f[1], path.string(), line_no);
  }
  return out;
}

}  // namespace peoplegaz
