#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

namespace peoplegaz {

// Splits on runs of ASCII whitespace. Case and punctuation are preserved.
std::vector<std::string> tokenize(std::string_view raw_text);

// One segmented news story.
struct Article {
  std::string id;        // file stem, e.g. "61720"
  std::string raw_text;  // decoded text, may be empty for derived corpora
  std::vector<std::string> tokens;

  std::size_t length() const { return tokens.size(); }
};

Article make_article(std::string id, std::string raw_text);

// Immutable collection of articles with unique ids. Article order is the
// order given at construction.
class Corpus {
 public:
  Corpus() = default;
  explicit Corpus(std::vector<Article> articles);

  const std::vector<Article>& articles() const { return articles_; }
  std::size_t size() const { return articles_.size(); }
  bool empty() const { return articles_.empty(); }
  const Article& operator[](std::size_t i) const { return articles_[i]; }

  std::size_t max_doc_length() const { return max_doc_length_; }
  std::size_t total_tokens() const { return total_tokens_; }

  // Token -> corpus frequency (case preserved).
  const std::map<std::string, std::size_t>& vocabulary() const { return vocabulary_; }

  const Article* find(std::string_view id) const;
  std::optional<std::size_t> index_of(std::string_view id) const;

 private:
  std::vector<Article> articles_;
  std::map<std::string, std::size_t, std::less<>> index_;
  std::map<std::string, std::size_t> vocabulary_;
  std::size_t max_doc_length_ = 0;
  std::size_t total_tokens_ = 0;
};

struct LoadReport {
  Corpus corpus;
  std::vector<std::string> errors;    // one per file that could not be read
  std::vector<std::string> warnings;
};

// Reads every `<id>.txt` file in `dir`. Articles are ordered by id unless a
// manifest (one id per line) is given, in which case the manifest selects and
// orders the articles. Throws when files exist but none could be read.
LoadReport load_corpus(const std::filesystem::path& dir,
                       const std::optional<std::filesystem::path>& manifest = std::nullopt);

// Token-stream persistence used between pipeline stages:
// `id<TAB>tok tok tok...` per line.
void write_token_file(const Corpus& corpus, const std::filesystem::path& path);
Corpus read_token_file(const std::filesystem::path& path);

}  // namespace peoplegaz
