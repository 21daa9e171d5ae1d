#include "peoplegaz/corpus.h"

#include <algorithm>
#include <fstream>
#include <numeric>
#include <set>
#include <sstream>

#include "peoplegaz/diag.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace fs = std::filesystem;

std::vector<std::string> tokenize(std::string_view raw_text) {
  std::vector<std::string> tokens;
  std::size_t i = 0;
  while (i < raw_text.size()) {
    while (i < raw_text.size() && is_ascii_space(raw_text[i])) ++i;
    const std::size_t start = i;
    while (i < raw_text.size() && !is_ascii_space(raw_text[i])) ++i;
    if (i > start) tokens.emplace_back(raw_text.substr(start, i - start));
  }
  return tokens;
}

Article make_article(std::string id, std::string raw_text) {
  Article a;
  a.id = std::move(id);
  a.tokens = tokenize(raw_text);
  a.raw_text = std::move(raw_text);
  return a;
}

Corpus::Corpus(std::vector<Article> articles) : articles_(std::move(articles)) {
  for (std::size_t i = 0; i < articles_.size(); ++i) {
    const Article& a = articles_[i];
    if (!index_.emplace(a.id, i).second) throw Error("duplicate article id: " + a.id);
    for (const auto& t : a.tokens) {
      if (t.empty()) throw Error("empty token in article " + a.id);
      ++vocabulary_[t];
    }
    max_doc_length_ = std::max(max_doc_length_, a.length());
    total_tokens_ += a.length();
  }
}

const Article* Corpus::find(std::string_view id) const {
  auto it = index_.find(id);
  return it == index_.end() ? nullptr : &articles_[it->second];
}

std::optional<std::size_t> Corpus::index_of(std::string_view id) const {
  auto it = index_.find(id);
  if (it == index_.end()) return std::nullopt;
  return it->second;
}

namespace {

bool read_file(const fs::path& path, std::string& out) {
  std::ifstream in(path, std::ios::binary);
  if (!in) return false;
  std::ostringstream ss;
  ss << in.rdbuf();
  if (in.bad()) return false;
  out = ss.str();
  return true;
}

}  // namespace

LoadReport load_corpus(const fs::path& dir, const std::optional<fs::path>& manifest) {
  LoadReport report;
  if (!fs::is_directory(dir)) throw Error("corpus directory not found: " + dir.string());

  std::map<std::string, fs::path> files;
  for (const auto& entry : fs::directory_iterator(dir)) {
    if (entry.path().extension() != ".txt") continue;
    if (!entry.is_regular_file()) continue;
    files.emplace(entry.path().stem().string(), entry.path());
  }

  std::vector<std::string> ids;
  if (manifest) {
    std::ifstream in(*manifest);
    if (!in) throw Error("cannot read manifest: " + manifest->string());
    std::string line;
    std::set<std::string> seen;
    while (std::getline(in, line)) {
      std::string id = trim(line);
      if (id.empty() || id[0] == '#') continue;
      if (!seen.insert(id).second) {
        report.warnings.push_back("manifest lists " + id + " more than once");
        continue;
      }
      if (!files.count(id)) {
        report.errors.push_back("manifest id without file: " + id);
        continue;
      }
      ids.push_back(std::move(id));
    }
  } else {
    for (const auto& [id, path] : files) ids.push_back(id);
  }

  if (ids.empty()) {
    report.warnings.push_back("no articles found in " + dir.string());
    for (const auto& w : report.warnings) warn(w);
    return report;
  }

  std::vector<Article> articles;
  articles.reserve(ids.size());
  for (const auto& id : ids) {
    std::string bytes;
    if (!read_file(files.at(id), bytes)) {
      report.errors.push_back("cannot read " + files.at(id).string());
      continue;
    }
    const std::string text = sanitize_utf8(bytes);
    if (text != bytes) report.warnings.push_back("invalid UTF-8 replaced in " + id);
    articles.push_back(make_article(id, text));
  }
  if (articles.empty()) throw Error("no article in " + dir.string() + " could be read");

  for (const auto& w : report.warnings) warn(w);
  for (const auto& e : report.errors) warn(e);
  report.corpus = Corpus(std::move(articles));
  return report;
}

void write_token_file(const Corpus& corpus, const fs::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  for (const auto& a : corpus.articles()) {
    out << a.id << '\t' << join(a.tokens, " ") << '\n';
  }
  if (!out) throw Error("write failed: " + path.string());
}

Corpus read_token_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::vector<Article> articles;
  std::string line;
  std::size_t line_no = 0;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(path.string(), line_no, "expected id<TAB>tokens");
    Article a;
    a.id = line.substr(0, tab);
    a.tokens = tokenize(std::string_view(line).substr(tab + 1));
    articles.push_back(std::move(a));
  }
  return Corpus(std::move(articles));
}

}  // namespace peoplegaz
