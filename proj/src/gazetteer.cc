#include "peoplegaz/gazetteer.h"

#include <algorithm>
#include <charconv>
#include <fstream>
#include <sstream>

#include "peoplegaz/diag.h"
#include "peoplegaz/error.h"
#include "peoplegaz/text.h"

namespace peoplegaz {

namespace fs = std::filesystem;

Gazetteer build_gazetteer(const std::vector<PersonEntity>& entities, const TopicAssignment& assignment,
                          int num_topics, const CategoryThresholds& thresholds) {
  if (num_topics < 1) throw Error("gazetteer needs at least one topic");
  Gazetteer g;
  g.num_topics = num_topics;
  g.thresholds = thresholds;
  for (const auto& e : entities) {
    if (e.occurrences.empty()) {
      warn("entity '" + e.canonical_name + "' has no occurrences; skipped");
      continue;
    }
    GazetteerEntry entry;
    entry.person = e.canonical_name;
    for (const auto& [id, pnf] : e.occurrences) {
      auto it = assignment.find(id);
      if (it == assignment.end()) throw Error("no topic assignment for article " + id);
      if (it->second < 0 || it->second >= num_topics)
        throw Error("topic " + std::to_string(it->second) + " of article " + id + " is out of range");
      entry.docs.push_back({id, it->second, pnf});
    }
    entry.category = categorize(entry.docs.size(), thresholds);
    if (!g.entries.emplace(entry.person, std::move(entry)).second)
      throw Error("duplicate entity '" + e.canonical_name + "'");
  }
  return g;
}

namespace {

constexpr std::string_view kMagic = "# peoplegaz-gazetteer v1";

bool has_any(std::string_view s, std::string_view chars) { return s.find_first_of(chars) != std::string_view::npos; }

template <typename Int>
bool parse_number(std::string_view s, Int& v) {
  auto res = std::from_chars(s.data(), s.data() + s.size(), v);
  return res.ec == std::errc() && res.ptr == s.data() + s.size();
}

}  // namespace

std::string format_gazetteer(const Gazetteer& g) {
  std::ostringstream out;
  out << kMagic << " topics=" << g.num_topics << " lo=" << g.thresholds.lo << " hi=" << g.thresholds.hi << '\n';
  for (const auto& [name, entry] : g.entries) {
    if (name.empty() || has_any(name, "\t\n\r")) throw Error("person name cannot be written: '" + name + "'");
    out << name << '\t';
    for (std::size_t i = 0; i < entry.docs.size(); ++i) {
      const auto& d = entry.docs[i];
      if (d.article_id.empty() || has_any(d.article_id, ":;\t\n\r"))
        throw Error("article id cannot be written: '" + d.article_id + "'");
      out << (i ? ";" : "") << d.article_id << ':' << d.topic << ':' << d.pnf;
    }
    out << '\n';
  }
  return out.str();
}

Gazetteer parse_gazetteer(const std::string& text, const std::string& source) {
  std::istringstream in(text);
  std::string line;
  std::size_t line_no = 0;
  if (!std::getline(in, line) || line.rfind(kMagic, 0) != 0)
    throw ParseError(source, 1, "missing gazetteer header");
  ++line_no;
  Gazetteer g;
  bool have_topics = false;
  for (const auto& field : tokenize(line.substr(kMagic.size()))) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw ParseError(source, line_no, "bad header field '" + field + "'");
    const std::string key = field.substr(0, eq);
    const std::string_view val = std::string_view(field).substr(eq + 1);
    bool ok = false;
    if (key == "topics") {
      ok = parse_number(val, g.num_topics);
      have_topics = ok;
    } else if (key == "lo") {
      ok = parse_number(val, g.thresholds.lo);
    } else if (key == "hi") {
      ok = parse_number(val, g.thresholds.hi);
    }
    if (!ok) throw ParseError(source, line_no, "bad header field '" + field + "'");
  }
  if (!have_topics || g.num_topics < 1) throw ParseError(source, line_no, "header must give topics >= 1");

  while (std::getline(in, line)) {
    ++line_no;
    if (!line.empty() && line.back() == '\r') line.pop_back();
    if (line.empty() || line[0] == '#') continue;
    const auto tab = line.find('\t');
    if (tab == std::string::npos || tab == 0) throw ParseError(source, line_no, "expected person<TAB>documents");
    GazetteerEntry entry;
    entry.person = line.substr(0, tab);
    std::set<std::string> seen;
    for (const auto& item : split(line.substr(tab + 1), ';')) {
      const auto parts = split(item, ':');
      if (parts.size() < 2 || parts.size() > 3 || parts[0].empty())
        throw ParseError(source, line_no, "bad document item '" + item + "'");
      GazetteerDoc d;
      d.article_id = parts[0];
      if (!parse_number(std::string_view(parts[1]), d.topic))
        throw ParseError(source, line_no, "bad topic id in '" + item + "'");
      if (d.topic < 0 || d.topic >= g.num_topics)
        throw ParseError(source, line_no, "topic id " + parts[1] + " outside [0, " + std::to_string(g.num_topics) + ")");
      if (parts.size() == 3 && (!parse_number(std::string_view(parts[2]), d.pnf) || d.pnf < 1))
        throw ParseError(source, line_no, "bad name frequency in '" + item + "'");
      if (!seen.insert(d.article_id).second)
        throw ParseError(source, line_no, "article " + d.article_id + " listed twice");
      entry.docs.push_back(std::move(d));
    }
    std::sort(entry.docs.begin(), entry.docs.end(),
              [](const GazetteerDoc& a, const GazetteerDoc& b) { return a.article_id < b.article_id; });
    entry.category = categorize(entry.docs.size(), g.thresholds);
    const std::string name = entry.person;
    if (!g.entries.emplace(name, std::move(entry)).second)
      throw ParseError(source, line_no, "duplicate person '" + name + "'");
  }
  return g;
}

void export_gazetteer(const Gazetteer& g, const fs::path& path) {
  const std::string text = format_gazetteer(g);
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

Gazetteer import_gazetteer(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  return parse_gazetteer(buf.str(), path.string());
}

}  // namespace peoplegaz
