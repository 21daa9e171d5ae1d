#pragma once

#include <cstddef>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "peoplegaz/pner.h"
#include "peoplegaz/topics.h"

namespace peoplegaz {

struct GazetteerDoc {
  std::string article_id;
  int topic = 0;
  int pnf = 1;

  bool operator==(const GazetteerDoc&) const = default;
};

struct GazetteerEntry {
  std::string person;
  std::vector<GazetteerDoc> docs;  // sorted by article id
  PersonCategory category = PersonCategory::kNotInfluential;

  bool operator==(const GazetteerEntry&) const = default;
};

struct Gazetteer {
  int num_topics = 0;
  CategoryThresholds thresholds;
  std::map<std::string, GazetteerEntry> entries;

  std::size_t size() const { return entries.size(); }
  bool operator==(const Gazetteer& o) const {
    return num_topics == o.num_topics && thresholds.lo == o.thresholds.lo && thresholds.hi == o.thresholds.hi &&
           entries == o.entries;
  }
};

// Throws Error naming the first article without a topic.
Gazetteer build_gazetteer(const std::vector<PersonEntity>& entities, const TopicAssignment& assignment,
                          int num_topics, const CategoryThresholds& thresholds = {});

// Line format after a `#` header:
//   person<TAB>doc_id:topic_id:pnf;doc_id:topic_id:pnf;...
// The `:pnf` part may be omitted on import (PNF 1).
void export_gazetteer(const Gazetteer& g, const std::filesystem::path& path);
Gazetteer import_gazetteer(const std::filesystem::path& path);

std::string format_gazetteer(const Gazetteer& g);
Gazetteer parse_gazetteer(const std::string& text, const std::string& source = "<string>");

}  // namespace peoplegaz
