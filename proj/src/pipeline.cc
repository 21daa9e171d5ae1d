#include "peoplegaz/pipeline.h"

#include <algorithm>
#include <array>
#include <cstdio>
#include <fstream>
#include <functional>
#include <set>
#include <sstream>

#include "json.hpp"
#include "peoplegaz/coref.h"
#include "peoplegaz/corpus.h"
#include "peoplegaz/diag.h"
#include "peoplegaz/evalcmp.h"
#include "peoplegaz/gazetteer.h"
#include "peoplegaz/influence.h"

namespace peoplegaz {

namespace fs = std::filesystem;
using nlohmann::json;
using nlohmann::ordered_json;

namespace {

constexpr std::array<std::pair<Stage, std::string_view>, 9> kStageNames = {{
    {Stage::kIngest, "ingest"},
    {Stage::kCorrect, "correct"},
    {Stage::kNer, "ner"},
    {Stage::kTopics, "topics"},
    {Stage::kCoref, "coref"},
    {Stage::kGazetteer, "gazetteer"},
    {Stage::kRank, "rank"},
    {Stage::kStats, "stats"},
    {Stage::kCompare, "compare"},
}};

}  // namespace

std::string_view stage_name(Stage s) {
  for (const auto& [stage, name] : kStageNames) {
    if (stage == s) return name;
  }
  return "?";
}

std::optional<Stage> parse_stage(std::string_view name) {
  for (const auto& [stage, n] : kStageNames) {
    if (n == name) return stage;
  }
  return std::nullopt;
}

// ---------------------------------------------------------------------------
// Configuration

namespace {

json opt_path(const std::optional<fs::path>& p) { return p ? json(p->string()) : json(nullptr); }

}  // namespace

std::string config_to_json(const PipelineConfig& c) {
  ordered_json j;
  j["corpus_dir"] = c.corpus_dir.string();
  j["manifest"] = opt_path(c.manifest);
  j["out_dir"] = c.out_dir.string();
  j["general_lexicon"] = opt_path(c.general_lexicon);
  j["names_lexicon"] = opt_path(c.names_lexicon);
  j["honorifics_file"] = opt_path(c.honorifics_file);
  j["stopwords_file"] = opt_path(c.stopwords_file);
  j["spell_correction"] = c.spell_correction;
  j["max_edit_distance"] = c.spell.max_edit_distance;
  j["prefer_person_lexicon"] = c.spell.prefer_person_lexicon;
  j["min_token_length"] = c.spell.min_token_length;
  j["tagger"] = c.tagger;
  j["mentions_file"] = opt_path(c.mentions_file);
  j["coreference"] = c.coreference;
  j["dump_chains"] = c.dump_chains;
  j["topics"] = c.lda.topics;
  j["alpha"] = c.lda.alpha;
  j["beta"] = c.lda.beta;
  j["iterations"] = c.lda.iterations;
  j["seed"] = c.lda.seed;
  j["workers"] = c.workers;
  j["heldout_fraction"] = c.heldout_fraction;
  j["fold_in_iterations"] = c.fold_in_iterations;
  j["weights"] = {c.weights.length, c.weights.similarity, c.weights.frequency};
  j["threshold_lo"] = c.thresholds.lo;
  j["threshold_hi"] = c.thresholds.hi;
  j["top_n"] = c.top_n;
  j["compare_l1"] = opt_path(c.compare_l1);
  j["compare_l2"] = opt_path(c.compare_l2);
  j["bucket_size"] = c.bucket_size;
  j["jobs"] = c.jobs;
  return j.dump(2) + "\n";
}

namespace {

PipelineConfig config_from_object(const json& j, PipelineConfig c, const fs::path& base_dir) {
  if (!j.is_object()) throw Error("configuration must be a JSON object");
  auto path_of = [&](const json& v) {
    fs::path p = v.get<std::string>();
    return (p.is_relative() && !base_dir.empty()) ? base_dir / p : p;
  };
  auto opt = [&](const json& v) -> std::optional<fs::path> {
    if (v.is_null()) return std::nullopt;
    return path_of(v);
  };
  using Setter = std::function<void(const json&)>;
  const std::map<std::string, Setter> setters = {
      {"corpus_dir", [&](const json& v) { c.corpus_dir = path_of(v); }},
      {"manifest", [&](const json& v) { c.manifest = opt(v); }},
      {"out_dir", [&](const json& v) { c.out_dir = path_of(v); }},
      {"general_lexicon", [&](const json& v) { c.general_lexicon = opt(v); }},
      {"names_lexicon", [&](const json& v) { c.names_lexicon = opt(v); }},
      {"honorifics_file", [&](const json& v) { c.honorifics_file = opt(v); }},
      {"stopwords_file", [&](const json& v) { c.stopwords_file = opt(v); }},
      {"spell_correction", [&](const json& v) { c.spell_correction = v.get<bool>(); }},
      {"max_edit_distance", [&](const json& v) { c.spell.max_edit_distance = v.get<std::size_t>(); }},
      {"prefer_person_lexicon", [&](const json& v) { c.spell.prefer_person_lexicon = v.get<bool>(); }},
      {"min_token_length", [&](const json& v) { c.spell.min_token_length = v.get<std::size_t>(); }},
      {"tagger", [&](const json& v) { c.tagger = v.get<std::string>(); }},
      {"mentions_file", [&](const json& v) { c.mentions_file = opt(v); }},
      {"coreference", [&](const json& v) { c.coreference = v.get<bool>(); }},
      {"dump_chains", [&](const json& v) { c.dump_chains = v.get<bool>(); }},
      {"topics", [&](const json& v) { c.lda.topics = v.get<int>(); }},
      {"alpha", [&](const json& v) { c.lda.alpha = v.get<double>(); }},
      {"beta", [&](const json& v) { c.lda.beta = v.get<double>(); }},
      {"iterations", [&](const json& v) { c.lda.iterations = v.get<int>(); }},
      {"seed", [&](const json& v) { c.lda.seed = v.get<std::uint64_t>(); }},
      {"workers", [&](const json& v) { c.workers = v.get<int>(); }},
      {"heldout_fraction", [&](const json& v) { c.heldout_fraction = v.get<double>(); }},
      {"fold_in_iterations", [&](const json& v) { c.fold_in_iterations = v.get<int>(); }},
      {"weights",
       [&](const json& v) {
         if (v.is_string()) {
           c.weights = parse_weights(v.get<std::string>());
         } else {
           const auto w = v.get<std::vector<double>>();
           if (w.size() != 3) throw Error("weights must have three entries");
           std::ostringstream s;
           s.precision(17);
           s << w[0] << ',' << w[1] << ',' << w[2];
           c.weights = parse_weights(s.str());
         }
       }},
      {"threshold_lo", [&](const json& v) { c.thresholds.lo = v.get<std::size_t>(); }},
      {"threshold_hi", [&](const json& v) { c.thresholds.hi = v.get<std::size_t>(); }},
      {"top_n", [&](const json& v) { c.top_n = v.get<std::size_t>(); }},
      {"compare_l1", [&](const json& v) { c.compare_l1 = opt(v); }},
      {"compare_l2", [&](const json& v) { c.compare_l2 = opt(v); }},
      {"bucket_size", [&](const json& v) { c.bucket_size = v.get<long>(); }},
      {"jobs", [&](const json& v) { c.jobs = v.get<unsigned>(); }},
  };
  for (const auto& [key, value] : j.items()) {
    auto it = setters.find(key);
    if (it == setters.end()) throw Error("unknown configuration key '" + key + "'");
    try {
      it->second(value);
    } catch (const json::exception& e) {
      throw Error("bad value for configuration key '" + key + "': " + e.what());
    }
  }
  return c;
}

}  // namespace

PipelineConfig config_from_json(const std::string& json_text, PipelineConfig base) {
  json j;
  try {
    j = json::parse(json_text);
  } catch (const json::parse_error& e) {
    throw Error(std::string("configuration is not valid JSON: ") + e.what());
  }
  return config_from_object(j, std::move(base), {});
}

PipelineConfig load_config(const fs::path& path, PipelineConfig base) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read configuration " + path.string());
  std::ostringstream buf;
  buf << in.rdbuf();
  json j;
  try {
    j = json::parse(buf.str());
  } catch (const json::parse_error& e) {
    throw Error("configuration " + path.string() + " is not valid JSON: " + e.what());
  }
  return config_from_object(j, std::move(base), path.parent_path());
}

// ---------------------------------------------------------------------------
// Digests and stage hashes

namespace {

constexpr std::uint64_t kFnvOffset = 0xcbf29ce484222325ULL;
constexpr std::uint64_t kFnvPrime = 0x100000001b3ULL;

std::uint64_t fnv_update(std::uint64_t h, std::string_view bytes) {
  for (unsigned char c : bytes) {
    h ^= c;
    h *= kFnvPrime;
  }
  return h;
}

std::string hex64(std::uint64_t h) {
  char buf[17];
  std::snprintf(buf, sizeof buf, "%016llx", static_cast<unsigned long long>(h));
  return buf;
}

}  // namespace

std::string digest_bytes(std::string_view bytes) { return hex64(fnv_update(kFnvOffset, bytes)); }

std::string digest_file(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error("cannot read " + path.string());
  std::uint64_t h = kFnvOffset;
  char buf[1 << 16];
  while (in) {
    in.read(buf, sizeof buf);
    h = fnv_update(h, std::string_view(buf, static_cast<std::size_t>(in.gcount())));
  }
  return hex64(h);
}

namespace {

std::vector<Stage> upstreams(Stage s) {
  switch (s) {
    case Stage::kIngest:
      return {};
    case Stage::kCorrect:
      return {Stage::kIngest};
    case Stage::kNer:
      return {Stage::kCorrect};
    case Stage::kTopics:
      return {Stage::kCorrect};
    case Stage::kCoref:
      return {Stage::kNer, Stage::kCorrect};
    case Stage::kGazetteer:
      return {Stage::kCoref, Stage::kTopics};
    case Stage::kRank:
      return {Stage::kGazetteer, Stage::kCorrect, Stage::kTopics};
    case Stage::kStats:
      return {Stage::kGazetteer, Stage::kCorrect};
    case Stage::kCompare:
      return {};
  }
  return {};
}

json opt_digest(const std::optional<fs::path>& p) { return p ? json(digest_file(*p)) : json(nullptr); }

// Digest of every article file in the corpus directory, by name.
std::string corpus_digest(const fs::path& dir) {
  if (!fs::is_directory(dir)) throw Error("corpus directory " + dir.string() + " does not exist");
  std::vector<fs::path> files;
  for (const auto& e : fs::directory_iterator(dir)) {
    if (e.is_regular_file() && e.path().extension() == ".txt") files.push_back(e.path());
  }
  std::sort(files.begin(), files.end());
  std::uint64_t h = kFnvOffset;
  for (const auto& f : files) {
    h = fnv_update(h, f.filename().string());
    h = fnv_update(h, "\t");
    h = fnv_update(h, digest_file(f));
    h = fnv_update(h, "\n");
  }
  return hex64(h);
}

// Everything a stage itself depends on; nullopt when the inputs needed to
// compute it were not given (ingest without a corpus directory).
std::optional<ordered_json> stage_params(Stage s, const PipelineConfig& c) {
  ordered_json p;
  switch (s) {
    case Stage::kIngest:
      if (c.corpus_dir.empty()) return std::nullopt;
      p["corpus"] = corpus_digest(c.corpus_dir);
      p["manifest"] = opt_digest(c.manifest);
      break;
    case Stage::kCorrect:
      p["spell_correction"] = c.spell_correction;
      p["max_edit_distance"] = c.spell.max_edit_distance;
      p["prefer_person_lexicon"] = c.spell.prefer_person_lexicon;
      p["min_token_length"] = c.spell.min_token_length;
      p["general_lexicon"] = opt_digest(c.general_lexicon);
      p["names_lexicon"] = opt_digest(c.names_lexicon);
      break;
    case Stage::kNer:
      p["tagger"] = c.tagger;
      p["mentions_file"] = c.tagger == "external" ? opt_digest(c.mentions_file) : json(nullptr);
      p["names_lexicon"] = opt_digest(c.names_lexicon);
      p["honorifics_file"] = opt_digest(c.honorifics_file);
      break;
    case Stage::kTopics:
      p["topics"] = c.lda.topics;
      p["alpha"] = c.lda.topics > 0 ? c.lda.effective_alpha() : c.lda.alpha;
      p["beta"] = c.lda.beta;
      p["iterations"] = c.lda.iterations;
      p["seed"] = c.lda.seed;
      p["workers"] = c.workers;
      p["heldout_fraction"] = c.heldout_fraction;
      p["fold_in_iterations"] = c.fold_in_iterations;
      p["stopwords_file"] = opt_digest(c.stopwords_file);
      break;
    case Stage::kCoref:
      p["coreference"] = c.coreference;
      p["dump_chains"] = c.dump_chains;
      p["honorifics_file"] = opt_digest(c.honorifics_file);
      break;
    case Stage::kGazetteer:
      p["threshold_lo"] = c.thresholds.lo;
      p["threshold_hi"] = c.thresholds.hi;
      break;
    case Stage::kRank:
      p["weights"] = {c.weights.length, c.weights.similarity, c.weights.frequency};
      p["top_n"] = c.top_n;
      break;
    case Stage::kStats:
      p = ordered_json::object();
      break;
    case Stage::kCompare:
      p["compare_l1"] = opt_digest(c.compare_l1);
      p["compare_l2"] = opt_digest(c.compare_l2);
      p["bucket_size"] = c.bucket_size;
      break;
  }
  return p;
}

std::string params_hash(Stage s, const ordered_json& params) {
  std::uint64_t h = fnv_update(kFnvOffset, stage_name(s));
  h = fnv_update(h, "\n");
  h = fnv_update(h, params.dump());
  return hex64(h);
}

std::string combine_hash(Stage s, const std::string& own, const std::map<std::string, std::string>& up) {
  std::uint64_t h = fnv_update(kFnvOffset, stage_name(s));
  h = fnv_update(h, "\n");
  h = fnv_update(h, own);
  for (const auto& [name, hash] : up) {
    h = fnv_update(h, "\n");
    h = fnv_update(h, name);
    h = fnv_update(h, "=");
    h = fnv_update(h, hash);
  }
  return hex64(h);
}

}  // namespace

std::string stage_hash(Stage stage, const PipelineConfig& config) {
  const auto params = stage_params(stage, config);
  const std::string own = params ? params_hash(stage, *params) : std::string("unspecified");
  std::map<std::string, std::string> up;
  for (Stage u : upstreams(stage)) up[std::string(stage_name(u))] = stage_hash(u, config);
  return combine_hash(stage, own, up);
}

// ---------------------------------------------------------------------------
// Stage records

namespace {

constexpr const char* kRecordFile = "stage.json";

struct StageRecord {
  std::string params_hash;
  std::string config_hash;
  bool imported = false;
  std::map<std::string, std::string> upstream;
  std::map<std::string, std::string> outputs;  // path relative to the stage dir -> digest
};

fs::path stage_dir(const PipelineConfig& c, Stage s) { return c.out_dir / std::string(stage_name(s)); }

std::optional<StageRecord> read_record(const fs::path& dir) {
  std::ifstream in(dir / kRecordFile, std::ios::binary);
  if (!in) return std::nullopt;
  try {
    const json j = json::parse(in);
    StageRecord r;
    r.params_hash = j.at("params_hash").get<std::string>();
    r.config_hash = j.at("config_hash").get<std::string>();
    r.imported = j.value("imported", false);
    r.upstream = j.at("upstream").get<std::map<std::string, std::string>>();
    r.outputs = j.at("outputs").get<std::map<std::string, std::string>>();
    return r;
  } catch (const std::exception&) {
    return std::nullopt;
  }
}

class Verifier {
 public:
  explicit Verifier(const PipelineConfig& c) : config_(c) {}

  // Checks that stage `s` and its whole ancestry are present, untouched and
  // built from the current settings. Returns the recorded hash.
  std::string verify(Stage s) {
    const std::string name(stage_name(s));
    if (auto it = verified_.find(name); it != verified_.end()) return it->second;
    const fs::path dir = stage_dir(config_, s);
    const auto rec = read_record(dir);
    if (!rec)
      throw UpstreamError(s, "upstream stage '" + name + "' has not been run (no " + (dir / kRecordFile).string() +
                                 "); run `peoplegaz " + name + "` first");
    for (const auto& [file, digest] : rec->outputs) {
      const fs::path p = dir / file;
      if (!fs::exists(p))
        throw UpstreamError(s, "upstream stage '" + name + "' is incomplete: missing " + p.string());
      if (digest_file(p) != digest)
        throw UpstreamError(s, "upstream stage '" + name + "' output " + p.string() +
                                   " was modified after it was built; rerun `peoplegaz " + name + "`");
    }
    if (!rec->imported) {
      // Ancestors first, so the earliest out-of-date stage is the one named.
      std::map<std::string, std::string> current_up;
      for (Stage u : upstreams(s)) current_up[std::string(stage_name(u))] = verify(u);
      if (const auto params = stage_params(s, config_); params && params_hash(s, *params) != rec->params_hash)
        throw UpstreamError(s, "upstream stage '" + name + "' was built with different settings or inputs; rerun `peoplegaz " +
                                   name + "` or pass the settings it was built with");
      for (const auto& [uname, current] : current_up) {
        auto it = rec->upstream.find(uname);
        if (it == rec->upstream.end() || it->second != current)
          throw UpstreamError(s, "upstream stage '" + name + "' is stale: '" + uname +
                                     "' changed since it was built; rerun `peoplegaz " + name + "`");
      }
    }
    verified_[name] = rec->config_hash;
    return rec->config_hash;
  }

  bool is_imported(Stage s) const {
    const auto rec = read_record(stage_dir(config_, s));
    return rec && rec->imported;
  }

 private:
  const PipelineConfig& config_;
  std::map<std::string, std::string> verified_;
};

// Collects outputs and writes the record once the stage body has succeeded.
class StageWriter {
 public:
  StageWriter(Stage s, const PipelineConfig& c) : stage_(s), config_(c), dir_(stage_dir(c, s)) {
    std::error_code ec;
    fs::remove_all(dir_, ec);
    fs::create_directories(dir_);
  }

  const fs::path& dir() const { return dir_; }
  fs::path file(const std::string& name) {
    outputs_.push_back(name);
    return dir_ / name;
  }

  StageResult finish(const std::map<std::string, std::string>& upstream, const std::string& own_params_hash,
                     bool imported = false) {
    ordered_json outputs = ordered_json::object();
    StageResult result{stage_, dir_, {}};
    std::sort(outputs_.begin(), outputs_.end());
    for (const auto& name : outputs_) {
      outputs[name] = digest_file(dir_ / name);
      result.outputs.push_back(dir_ / name);
    }
    ordered_json j;
    j["stage"] = stage_name(stage_);
    j["format"] = 1;
    j["params_hash"] = own_params_hash;
    j["config_hash"] = combine_hash(stage_, own_params_hash, upstream);
    j["imported"] = imported;
    j["upstream"] = upstream;
    j["outputs"] = std::move(outputs);
    j["config"] = json::parse(config_to_json(config_));
    std::ofstream out(dir_ / kRecordFile, std::ios::binary);
    if (!out) throw Error("cannot write " + (dir_ / kRecordFile).string());
    out << j.dump(2) << '\n';
    return result;
  }

 private:
  Stage stage_;
  const PipelineConfig& config_;
  fs::path dir_;
  std::vector<std::string> outputs_;
};

void write_text(const fs::path& path, const std::string& text) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error("cannot write " + path.string());
  out << text;
  if (!out) throw Error("write failed: " + path.string());
}

std::set<std::string> honorifics_of(const PipelineConfig& c) {
  return c.honorifics_file ? load_honorifics(*c.honorifics_file) : default_honorifics();
}

Lexicon names_of(const PipelineConfig& c) {
  return c.names_lexicon ? Lexicon::load(*c.names_lexicon, LexiconKind::kPersonNames)
                         : Lexicon(LexiconKind::kPersonNames);
}

fs::path artifact(const PipelineConfig& c, Stage s, const std::string& name) { return stage_dir(c, s) / name; }

// ---------------------------------------------------------------------------
// Stage bodies

void do_ingest(const PipelineConfig& c, StageWriter& w) {
  if (c.corpus_dir.empty()) throw Error("ingest needs a corpus directory (--corpus)");
  const LoadReport report = load_corpus(c.corpus_dir, c.manifest);  // reports its own warnings
  write_token_file(report.corpus, w.file("corpus.tsv"));
  write_document_stats(DocumentStats::from_corpus(report.corpus), w.file("stats.tsv"));
}

void do_correct(const PipelineConfig& c, StageWriter& w) {
  const Corpus corpus = read_token_file(artifact(c, Stage::kIngest, "corpus.tsv"));
  std::optional<Lexicon> general, names;
  if (c.general_lexicon) general = Lexicon::load(*c.general_lexicon, LexiconKind::kGeneral);
  if (c.names_lexicon) names = Lexicon::load(*c.names_lexicon, LexiconKind::kPersonNames);
  std::vector<const Lexicon*> lexicons;
  if (general && !general->empty()) lexicons.push_back(&*general);
  if (names && !names->empty()) lexicons.push_back(&*names);

  Corpus out = corpus;
  if (c.spell_correction && !lexicons.empty()) {
    out = correct_corpus(corpus, lexicons, c.spell, c.jobs);
  } else if (c.spell_correction) {
    warn("no lexicon given; spelling correction skipped");
  }
  write_token_file(out, w.file("corpus.tsv"));
  write_document_stats(DocumentStats::from_corpus(out), w.file("stats.tsv"));
}

void do_ner(const PipelineConfig& c, StageWriter& w) {
  const Corpus corpus = read_token_file(artifact(c, Stage::kCorrect, "corpus.tsv"));
  std::vector<PersonMention> mentions;
  if (c.tagger == "heuristic") {
    const Lexicon names = names_of(c);
    mentions = tag_corpus(corpus, HeuristicTagger(names, honorifics_of(c)), c.jobs);
  } else if (c.tagger == "external") {
    if (!c.mentions_file) throw Error("the external tagger needs a mention file (--mentions)");
    mentions = tag_corpus(corpus, ExternalMentionTagger::load(*c.mentions_file), c.jobs);
  } else {
    throw Error("unknown tagger '" + c.tagger + "' (expected heuristic or external)");
  }
  write_mentions(mentions, w.file("mentions.tsv"));
  write_entities(canonicalize(mentions), w.file("entities.tsv"));
}

void do_topics(const PipelineConfig& c, StageWriter& w) {
  const Corpus corpus = read_token_file(artifact(c, Stage::kCorrect, "corpus.tsv"));
  const auto stopwords = c.stopwords_file ? load_stopwords(*c.stopwords_file) : default_stopwords();

  ordered_json perp;
  if (c.heldout_fraction > 0.0 && corpus.size() >= 2) {
    auto [train, heldout] = split_heldout(corpus, c.heldout_fraction, c.lda.seed);
    const BagOfWords train_bow = build_bag_of_words(train, stopwords);
    const int workers = std::min<int>(c.workers, static_cast<int>(train.size()));
    const TopicModel model = train_adlda(train_bow, c.lda, workers, c.jobs);
    const BagOfWords held_bow = project_onto_vocabulary(heldout, model.vocab);
    perp["train_documents"] = train.size();
    perp["heldout_documents"] = heldout.size();
    if (held_bow.total_tokens() > 0) {
      const auto r = perplexity(model, held_bow, {c.fold_in_iterations, c.lda.seed});
      perp["perplexity"] = r.perplexity;
      perp["log_likelihood"] = r.log_likelihood;
      perp["tokens"] = r.tokens;
      perp["oov_dropped"] = r.oov_dropped;
    } else {
      warn("held-out documents have no in-vocabulary tokens; perplexity not computed");
      perp["perplexity"] = nullptr;
    }
  } else {
    perp["perplexity"] = nullptr;
  }

  const BagOfWords bow = build_bag_of_words(corpus, stopwords);
  const TopicModel model = train_adlda(bow, c.lda, c.workers, c.jobs);
  perp["vocabulary_size"] = model.vocab.size();
  save_model(model, w.file("model.txt"));
  write_topic_report(model, w.file("topics.txt"));
  write_doc_topics(model, w.file("doc_topics.tsv"));
  write_text(w.file("perplexity.json"), perp.dump(2) + "\n");
}

void do_coref(const PipelineConfig& c, StageWriter& w) {
  const Corpus corpus = read_token_file(artifact(c, Stage::kCorrect, "corpus.tsv"));
  const auto mentions = read_mentions(artifact(c, Stage::kNer, "mentions.tsv"));
  const auto entities = read_entities(artifact(c, Stage::kNer, "entities.tsv"));
  if (!c.coreference) {
    write_entities(entities, w.file("entities.tsv"));
    return;
  }
  CorefOptions options;
  options.honorifics = honorifics_of(c);
  std::map<std::string, std::vector<CoreferenceChain>> chains;
  const auto adjusted = apply_coreference(corpus, mentions, entities, options, c.jobs, &chains);
  write_entities(adjusted, w.file("entities.tsv"));
  if (c.dump_chains) {
    fs::create_directories(w.dir() / "chains");
    for (const auto& [id, list] : chains) write_chain_dump(list, w.file("chains/" + id + ".tsv"));
  }
}

TopicAssignment dominant_topics(const RankedTopics& ranked, int num_topics) {
  TopicAssignment out;
  for (const auto& [id, topics] : ranked) {
    if (topics.empty() || topics[0] < 0 || topics[0] >= num_topics)
      throw Error("bad topic list for article " + id);
    out[id] = topics[0];
  }
  return out;
}

void do_gazetteer(const PipelineConfig& c, StageWriter& w) {
  const auto entities = read_entities(artifact(c, Stage::kCoref, "entities.tsv"));
  const TopicModel model = load_model(artifact(c, Stage::kTopics, "model.txt"));
  const auto ranked = read_doc_topics(artifact(c, Stage::kTopics, "doc_topics.tsv"));
  const Gazetteer g = build_gazetteer(entities, dominant_topics(ranked, model.num_topics), model.num_topics,
                                      c.thresholds);
  export_gazetteer(g, w.file("gazetteer.tsv"));
}

void do_rank(const PipelineConfig& c, StageWriter& w, bool have_topics) {
  const Gazetteer g = import_gazetteer(artifact(c, Stage::kGazetteer, "gazetteer.tsv"));
  const DocumentStats stats = read_document_stats(artifact(c, Stage::kCorrect, "stats.tsv"));
  std::map<int, std::string> words;
  RankedTopics ranked;
  RankOptions options;
  options.weights = c.weights;
  if (have_topics) words = read_topic_report(artifact(c, Stage::kTopics, "topics.txt"));
  if (c.top_n > 0) {
    if (!have_topics) throw UpstreamError(Stage::kTopics, "top-N similarity needs the 'topics' stage");
    ranked = read_doc_topics(artifact(c, Stage::kTopics, "doc_topics.tsv"));
    options.top_n = c.top_n;
    options.ranked_topics = &ranked;
  }
  const auto records = rank_all(g, stats, options);
  write_text(w.file("ranking.csv"), ranking_csv(records, g, words));
  write_text(w.file("ranking.json"), ranking_json(records, g, words));
}

void do_stats(const PipelineConfig& c, StageWriter& w) {
  const Gazetteer g = import_gazetteer(artifact(c, Stage::kGazetteer, "gazetteer.tsv"));
  const DocumentStats stats = read_document_stats(artifact(c, Stage::kCorrect, "stats.tsv"));
  write_text(w.file("category_stats.csv"), category_stats_csv(category_stats(g, stats)));
}

void do_compare(const PipelineConfig& c, StageWriter& w) {
  if (!c.compare_l1 || !c.compare_l2) throw Error("compare needs two ranking files (--l1, --l2)");
  const auto report = compare_lists(read_ranking_csv(*c.compare_l1), read_ranking_csv(*c.compare_l2), c.bucket_size);
  write_text(w.file("report.json"), comparison_json(report));
  write_text(w.file("buckets.csv"), buckets_csv(report));
}

}  // namespace

StageResult run_stage(Stage stage, const PipelineConfig& config) {
  Verifier verifier(config);
  std::map<std::string, std::string> upstream;
  bool have_topics = true;
  for (Stage u : upstreams(stage)) {
    // An imported gazetteer has no topic model behind it; ranking then runs
    // without topic words unless a topics stage happens to be present.
    if (stage == Stage::kRank && u == Stage::kTopics && verifier.is_imported(Stage::kGazetteer) &&
        !read_record(stage_dir(config, Stage::kTopics))) {
      have_topics = false;
      continue;
    }
    upstream[std::string(stage_name(u))] = verifier.verify(u);
  }
  const auto params = stage_params(stage, config);
  const std::string own = params ? params_hash(stage, *params) : std::string("unspecified");

  StageWriter writer(stage, config);
  switch (stage) {
    case Stage::kIngest:
      do_ingest(config, writer);
      break;
    case Stage::kCorrect:
      do_correct(config, writer);
      break;
    case Stage::kNer:
      do_ner(config, writer);
      break;
    case Stage::kTopics:
      do_topics(config, writer);
      break;
    case Stage::kCoref:
      do_coref(config, writer);
      break;
    case Stage::kGazetteer:
      do_gazetteer(config, writer);
      break;
    case Stage::kRank:
      do_rank(config, writer, have_topics);
      break;
    case Stage::kStats:
      do_stats(config, writer);
      break;
    case Stage::kCompare:
      do_compare(config, writer);
      break;
  }
  return writer.finish(upstream, own);
}

std::vector<StageResult> run_pipeline(const PipelineConfig& config) {
  std::vector<StageResult> out;
  for (Stage s : {Stage::kIngest, Stage::kCorrect, Stage::kNer, Stage::kTopics, Stage::kCoref, Stage::kGazetteer,
                  Stage::kRank, Stage::kStats}) {
    out.push_back(run_stage(s, config));
  }
  return out;
}

StageResult import_gazetteer_stage(const fs::path& source, const PipelineConfig& config) {
  const Gazetteer g = import_gazetteer(source);
  StageWriter writer(Stage::kGazetteer, config);
  export_gazetteer(g, writer.file("gazetteer.tsv"));
  return writer.finish({}, "import:" + digest_file(source), true);
}

void export_gazetteer_stage(const fs::path& dest, const PipelineConfig& config) {
  Verifier verifier(config);
  verifier.verify(Stage::kGazetteer);
  const Gazetteer g = import_gazetteer(artifact(config, Stage::kGazetteer, "gazetteer.tsv"));
  export_gazetteer(g, dest);
}

}  // namespace peoplegaz
