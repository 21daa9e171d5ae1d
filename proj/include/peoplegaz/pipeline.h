#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "peoplegaz/error.h"
#include "peoplegaz/influence.h"
#include "peoplegaz/pner.h"
#include "peoplegaz/spellcorrect.h"
#include "peoplegaz/topics.h"

namespace peoplegaz {

enum class Stage { kIngest, kCorrect, kNer, kTopics, kCoref, kGazetteer, kRank, kStats, kCompare };

std::string_view stage_name(Stage s);
std::optional<Stage> parse_stage(std::string_view name);

struct PipelineConfig {
  std::filesystem::path corpus_dir;
  std::optional<std::filesystem::path> manifest;
  std::filesystem::path out_dir = "out";

  std::optional<std::filesystem::path> general_lexicon;
  std::optional<std::filesystem::path> names_lexicon;
  std::optional<std::filesystem::path> honorifics_file;
  std::optional<std::filesystem::path> stopwords_file;

  bool spell_correction = true;
  CorrectionPolicy spell;

  std::string tagger = "heuristic";  // heuristic | external
  std::optional<std::filesystem::path> mentions_file;

  bool coreference = true;
  bool dump_chains = false;

  LdaParams lda;
  int workers = 1;
  double heldout_fraction = 0.1;
  int fold_in_iterations = 50;

  Weights weights;
  CategoryThresholds thresholds;
  std::size_t top_n = 0;  // 0: dominant topic only

  std::optional<std::filesystem::path> compare_l1;
  std::optional<std::filesystem::path> compare_l2;
  long bucket_size = 100;

  unsigned jobs = 1;  // never affects outputs
};

// JSON round trip. Unknown keys are rejected.
std::string config_to_json(const PipelineConfig& config);
PipelineConfig config_from_json(const std::string& json_text, PipelineConfig base = {});
PipelineConfig load_config(const std::filesystem::path& path, PipelineConfig base = {});

// Deterministic hash of everything that determines a stage's outputs,
// including its upstream stages and the digests of auxiliary input files.
std::string stage_hash(Stage stage, const PipelineConfig& config);

// 64-bit FNV-1a, hex encoded.
std::string digest_bytes(std::string_view bytes);
std::string digest_file(const std::filesystem::path& path);

struct StageResult {
  Stage stage;
  std::filesystem::path dir;
  std::vector<std::filesystem::path> outputs;
};

// Thrown when a required upstream artifact is missing or stale.
class UpstreamError : public Error {
 public:
  UpstreamError(Stage missing, const std::string& what) : Error(what), missing_(missing) {}
  Stage missing() const { return missing_; }

 private:
  Stage missing_;
};

// Runs one stage writing to `<out_dir>/<stage>/` along with a `stage.json`
// snapshot. Throws UpstreamError naming the first missing or stale input.
StageResult run_stage(Stage stage, const PipelineConfig& config);

// ingest -> ... -> rank, then stats.
std::vector<StageResult> run_pipeline(const PipelineConfig& config);

// Installs an externally produced gazetteer file as the gazetteer artifact.
StageResult import_gazetteer_stage(const std::filesystem::path& source, const PipelineConfig& config);
// Copies the current gazetteer artifact to `dest` after validating it.
void export_gazetteer_stage(const std::filesystem::path& dest, const PipelineConfig& config);

}  // namespace peoplegaz
