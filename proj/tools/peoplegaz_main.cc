// peoplegaz: stage-wise and end-to-end driver for the people-gazetteer
// pipeline. Every stage writes into <out>/<stage>/ together with a stage.json
// record that later stages use to refuse missing or stale inputs.

#include <iostream>
#include <optional>
#include <string>

#include "CLI11.hpp"
#include "peoplegaz/pipeline.h"

namespace pg = peoplegaz;
namespace fs = std::filesystem;

namespace {

struct Flags {
  std::string config;
  std::string corpus, manifest, out;
  std::string general_lexicon, names_lexicon, honorifics, stopwords;
  std::size_t max_edit_distance = 0;
  bool no_spell = false;
  std::string tagger, mentions;
  bool no_coref = false, dump_chains = false;
  int topics = 0, iters = 0, workers = 0, fold_in = 0;
  double alpha = 0.0, beta = 0.0, heldout = 0.0;
  std::uint64_t seed = 0;
  std::string weights;
  std::size_t lo = 0, hi = 0, topn = 0;
  std::string l1, l2;
  long bucket = 0;
  unsigned jobs = 0;
  bool print_config = false;
};

struct Options {
  CLI::Option* corpus;
  CLI::Option* manifest;
  CLI::Option* out;
  CLI::Option* general_lexicon;
  CLI::Option* names_lexicon;
  CLI::Option* honorifics;
  CLI::Option* stopwords;
  CLI::Option* max_edit_distance;
  CLI::Option* no_spell;
  CLI::Option* tagger;
  CLI::Option* mentions;
  CLI::Option* no_coref;
  CLI::Option* dump_chains;
  CLI::Option* topics;
  CLI::Option* alpha;
  CLI::Option* beta;
  CLI::Option* iters;
  CLI::Option* workers;
  CLI::Option* seed;
  CLI::Option* heldout;
  CLI::Option* fold_in;
  CLI::Option* weights;
  CLI::Option* lo;
  CLI::Option* hi;
  CLI::Option* topn;
  CLI::Option* l1;
  CLI::Option* l2;
  CLI::Option* bucket;
  CLI::Option* jobs;
};

Options add_options(CLI::App& app, Flags& f) {
  Options o{};
  app.add_option("--config", f.config, "JSON configuration file (flags override it)");
  app.add_flag("--print-config", f.print_config, "Print the resolved configuration and exit");
  o.out = app.add_option("--out", f.out, "Output directory (default: out)");
  o.seed = app.add_option("--seed", f.seed, "Random seed for topic modelling and the held-out split");
  o.jobs = app.add_option("--jobs", f.jobs, "Worker threads; never changes results")->check(CLI::PositiveNumber);

  o.corpus = app.add_option("--corpus", f.corpus, "Directory of <id>.txt articles")->group("Input");
  o.manifest = app.add_option("--manifest", f.manifest, "File listing the article ids to use, in order")->group("Input");

  o.general_lexicon = app.add_option("--general-lexicon", f.general_lexicon, "General word list")->group("Spelling");
  o.names_lexicon = app.add_option("--names-lexicon", f.names_lexicon, "Person-name word list")->group("Spelling");
  o.max_edit_distance =
      app.add_option("--max-edit-distance", f.max_edit_distance, "Largest correction distance (default 2)")
          ->group("Spelling");
  o.no_spell = app.add_flag("--no-spell-correction", f.no_spell, "Skip lexicon correction")->group("Spelling");

  o.tagger = app.add_option("--tagger", f.tagger, "Person tagger")
                 ->check(CLI::IsMember({"heuristic", "external"}))
                 ->group("Names");
  o.mentions = app.add_option("--mentions", f.mentions, "Mention file for --tagger external")->group("Names");
  o.honorifics = app.add_option("--honorifics", f.honorifics, "Honorific list, one per line")->group("Names");
  o.no_coref = app.add_flag("--no-coref", f.no_coref, "Keep tagger name frequencies")->group("Names");
  o.dump_chains = app.add_flag("--dump-chains", f.dump_chains, "Write per-article chain files")->group("Names");

  o.topics = app.add_option("--topics", f.topics, "Number of topics K (default 30)")->group("Topics");
  o.alpha = app.add_option("--alpha", f.alpha, "Dirichlet alpha (default 50/K)")->group("Topics");
  o.beta = app.add_option("--beta", f.beta, "Dirichlet beta (default 0.01)")->group("Topics");
  o.iters = app.add_option("--iters", f.iters, "Gibbs sweeps (default 200)")->group("Topics");
  o.workers = app.add_option("--workers", f.workers, "AD-LDA document partitions P (default 1)")->group("Topics");
  o.heldout = app.add_option("--heldout", f.heldout, "Held-out fraction for perplexity (default 0.1)")->group("Topics");
  o.fold_in = app.add_option("--fold-in", f.fold_in, "Fold-in sweeps for perplexity (default 50)")->group("Topics");
  o.stopwords = app.add_option("--stopwords", f.stopwords, "Stopword list, one per line")->group("Topics");

  o.weights = app.add_option("--weights", f.weights, "DI weights a,b,c for NDL, NSIM, NPNF (default 1,1,1)")
                  ->group("Ranking");
  o.topn = app.add_option("--topn", f.topn, "Use each article's top-N topics for NSIM")->group("Ranking");
  o.lo = app.add_option("--lo", f.lo, "Articles needed to be Popular (default 4)")->group("Ranking");
  o.hi = app.add_option("--hi", f.hi, "Articles needed to be Elite (default 16)")->group("Ranking");

  o.l1 = app.add_option("--l1", f.l1, "First ranking CSV")->group("Compare");
  o.l2 = app.add_option("--l2", f.l2, "Second ranking CSV")->group("Compare");
  o.bucket = app.add_option("--bucket", f.bucket, "Bucket size for average-IPI curves (default 100)")
                 ->group("Compare");
  return o;
}

pg::PipelineConfig resolve(const Flags& f, const Options& o) {
  pg::PipelineConfig c;
  if (!f.config.empty()) c = pg::load_config(f.config, c);
  auto given = [](const CLI::Option* opt) { return opt->count() > 0; };
  if (given(o.corpus)) c.corpus_dir = f.corpus;
  if (given(o.manifest)) c.manifest = fs::path(f.manifest);
  if (given(o.out)) c.out_dir = f.out;
  if (given(o.general_lexicon)) c.general_lexicon = fs::path(f.general_lexicon);
  if (given(o.names_lexicon)) c.names_lexicon = fs::path(f.names_lexicon);
  if (given(o.honorifics)) c.honorifics_file = fs::path(f.honorifics);
  if (given(o.stopwords)) c.stopwords_file = fs::path(f.stopwords);
  if (given(o.max_edit_distance)) c.spell.max_edit_distance = f.max_edit_distance;
  if (given(o.no_spell)) c.spell_correction = false;
  if (given(o.tagger)) c.tagger = f.tagger;
  if (given(o.mentions)) c.mentions_file = fs::path(f.mentions);
  if (given(o.no_coref)) c.coreference = false;
  if (given(o.dump_chains)) c.dump_chains = true;
  if (given(o.topics)) c.lda.topics = f.topics;
  if (given(o.alpha)) c.lda.alpha = f.alpha;
  if (given(o.beta)) c.lda.beta = f.beta;
  if (given(o.iters)) c.lda.iterations = f.iters;
  if (given(o.workers)) c.workers = f.workers;
  if (given(o.seed)) c.lda.seed = f.seed;
  if (given(o.heldout)) c.heldout_fraction = f.heldout;
  if (given(o.fold_in)) c.fold_in_iterations = f.fold_in;
  if (given(o.weights)) c.weights = pg::parse_weights(f.weights);
  if (given(o.topn)) c.top_n = f.topn;
  if (given(o.lo)) c.thresholds.lo = f.lo;
  if (given(o.hi)) c.thresholds.hi = f.hi;
  if (given(o.l1)) c.compare_l1 = fs::path(f.l1);
  if (given(o.l2)) c.compare_l2 = fs::path(f.l2);
  if (given(o.bucket)) c.bucket_size = f.bucket;
  if (given(o.jobs)) c.jobs = f.jobs;
  return c;
}

void report(const pg::StageResult& r) {
  std::cout << pg::stage_name(r.stage) << ": wrote";
  for (const auto& p : r.outputs) std::cout << ' ' << p.string();
  std::cout << '\n';
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"Build a People Gazetteer from OCR newspaper articles and rank influential persons"};
  app.fallthrough();
  app.require_subcommand(0, 1);  // none only with --print-config
  Flags flags;
  const Options opts = add_options(app, flags);

  std::optional<pg::Stage> stage;
  auto add_stage = [&](pg::Stage s, const std::string& help) {
    auto* sub = app.add_subcommand(std::string(pg::stage_name(s)), help);
    sub->fallthrough();
    sub->callback([&stage, s] { stage = s; });
    return sub;
  };
  add_stage(pg::Stage::kIngest, "Read and tokenize the article directory");
  add_stage(pg::Stage::kCorrect, "Join hyphenations and correct spelling against the lexicons");
  add_stage(pg::Stage::kNer, "Tag person names and collapse them into entities");
  add_stage(pg::Stage::kTopics, "Train the topic model and measure held-out perplexity");
  add_stage(pg::Stage::kCoref, "Recount name frequencies from coreference chains");
  add_stage(pg::Stage::kRank, "Score DI/IPI and rank persons");
  add_stage(pg::Stage::kStats, "Per-category averages");
  add_stage(pg::Stage::kCompare, "Compare two ranked lists (Wilcoxon test, bucketed IPI)");

  auto* gaz = app.add_subcommand("gazetteer", "Build, export or import the People Gazetteer");
  gaz->fallthrough();
  gaz->require_subcommand(1);
  std::string gaz_mode, gaz_path;
  auto* gaz_build = gaz->add_subcommand("build", "Combine entities and topic assignments");
  gaz_build->fallthrough();
  gaz_build->callback([&] { gaz_mode = "build"; });
  auto* gaz_export = gaz->add_subcommand("export", "Copy the gazetteer artifact to a file");
  gaz_export->fallthrough();
  gaz_export->add_option("file", gaz_path, "Destination")->required();
  gaz_export->callback([&] { gaz_mode = "export"; });
  auto* gaz_import = gaz->add_subcommand("import", "Install a gazetteer file as the gazetteer artifact");
  gaz_import->fallthrough();
  gaz_import->add_option("file", gaz_path, "Source")->required()->check(CLI::ExistingFile);
  gaz_import->callback([&] { gaz_mode = "import"; });

  bool run_all = false;
  auto* run = app.add_subcommand("run", "Run ingest through rank and stats");
  run->fallthrough();
  run->callback([&] { run_all = true; });

  CLI11_PARSE(app, argc, argv);

  try {
    const pg::PipelineConfig config = resolve(flags, opts);
    if (flags.print_config) {
      std::cout << pg::config_to_json(config);
      return 0;
    }
    if (app.get_subcommands().empty()) {
      std::cerr << "A subcommand is required\n" << app.help();
      return 1;
    }
    if (run_all) {
      for (const auto& r : pg::run_pipeline(config)) report(r);
    } else if (gaz_mode == "build") {
      report(pg::run_stage(pg::Stage::kGazetteer, config));
    } else if (gaz_mode == "export") {
      pg::export_gazetteer_stage(gaz_path, config);
      std::cout << "gazetteer: exported to " << gaz_path << '\n';
    } else if (gaz_mode == "import") {
      report(pg::import_gazetteer_stage(gaz_path, config));
    } else if (stage) {
      report(pg::run_stage(*stage, config));
    }
  } catch (const pg::UpstreamError& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 3;
  } catch (const std::exception& e) {
    std::cerr << "error: " << e.what() << '\n';
    return 1;
  }
  return 0;
}
