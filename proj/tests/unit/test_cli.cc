#include <sys/wait.h>

#include <cstdlib>
#include <fstream>

#include "doctest.h"
#include "json.hpp"
#include "synthetic.h"

namespace fs = std::filesystem;

namespace {

struct Run {
  int status = -1;
  std::string out;
  std::string err;
};

std::string slurp(const fs::path& p) {
  std::ifstream in(p, std::ios::binary);
  return std::string((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
}

Run cli(const std::string& args, const fs::path& scratch) {
  const fs::path out = scratch / "stdout.txt", err = scratch / "stderr.txt";
  const std::string cmd =
      std::string("'") + PEOPLEGAZ_CLI_PATH + "' " + args + " >'" + out.string() + "' 2>'" + err.string() + "'";
  const int raw = std::system(cmd.c_str());
  Run r;
  r.status = WIFEXITED(raw) ? WEXITSTATUS(raw) : -1;
  r.out = slurp(out);
  r.err = slurp(err);
  return r;
}

}  // namespace

TEST_SUITE("cli") {
  TEST_CASE("help and unknown options") {
    const auto dir = peoplegaz::testing::scratch_dir("cli-help");
    const auto help = cli("--help", dir);
    CHECK(help.status == 0);
    CHECK(help.out.find("rank") != std::string::npos);
    CHECK(cli("--no-such-flag", dir).status != 0);
    CHECK(cli("rank --weights 1,x,1 --out " + (dir / "o").string(), dir).status != 0);
  }

  TEST_CASE("rank without a gazetteer names the gazetteer stage") {
    const auto dir = peoplegaz::testing::scratch_dir("cli-missing");
    const auto r = cli("rank --out '" + (dir / "out").string() + "'", dir);
    CHECK(r.status == 3);
    CHECK(r.err.find("'gazetteer'") != std::string::npos);
  }

  TEST_CASE("flags override the config file") {
    const auto dir = peoplegaz::testing::scratch_dir("cli-config");
    std::ofstream(dir / "run.json") << R"({"topics": 12, "seed": 5, "corpus_dir": "articles"})";
    const auto r = cli("--config '" + (dir / "run.json").string() + "' --seed 8 --print-config", dir);
    REQUIRE(r.status == 0);
    const auto j = nlohmann::json::parse(r.out);
    CHECK(j["topics"] == 12);
    CHECK(j["seed"] == 8);
    CHECK(fs::weakly_canonical(fs::path(j["corpus_dir"].get<std::string>())) ==
          fs::weakly_canonical(dir / "articles"));
    CHECK(cli("--config '" + (dir / "missing.json").string() + "' --print-config", dir).status != 0);
  }

  TEST_CASE("stage by stage, then the whole pipeline in one call") {
    const auto dir = peoplegaz::testing::scratch_dir("cli-run");
    const auto fx = peoplegaz::testing::write_newspaper_fixture(dir / "fixture", 30, 88);
    const std::string common = " --corpus '" + fx.corpus_dir.string() + "' --general-lexicon '" +
                               fx.general_lexicon.string() + "' --names-lexicon '" + fx.names_lexicon.string() +
                               "' --iters 20 --fold-in 5 --seed 2";
    const std::string staged = " --out '" + (dir / "staged").string() + "'";
    const std::string four = " --topics 4";
    for (const char* stage : {"ingest", "correct", "ner", "topics", "coref"})
      REQUIRE(cli(std::string(stage) + common + four + staged, dir).status == 0);
    REQUIRE(cli("gazetteer build" + common + four + staged, dir).status == 0);
    REQUIRE(cli("rank" + common + four + staged, dir).status == 0);

    // Changing the topic count without rerunning topics is refused.
    const auto stale = cli("rank" + common + staged + " --topics 5", dir);
    CHECK(stale.status == 3);
    CHECK(stale.err.find("'topics'") != std::string::npos);

    const auto whole = cli("run --jobs 2" + common + four + " --out '" + (dir / "whole").string() + "'", dir);
    REQUIRE(whole.status == 0);
    CHECK(slurp(dir / "whole" / "rank" / "ranking.csv") == slurp(dir / "staged" / "rank" / "ranking.csv"));

    REQUIRE(cli("gazetteer export '" + (dir / "g.tsv").string() + "'" + common + four + staged, dir).status == 0);
    CHECK(slurp(dir / "g.tsv") == slurp(dir / "staged" / "gazetteer" / "gazetteer.tsv"));
  }
}
