#include <doctest.h>

#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <map>
#include <string>
#include <sys/wait.h>

#include "cli_lib.hpp"
#include "fibrank/io.hpp"
#include "fibrank/metrics.hpp"
#include "fibrank/synth.hpp"

using namespace fibrank;
namespace fs = std::filesystem;

namespace {

const std::string kCli = FIBRANK_CLI_PATH;

fs::path cli_tmp(const std::string& stem) {
  const auto dir = fs::temp_directory_path() / ("fibrank_cli_" + stem);
  fs::remove_all(dir);
  fs::create_directories(dir);
  return dir;
}

int run(const std::string& args) {
  const std::string cmd = kCli + " " + args + " >/dev/null 2>&1";
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

int run_capture(const std::string& args, const fs::path& err_file) {
  const std::string cmd =
      kCli + " " + args + " >/dev/null 2>" + err_file.string();
  const int rc = std::system(cmd.c_str());
  REQUIRE(rc != -1);
  return WEXITSTATUS(rc);
}

// rank,account_id,value rows -> account -> value
std::map<std::string, double> read_ranking(const fs::path& path) {
  std::ifstream in(path);
  REQUIRE(in.good());
  std::string line;
  REQUIRE(std::getline(in, line));
  CHECK(line == "rank,account_id,value");
  std::map<std::string, double> out;
  while (std::getline(in, line)) {
    const auto c1 = line.find(',');
    const auto c2 = line.rfind(',');
    REQUIRE(c1 != std::string::npos);
    REQUIRE(c2 > c1);
    out[line.substr(c1 + 1, c2 - c1 - 1)] = std::stod(line.substr(c2 + 1));
  }
  return out;
}

} // namespace

TEST_CASE("cli synth then rank reproduces the planted fib column") {
  const auto dir = cli_tmp("synth_rank");
  REQUIRE(run("synth --seed 42 --accounts 150 --superspreaders 5 -o " +
              (dir / "gen").string()) == 0);
  REQUIRE(run("rank -c " + (dir / "gen" / "config.json").string() + " -o " +
              (dir / "ranked").string()) == 0);

  const auto truth =
      GroundTruth::from_json(read_file(dir / "gen" / "truth.json"));
  const auto got = read_ranking(dir / "ranked" / "ranking_fib.csv");
  REQUIRE(got.size() == truth.observation.fib_inputs.size());
  for (const auto& [account, counts] : truth.observation.fib_inputs) {
    REQUIRE(got.count(account) == 1);
    CHECK(got.at(account) == double(fib_index(counts)));
  }

  const auto infl = read_ranking(dir / "ranked" / "ranking_influence.csv");
  for (const auto& [account, weight] : truth.observation.influence) {
    REQUIRE(infl.count(account) == 1);
    CHECK(infl.at(account) == double(weight));
  }
}

TEST_CASE("cli dismantle with no candidates emits single-point curves") {
  const auto dir = cli_tmp("flat");
  write_file(dir / "corpus.jsonl", "");
  write_file(dir / "domains.txt", "junk.example\n");
  cli::PipelineConfig cfg;
  cfg.input = "corpus.jsonl";
  cfg.domain_list = "domains.txt";
  cfg.split.observation = {0, 100};
  cfg.split.evaluation = {100, 200};
  cfg.out_dir = "out";
  cfg.save((dir / "config.json").string());

  REQUIRE(run("dismantle -c " + (dir / "config.json").string()) == 0);
  CHECK(read_file(dir / "out" / "curves.csv") ==
        "metric,k,remaining\n"
        "optimal,0,1\n"
        "fib,0,1\n"
        "influence,0,1\n");
  CHECK(read_file(dir / "out" / "shares.csv") == "account_id,m\n");
}

TEST_CASE("cli exit codes") {
  const auto dir = cli_tmp("exits");

  SUBCASE("unknown subcommand is a usage error") {
    CHECK(run("frobnicate") == 1);
    CHECK(run("") == 1);
  }

  SUBCASE("missing input names the path") {
    const auto missing = (dir / "absent.jsonl").string();
    const auto err = dir / "err.txt";
    CHECK(run_capture("rank -i " + missing + " --domains " + missing +
                          " --obs-start 0 --obs-end 10 --eval-start 10 "
                          "--eval-end 20 -o " + (dir / "out").string(),
                      err) == 2);
    CHECK(read_file(err).find(missing) != std::string::npos);
  }

  SUBCASE("malformed corpus line reports its number in strict mode") {
    write_file(dir / "bad.jsonl", "{\"ok\": false\n");
    write_file(dir / "domains.txt", "junk.example\n");
    const auto err = dir / "err2.txt";
    CHECK(run_capture("rank -i " + (dir / "bad.jsonl").string() +
                          " --domains " + (dir / "domains.txt").string() +
                          " --obs-start 0 --obs-end 10 --eval-start 10 "
                          "--eval-end 20 -o " + (dir / "out").string(),
                      err) == 2);
    CHECK(read_file(err).find("line 1") != std::string::npos);
  }

  SUBCASE("bad config value is a usage error") {
    cli::PipelineConfig cfg;
    cfg.input = "x.jsonl";
    cfg.domain_list = "d.txt";
    cfg.split.observation = {100, 50};  // inverted
    cfg.split.evaluation = {100, 200};
    cfg.save((dir / "bad_config.json").string());
    CHECK(run("rank -c " + (dir / "bad_config.json").string()) == 1);
  }
}

TEST_CASE("pipeline config json round trip") {
  cli::PipelineConfig cfg;
  cfg.input = "corpus.jsonl.gz";
  cfg.domain_list = "list.txt";
  cfg.shortener_map = "short.tsv";
  cfg.status_file = "status.csv";
  cfg.annotation_file = "notes.csv";
  cfg.split.observation = {1000, 2000};
  cfg.split.evaluation = {2000, 9000};
  cfg.metrics = {Metric::Popularity, Metric::BotScore, Metric::Fib};
  cfg.top_rule = TopRule::top_n(25);
  cfg.ratio_window = {1500, 1800};
  cfg.out_dir = "artifacts";
  cfg.seed = 99;
  cfg.scorer = "cached";
  cfg.scorer_endpoint = "http://scorer.local/v1";
  cfg.toxicity_cache = "tox.tsv";
  cfg.follower_threshold = 12345;
  cfg.max_scan_k = 77;
  cfg.curve_stride = 4;
  cfg.workers = 3;
  cfg.strict = false;

  const auto text = cfg.to_json();
  const auto back = cli::PipelineConfig::from_json(text);
  CHECK(back.to_json() == text);
  CHECK(back.metrics == cfg.metrics);
  CHECK(back.top_rule.kind == TopRule::Kind::top_n);
  CHECK(back.top_rule.n == 25);
  CHECK(back.ratio_window.start == 1500);
  CHECK(back.strict == false);

  SUBCASE("save and load") {
    const auto dir = cli_tmp("roundtrip");
    cfg.save((dir / "config.json").string());
    const auto loaded = cli::PipelineConfig::load((dir / "config.json").string());
    CHECK(loaded.to_json() == text);
  }

  SUBCASE("defaults survive a minimal document") {
    const auto minimal = cli::PipelineConfig::from_json("{\"input\": \"a.jsonl\"}");
    CHECK(minimal.input == "a.jsonl");
    CHECK(minimal.scorer == "offline-stub");
    CHECK(minimal.strict == true);
    CHECK(minimal.metrics == std::vector<Metric>{Metric::Fib, Metric::Influence});
  }

  SUBCASE("malformed documents throw") {
    CHECK_THROWS_AS(cli::PipelineConfig::from_json("{nope"), ConfigError);
    CHECK_THROWS_AS(cli::PipelineConfig::from_json("[]"), ConfigError);
    CHECK_THROWS_AS(
        cli::PipelineConfig::from_json("{\"metrics\": [\"upward\"]}"),
        ConfigError);
  }
}

TEST_CASE("cli reruns are byte-identical outside the manifest timestamp") {
  const auto dir = cli_tmp("determinism");
  REQUIRE(run("synth --seed 5 --accounts 120 --superspreaders 4 -o " +
              (dir / "gen").string()) == 0);
  const auto cfg = (dir / "gen" / "config.json").string();
  REQUIRE(run("dismantle -c " + cfg + " -o " + (dir / "a").string()) == 0);
  REQUIRE(run("dismantle -c " + cfg + " -o " + (dir / "b").string()) == 0);
  CHECK(read_file(dir / "a" / "curves.csv") == read_file(dir / "b" / "curves.csv"));
  CHECK(read_file(dir / "a" / "shares.csv") == read_file(dir / "b" / "shares.csv"));
}
