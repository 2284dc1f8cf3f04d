#include <doctest.h>

#include <algorithm>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

#include "fibrank/dismantle.hpp"
#include "fibrank/domain.hpp"
#include "fibrank/error.hpp"
#include "fibrank/ingest.hpp"
#include "fibrank/io.hpp"
#include "fibrank/metrics.hpp"
#include "fibrank/network.hpp"
#include "fibrank/synth.hpp"

using namespace fibrank;

namespace {

GeneratorConfig small_config(std::uint64_t seed) {
  GeneratorConfig c;
  c.seed = seed;
  c.n_accounts = 80;
  c.n_superspreaders = 4;
  c.lowcred_domain_count = 5;
  c.observation_days = 30;
  c.evaluation_days = 90;
  return c;
}

struct ParsedCorpus {
  std::vector<LabeledRecord> observation;
  std::vector<LabeledRecord> evaluation;
  std::uint64_t dropped = 0;
};

ParsedCorpus replay(const SynthResult& result) {
  DomainList list;
  for (const auto& d : result.truth.lowcred_domains) list.add(d);
  const auto& psl = PublicSuffixList::bundled();

  std::vector<TweetRecord> records;
  records.reserve(result.corpus_lines.size());
  for (const auto& line : result.corpus_lines) records.push_back(parse_record(line));

  auto split = split_periods(std::move(records), result.truth.split);
  ParsedCorpus out;
  out.dropped = split.dropped;
  for (auto* src : {&split.observation, &split.evaluation}) {
    auto& dst = src == &split.observation ? out.observation : out.evaluation;
    dst.reserve(src->size());
    for (auto& rec : *src) {
      const bool low = label_low_credibility(rec, list, psl);
      dst.push_back(LabeledRecord{std::move(rec), low});
    }
  }
  return out;
}

void check_network_matches(const RetweetNetwork& net, const PeriodTruth& truth) {
  CHECK(net.total_weight() == truth.total_weight);
  CHECK(net.poster_count() == truth.influence.size());
  std::size_t n_edges = 0;
  for (const auto& [poster, out] : truth.edges) {
    for (const auto& [retweeter, w] : out) {
      CHECK(net.edge_weight(poster, retweeter) == w);
      ++n_edges;
    }
  }
  CHECK(net.edge_count() == n_edges);
  for (const auto& [poster, infl] : truth.influence) {
    CHECK(net.is_poster(poster));
    CHECK(net.out_strength(poster) == infl);
  }
}

} // namespace

TEST_SUITE("synth") {

TEST_CASE("config validation") {
  CHECK_NOTHROW(GeneratorConfig{}.validate());
  auto bad = small_config(1);
  bad.n_accounts = 9;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.n_superspreaders = 41; // over half
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.activity_exponent = 1.0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.retweet_exponent = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.lowcred_domain_count = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.planted_residual = 0.5;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad.planted_residual = -0.01;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.observation_days = 0;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
  bad = small_config(1);
  bad.evaluation_days = -1;
  CHECK_THROWS_AS(bad.validate(), ConfigError);
}

TEST_CASE("period split is contiguous and valid") {
  const auto cfg = small_config(1);
  const auto split = cfg.split();
  CHECK_NOTHROW(split.validate());
  CHECK(split.observation.end == split.evaluation.start);
  CHECK(split.observation.length() == cfg.observation_days * 86400);
  CHECK(split.evaluation.length() == cfg.evaluation_days * 86400);
}

TEST_CASE("generation is deterministic in the seed") {
  const auto a = generate(small_config(9));
  const auto b = generate(small_config(9));
  CHECK(a.corpus_lines == b.corpus_lines);
  CHECK(a.truth.to_json() == b.truth.to_json());

  const auto c = generate(small_config(10));
  CHECK(a.corpus_lines != c.corpus_lines);
}

TEST_CASE("zero superspreaders is a valid configuration") {
  auto cfg = small_config(3);
  cfg.n_superspreaders = 0;
  CHECK_NOTHROW(cfg.validate());
  const auto result = generate(cfg);
  CHECK(result.truth.superspreaders.empty());
  CHECK(result.corpus_lines.size() > 0);
}

TEST_CASE("record counts partition the corpus") {
  const auto result = generate(small_config(4));
  CHECK(result.truth.observation.n_records + result.truth.evaluation.n_records +
            result.truth.n_dropped ==
        result.corpus_lines.size());
  CHECK(result.truth.n_dropped >= 5); // stragglers on both sides
  CHECK(result.truth.n_dropped <= 10);
}

TEST_CASE("realized residual lands near the configured share") {
  for (const std::uint64_t seed : {11u, 12u, 13u}) {
    const auto result = generate(small_config(seed));
    CHECK(result.truth.residual_fraction > 0.10);
    CHECK(result.truth.residual_fraction < 0.16);
  }
}

TEST_CASE("replaying the corpus reproduces the ground truth") {
  const auto result = generate(small_config(7));
  const auto corpus = replay(result);

  CHECK(corpus.observation.size() == result.truth.observation.n_records);
  CHECK(corpus.evaluation.size() == result.truth.evaluation.n_records);
  CHECK(corpus.dropped == result.truth.n_dropped);

  const auto obs_net = build_network(corpus.observation);
  check_network_matches(obs_net, result.truth.observation);
  const auto eval_net = build_network(corpus.evaluation);
  check_network_matches(eval_net, result.truth.evaluation);

  MetricsAccumulator acc;
  for (const auto& rec : corpus.observation) acc.add(rec);
  CHECK(acc.fib_inputs() == result.truth.observation.fib_inputs);
  const auto metrics = std::move(acc).finish();
  CHECK(metrics.size() == result.truth.observation.influence.size());
  for (const auto& row : metrics) {
    const auto& inputs = result.truth.observation.fib_inputs.at(row.account_id);
    CHECK(row.influence == result.truth.observation.influence.at(row.account_id));
    CHECK(row.fib_index == fib_index(inputs));
    CHECK(row.n_misinfo_posts == inputs.size());
  }

  // the generator's m values and residual use the same integer arithmetic
  for (const auto& [poster, m] : result.truth.m_eval)
    CHECK(misinfo_share(eval_net, poster) == m);
  std::vector<std::string> obs_posters;
  for (const auto& [poster, infl] : result.truth.observation.influence)
    obs_posters.push_back(poster);
  CHECK(residual_floor(eval_net, obs_posters) == result.truth.residual_fraction);
}

TEST_CASE("planted superspreaders surface at the top of the rankings") {
  auto cfg = small_config(21);
  cfg.n_accounts = 120;
  cfg.n_superspreaders = 5;
  const auto result = generate(cfg);
  const auto corpus = replay(result);

  MetricsAccumulator acc;
  for (const auto& rec : corpus.observation) acc.add(rec);
  const auto metrics = std::move(acc).finish();

  for (const auto metric : {Metric::Fib, Metric::Influence}) {
    const auto ranking = rank_accounts(metrics, metric);
    REQUIRE(ranking.size() >= 2 * cfg.n_superspreaders);
    const auto head_end =
        ranking.ordered_accounts.begin() +
        static_cast<std::ptrdiff_t>(2 * cfg.n_superspreaders);
    for (const auto& super : result.truth.superspreaders)
      CHECK(std::find(ranking.ordered_accounts.begin(), head_end, super) != head_end);
  }
}

TEST_CASE("ground truth JSON round trips") {
  const auto result = generate(small_config(5));
  const auto& t = result.truth;
  const auto back = GroundTruth::from_json(t.to_json());
  CHECK(back.split.observation.start == t.split.observation.start);
  CHECK(back.split.observation.end == t.split.observation.end);
  CHECK(back.split.evaluation.end == t.split.evaluation.end);
  CHECK(back.superspreaders == t.superspreaders);
  CHECK(back.lowcred_domains == t.lowcred_domains);
  CHECK(back.observation.edges == t.observation.edges);
  CHECK(back.observation.influence == t.observation.influence);
  CHECK(back.observation.fib_inputs == t.observation.fib_inputs);
  CHECK(back.observation.total_weight == t.observation.total_weight);
  CHECK(back.observation.n_records == t.observation.n_records);
  CHECK(back.evaluation.edges == t.evaluation.edges);
  CHECK(back.evaluation.influence == t.evaluation.influence);
  CHECK(back.evaluation.total_weight == t.evaluation.total_weight);
  CHECK(back.m_eval == t.m_eval);
  CHECK(back.residual_fraction == t.residual_fraction);
  CHECK(back.n_dropped == t.n_dropped);

  CHECK_THROWS_AS(GroundTruth::from_json("{not json"), ParseError);
  CHECK_THROWS_AS(GroundTruth::from_json("[]"), ParseError);
  CHECK_THROWS_AS(GroundTruth::from_json("{\"split\": {}}"), ParseError);
}

TEST_CASE("write_synth_result emits a readable corpus and truth file") {
  const auto dir = std::filesystem::temp_directory_path();
  const auto corpus_path = (dir / "fibrank_synth_corpus.jsonl").string();
  const auto truth_path = (dir / "fibrank_synth_truth.json").string();

  auto cfg = small_config(6);
  cfg.n_accounts = 20;
  cfg.n_superspreaders = 2;
  const auto result = generate(cfg);
  write_synth_result(result, corpus_path, truth_path);

  IngestCounters counters;
  std::vector<TweetRecord> records;
  read_corpus(corpus_path, [&](TweetRecord&& r, std::size_t) {
    records.push_back(std::move(r));
  }, counters);
  CHECK(records.size() == result.corpus_lines.size());
  CHECK(counters.parse_errors == 0);

  const auto truth = GroundTruth::from_json(read_file(truth_path));
  CHECK(truth.superspreaders == result.truth.superspreaders);
  CHECK(truth.evaluation.total_weight == result.truth.evaluation.total_weight);

  std::filesystem::remove(corpus_path);
  std::filesystem::remove(truth_path);

  // gzip output round trips through the same reader
  const auto gz_path = (dir / "fibrank_synth_corpus.jsonl.gz").string();
  write_synth_result(result, gz_path, truth_path);
  IngestCounters gz_counters;
  std::size_t gz_records = 0;
  read_corpus(gz_path, [&](TweetRecord&&, std::size_t) { ++gz_records; }, gz_counters);
  CHECK(gz_records == result.corpus_lines.size());
  std::filesystem::remove(gz_path);
  std::filesystem::remove(truth_path);
}

} // TEST_SUITE
