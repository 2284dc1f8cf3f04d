#pragma once

#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include "fibrank/ingest.hpp"

namespace fibrank {

/// Synthetic-corpus knobs. Identical configs generate byte-identical
/// corpora; every random draw flows from the one seed.
struct GeneratorConfig {
  std::uint64_t seed = 1;
  std::size_t n_accounts = 400;
  std::size_t n_superspreaders = 8;
  double activity_exponent = 2.5;
  double retweet_exponent = 2.5;
  std::size_t lowcred_domain_count = 12;
  double planted_residual = 0.13;  // mass share for evaluation-only posters
  std::int64_t observation_days = 60;
  std::int64_t evaluation_days = 240;

  void validate() const;  // throws ConfigError
  PeriodSplit split() const;
};

/// What the generator knows to be true about one period's corpus slice.
struct PeriodTruth {
  std::map<std::string, std::map<std::string, std::uint64_t>> edges;
  std::map<std::string, std::uint64_t> influence;
  std::map<std::string, std::vector<std::uint64_t>> fib_inputs;  // descending
  std::uint64_t total_weight = 0;
  std::size_t n_records = 0;
};

struct GroundTruth {
  PeriodSplit split{};
  std::vector<std::string> superspreaders;
  std::vector<std::string> lowcred_domains;
  PeriodTruth observation;
  PeriodTruth evaluation;
  std::map<std::string, double> m_eval;  // per evaluation poster
  double residual_fraction = 0.0;        // realized, not the config target
  std::size_t n_dropped = 0;

  std::string to_json() const;
  static GroundTruth from_json(const std::string& text);
};

struct SynthResult {
  std::vector<std::string> corpus_lines;  // one serialized record each
  GroundTruth truth;
};

/// Deterministic corpus with planted superspreaders: heavy-tailed activity
/// and retweet counts in the observation period, evaluation mass correlated
/// with observation influence, plus evaluation-only posters carrying the
/// planted residual share and a few out-of-window stragglers.
/// Single-threaded by design.
SynthResult generate(const GeneratorConfig& config);

/// Writes the corpus (one record per line) and the ground-truth JSON.
void write_synth_result(const SynthResult& result, const std::string& corpus_path,
                        const std::string& truth_path);

} // namespace fibrank
