#pragma once

#include <cstdint>
#include <string>
#include <vector>

#include "fibrank/behavior.hpp"
#include "fibrank/ingest.hpp"
#include "fibrank/metrics.hpp"
#include "fibrank/stats.hpp"
#include "fibrank/synth.hpp"

namespace fibrank::cli {

/// Everything a pipeline run needs, serialized as one JSON document.
/// from_json(to_json(c)) reproduces every field; missing keys keep their
/// defaults, so hand-written configs can stay short.
struct PipelineConfig {
  std::string input;            // line-delimited JSON corpus, ".gz" accepted
  std::string domain_list;      // one low-credibility domain per line
  std::string shortener_map;    // optional short-link TSV (offline expansion)
  std::string status_file;      // optional account status CSV
  std::string annotation_file;  // optional account annotation CSV
  PeriodSplit split;
  std::vector<Metric> metrics = {Metric::Fib, Metric::Influence};
  TopRule top_rule = TopRule::percent_positive(1.0);
  // characterization window; {0,0} means observation start plus 90 days
  Interval ratio_window{0, 0};
  std::string out_dir = "out";
  std::uint64_t seed = 1;
  std::string scorer = "offline-stub";  // offline-stub | cached | live
  std::string scorer_endpoint;          // HTTP scorer for cached/live modes
  std::string toxicity_cache;           // TSV cache path; empty -> out_dir
  std::uint64_t follower_threshold = 500000;
  std::size_t max_scan_k = 0;   // 0: up to the shorter ranking
  std::size_t curve_stride = 1; // curve export downsampling
  unsigned workers = 0;         // 0: all available cores
  bool strict = true;           // abort on malformed corpus lines

  void validate() const;  // throws ConfigError
  Interval effective_ratio_window() const;

  std::string to_json() const;
  static PipelineConfig from_json(const std::string& text);
  void save(const std::string& path) const;
  static PipelineConfig load(const std::string& path);
  /// Rewrites relative file paths against base (the config file's
  /// directory). Absolute paths and empty fields stay untouched.
  void resolve_paths(const std::string& base);
};

struct LoadedCorpus {
  std::vector<LabeledRecord> observation;
  std::vector<LabeledRecord> evaluation;
  IngestCounters counters;
  std::uint64_t dropped = 0;
  std::vector<std::string> warnings;  // first few malformed-line diagnostics
};

/// Parses, labels, and splits the corpus, sharded across config.workers
/// threads with a fixed merge order. Throws IoError when an input file is
/// missing, ParseError (with the line number) in strict mode.
LoadedCorpus load_corpus(const PipelineConfig& config);

/// Observation-period metrics table, sharded accumulation.
std::vector<AccountMetrics> observation_metrics(const LoadedCorpus& corpus,
                                                unsigned workers);

// Subcommands. Each writes its artifacts plus manifest.json into
// config.out_dir and throws on failure; exit_code_for maps the exception.
void run_ingest(const PipelineConfig& config);
void run_rank(const PipelineConfig& config);
void run_dismantle(const PipelineConfig& config);
void run_scan(const PipelineConfig& config);
void run_characterize(const PipelineConfig& config);

/// Generates a corpus plus ground truth and a ready-to-run config.json
/// pointing at them.
void run_synth(const GeneratorConfig& config, const std::string& out_dir,
               bool gzip_corpus);

struct StatsRequest {
  std::string test;  // cvm | mwu | spearman | alpha
  std::string x_path;
  std::string y_path;
  std::string annotations_path;
  std::string out_path;  // optional copy of the result JSON
  Sides sides = Sides::two_sided;
  TestOptions options;
};

/// Runs one statistical test over file inputs; returns the result as a
/// single JSON line (also written to out_path when set).
std::string run_stats(const StatsRequest& request);

/// One numeric value per line; blank lines skipped, ".gz" accepted.
std::vector<double> read_sample(const std::string& path);

/// Documented exit codes: 1 usage/config, 2 bad input, 3 internal.
int exit_code_for(const std::exception& error);

} // namespace fibrank::cli
