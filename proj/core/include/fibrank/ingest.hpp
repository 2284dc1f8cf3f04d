#pragma once

#include <cstdint>
#include <functional>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fibrank/error.hpp"

namespace fibrank {

struct RetweetRef {
  std::string tweet_id;
  std::string author_id;

  bool operator==(const RetweetRef&) const = default;
};

/// One tweet event. Retweets reference the original post they amplify;
/// a retweet's urls mirror the links of the original post.
struct TweetRecord {
  std::string tweet_id;
  std::string author_id;
  std::int64_t timestamp = 0; // UTC epoch seconds, > 0
  std::optional<RetweetRef> retweet_of;
  std::vector<std::string> urls;
  std::optional<std::uint64_t> follower_count;
  std::optional<double> bot_score; // in [0,1]
  std::optional<double> toxicity;  // in [0,1]
  std::optional<std::string> text_lang;

  bool is_original() const noexcept { return !retweet_of.has_value(); }

  bool operator==(const TweetRecord&) const = default;
};

struct LabeledRecord {
  TweetRecord record;
  bool low_cred = false;
};

/// Parses one line of the line-delimited JSON corpus schema
/// (docs/corpus-schema.md). Throws ParseError for malformed JSON or
/// missing required fields, ValidationError for out-of-range values.
TweetRecord parse_record(std::string_view line, std::size_t line_no = 0);

/// Canonical single-line JSON form; absent optional fields are omitted.
/// parse_record(serialize_record(r)) == r, and serialization is a fixpoint.
std::string serialize_record(const TweetRecord& record);

struct Interval {
  std::int64_t start = 0;
  std::int64_t end = 0; // half-open: [start, end)

  bool contains(std::int64_t t) const noexcept { return t >= start && t < end; }
  std::int64_t length() const noexcept { return end - start; }
};

struct PeriodSplit {
  Interval observation;
  Interval evaluation;

  /// Observation must close before evaluation opens.
  void validate() const;
};

enum class Period { observation, evaluation, dropped };

Period assign_period(std::int64_t timestamp, const PeriodSplit& split);

struct SplitResult {
  std::vector<TweetRecord> observation;
  std::vector<TweetRecord> evaluation;
  std::uint64_t dropped = 0;
};

/// Partitions records by timestamp; records outside both intervals are
/// dropped and counted.
SplitResult split_periods(std::vector<TweetRecord> records, const PeriodSplit& split);

/// Shared counters for an ingest pass. Accumulate one instance per shard
/// and merge; no internal synchronization.
struct IngestCounters {
  std::uint64_t lines = 0;
  std::uint64_t parsed = 0;
  std::uint64_t parse_errors = 0;
  std::uint64_t empty_lines = 0;
  std::uint64_t expansion_failures = 0;
  std::uint64_t low_cred = 0;

  void merge(const IngestCounters& other) {
    lines += other.lines;
    parsed += other.parsed;
    parse_errors += other.parse_errors;
    empty_lines += other.empty_lines;
    expansion_failures += other.expansion_failures;
    low_cred += other.low_cred;
  }
};

struct CorpusReadOptions {
  bool strict = false;          // rethrow per-line errors instead of counting
  std::size_t max_warnings = 8; // per-line errors kept for diagnostics
};

/// Streams a corpus file (plain or .gz), invoking the callback per parsed
/// record. Malformed lines are counted (and kept as warning strings) unless
/// options.strict is set.
void read_corpus(const std::string& path,
                 const std::function<void(TweetRecord&&, std::size_t line_no)>& on_record,
                 IngestCounters& counters,
                 std::vector<std::string>* warnings = nullptr,
                 const CorpusReadOptions& options = {});

} // namespace fibrank
